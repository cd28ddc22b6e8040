// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pagezip/corpus/trajectory.hpp>
#include <pagezip/ledger/token_counter.hpp>
#include <pagezip/protocol/chat.hpp>
#include <pagezip/render/layout.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pagezip
{

/// Bounds for high-resolution zoom renders. The scale is clamped so the
/// rendered pixel count stays within [minPixels, maxPixels].
struct ZoomLimits
{
    double scale = 3.0;
    std::int64_t minPixels = 1;
    std::int64_t maxPixels = 4'194'304;
};

struct EpisodeConfig
{
    int maxTurns = 6;
    ExpandKind expandKind = ExpandKind::SourceText;
    double temperature = 0.0;
    int maxTokens = 2048;
    std::optional<std::uint64_t> seed;
    ZoomLimits zoom;

    /// Throws InputError.
    void validate() const;
};

/// A document rendered at one preset; shared read-only across episodes.
struct RenderedDocument
{
    std::string id;
    std::shared_ptr<SourceText const> text;
    std::shared_ptr<PageSet const> pages;
    std::shared_ptr<GlyphMetrics const> metrics;              // used for zoom renders
    std::vector<std::shared_ptr<std::string const>> pagePngs; // empty unless encoded
    std::int64_t sourceTokens = 0;                            // N
};

/// Renders `text` and measures N with `counter` unless `injectedTokens` is given.
[[nodiscard]] std::shared_ptr<RenderedDocument const> makeRenderedDocument(
    std::string id, std::string text, RenderPreset const& preset, std::shared_ptr<GlyphMetrics const> metrics,
    TokenCounter const& counter, std::optional<std::int64_t> injectedTokens = std::nullopt,
    EncoderProfile const& encoder = defaultEncoder(), bool encodePngs = false);

/// Reference used for page k in messages and exported records.
[[nodiscard]] std::string pageImageRef(std::string const& docId, int k);
[[nodiscard]] std::string zoomImageRef(std::string const& docId, int k);

/// Scale actually used for a zoom render of a width x height page.
[[nodiscard]] double clampedZoomScale(int width, int height, ZoomLimits const& limits);

struct ExpandResponse
{
    ExpandKind kind = ExpandKind::SourceText;
    bool ok = false;                  // false for an invalid index (nothing is charged)
    std::vector<ContentPart> payload; // tool message content
    std::int64_t tokenCost = 0;
    int width = 0;                    // zoom render size
    int height = 0;
};

/// Executes Expand(k). Text kinds are charged counter(payload text) tokens
/// (at least 1); zoom renders are charged their visual tokens.
/// Throws EndpointError when OCR is requested without a working OCR endpoint.
[[nodiscard]] ExpandResponse expand(RenderedDocument const& doc, ToolCall const& call, ExpandKind kind,
                                    EpisodeConfig const& config, TokenCounter const& counter,
                                    OcrEndpoint* ocr = nullptr);

/// System prompt, then page images with the question, then the turn loop.
[[nodiscard]] std::vector<ChatMessage> initialMessages(RenderedDocument const& doc, std::string const& question,
                                                       ExpandKind kind);

/// Runs one episode to completion. Never throws for endpoint failures: those
/// end the episode with status protocol_error and the partial record.
[[nodiscard]] Trajectory runEpisode(RenderedDocument const& doc, std::string const& question,
                                    EpisodeConfig const& config, ChatEndpoint& model, TokenCounter const& counter,
                                    OcrEndpoint* ocr = nullptr);

struct EpisodeJob
{
    std::shared_ptr<RenderedDocument const> doc;
    std::string question;
    std::string dataset;
    EpisodeContext context; // handed to the endpoint factory
};

/// Runs jobs on up to `parallelism` threads with one fresh endpoint per
/// episode. Output order matches input order.
[[nodiscard]] std::vector<Trajectory> runEpisodes(std::span<EpisodeJob const> jobs, EpisodeConfig const& config,
                                                  ChatEndpointFactory const& modelFactory, TokenCounter const& counter,
                                                  OcrEndpointFactory const& ocrFactory = {}, int parallelism = 1);

} // namespace pagezip
