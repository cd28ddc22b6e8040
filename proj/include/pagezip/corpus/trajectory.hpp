// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pagezip/ledger/ledger.hpp>
#include <pagezip/protocol/chat.hpp>
#include <pagezip/protocol/tool_call.hpp>

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pagezip
{

/// What Expand returns for a selected page.
enum class ExpandKind
{
    SourceText, // exact character slice of the page
    OcrText,    // external OCR of a high-resolution render
    ImageZoom,  // the page re-rendered at high resolution
};

[[nodiscard]] std::string_view toString(ExpandKind kind) noexcept;
/// "source_text", "ocr_text" or "image_zoom". Throws InputError.
[[nodiscard]] ExpandKind expandKindFromString(std::string_view name);

/// The tool the model is told to call for this kind.
[[nodiscard]] ToolName toolFor(ExpandKind kind) noexcept;

enum class EpisodeStatus
{
    Answered,
    BudgetExhausted,
    ProtocolError,
};

[[nodiscard]] std::string_view toString(EpisodeStatus status) noexcept;
[[nodiscard]] EpisodeStatus episodeStatusFromString(std::string_view name);

/// One model turn and what the engine did with it.
struct TurnRecord
{
    int turn = 0; // 1-based
    std::string reply;
    std::string reasoning;
    std::optional<ToolCall> call;
    bool expanded = false; // the call ran and its payload entered the context
    std::optional<std::string> toolResponse;
    std::vector<std::string> warnings;

    friend bool operator==(TurnRecord const&, TurnRecord const&) = default;
};

struct Trajectory
{
    std::string sampleId;
    std::string dataset;
    std::string question;
    std::string preset;
    ExpandKind expandKind = ExpandKind::SourceText;
    int pageCount = 0;
    int maxTurns = 6;
    std::vector<ChatMessage> messages; // exactly what the model saw, plus its last reply
    std::vector<TurnRecord> turns;
    std::string finalAnswer;
    EpisodeStatus status = EpisodeStatus::Answered;
    TokenLedger ledger;
    std::string error;   // set for protocol_error
    int errorStatus = 0; // HTTP status of that error, 0 if none

    /// Replies that carried a well-formed tool call (M).
    [[nodiscard]] std::size_t toolCallCount() const;
    /// Pages whose expansion succeeded, in call order.
    [[nodiscard]] std::vector<int> expandedPages() const;

    friend bool operator==(Trajectory const&, Trajectory const&) = default;
};

void to_json(nlohmann::json& j, TurnRecord const& turn);
void from_json(nlohmann::json const& j, TurnRecord& turn);
void to_json(nlohmann::json& j, Trajectory const& trajectory);
void from_json(nlohmann::json const& j, Trajectory& trajectory);

} // namespace pagezip
