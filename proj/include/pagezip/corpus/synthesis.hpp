// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pagezip/corpus/sample.hpp>
#include <pagezip/corpus/trajectory.hpp>
#include <pagezip/protocol/chat.hpp>
#include <pagezip/protocol/episode.hpp>

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pagezip
{

struct EvidencePage
{
    int index = 0;    // 1-based page
    std::string text; // uncompressed page text
};

/// A request for a teacher model to write one synthetic trace.
struct SynthesisRequest
{
    std::string sampleId;
    ChatRequest request;              // trace-generation system prompt + task
    std::vector<int> evidencePages;   // E*, ascending
    int requiredToolCalls = 0;        // |E*|
    ToolName tool = ToolName::ReadText;
};

/// Throws InputError for an empty evidence set.
[[nodiscard]] SynthesisRequest buildSynthesisRequest(Sample const& sample, std::vector<EvidencePage> const& evidence,
                                                     std::string const& answer, int pageCount,
                                                     ExpandKind kind = ExpandKind::SourceText);

struct TraceValidation
{
    bool ok = false;
    std::string reason;                 // why it was rejected
    std::vector<std::string> responses; // RESPONSE1..n bodies, trimmed
};

/// Splits a teacher reply on ---RESPONSE<n>--- markers and checks it: the
/// first |E*| responses carry exactly one well-formed tool call each on a
/// distinct evidence page, and the last one is a non-empty answer without a
/// tool call.
[[nodiscard]] TraceValidation validateSynthesizedTrace(std::string const& reply, SynthesisRequest const& request);

/// Replays validated responses through the episode engine so tool responses,
/// ledger and masks match a live run exactly.
[[nodiscard]] Trajectory assembleSyntheticTrajectory(RenderedDocument const& doc, Sample const& sample,
                                                     std::vector<std::string> const& responses,
                                                     TokenCounter const& counter, EpisodeConfig config = {});

void to_json(nlohmann::json& j, SynthesisRequest const& request);

} // namespace pagezip
