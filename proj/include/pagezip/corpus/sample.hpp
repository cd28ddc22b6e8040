// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pagezip/render/layout.hpp>
#include <pagezip/text/source_text.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace pagezip
{

/// One QA item. Spans are code-point intervals into `document`.
struct Sample
{
    std::string id;
    std::string question;
    std::vector<std::string> answers;
    std::string document;
    std::vector<CharSpan> spans;
    int hopCount = 1;
    std::string dataset;
    std::optional<std::int64_t> numTokens; // injected N, overrides the counter

    friend bool operator==(Sample const&, Sample const&) = default;
};

/// Checks id, hop count, and that every span lies in the document and its
/// slice contains a gold answer (ASCII case-insensitive). Throws InputError.
void validateSample(Sample const& sample);

/// First case-insensitive occurrence of each answer that appears in the
/// document, as code-point spans. Answers that never occur are skipped.
[[nodiscard]] std::vector<CharSpan> locateAnswerSpans(std::string const& document,
                                                      std::vector<std::string> const& answers);

/// Reads {id, question, answers[], document, spans[[s,e]], hop_count?,
/// dataset?, num_tokens?}. Missing spans are located from the answers.
[[nodiscard]] Sample sampleFromJson(nlohmann::json const& j);
[[nodiscard]] nlohmann::json sampleToJson(Sample const& sample);

/// One sample per non-blank line. Throws InputError naming the bad line.
[[nodiscard]] std::vector<Sample> readSamplesJsonl(std::filesystem::path const& path);
[[nodiscard]] std::vector<Sample> parseSamplesJsonl(std::istream& in, std::string const& sourceName = "<input>");

/// Pages whose character span intersects any of `spans`. Empty spans select
/// nothing. Throws RangeError for spans outside [0, sourceCharCount].
[[nodiscard]] std::set<int> mapSpansToPages(std::span<CharSpan const> spans, PageSet const& pages);

struct EvidenceMap
{
    std::string sampleId;
    std::set<int> pages;
};

/// Every answer span is fully covered by evidence pages, and the text of
/// the covering pages, joined in page order, contains a gold answer.
[[nodiscard]] bool evidenceSound(Sample const& sample, SourceText const& text, PageSet const& pages,
                                 std::set<int> const& evidence);

} // namespace pagezip
