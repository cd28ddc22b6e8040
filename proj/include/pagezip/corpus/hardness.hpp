// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pagezip/corpus/sample.hpp>
#include <pagezip/protocol/chat.hpp>
#include <pagezip/protocol/episode.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pagezip
{

enum class Hardness
{
    Easy,
    Hard,
    Unclassified, // endpoint failure or unparseable verdict
};

[[nodiscard]] std::string_view toString(Hardness h) noexcept;

struct HardnessResult
{
    Hardness label = Hardness::Unclassified;
    std::string modelAnswer;
    std::string judgeReply;
    std::string error;
    int errorStatus = 0;
    bool endpointFailure = false; // as opposed to an unparseable verdict
};

/// Single-turn, no-tool answer over the compressed pages, then one judge
/// call. Correct means easy. Failures never throw; they come back unclassified.
[[nodiscard]] HardnessResult classifyHardness(RenderedDocument const& doc, Sample const& sample, ChatEndpoint& model,
                                              ChatEndpoint& judge, EpisodeConfig const& config = {});

/// The no-tool request used by classifyHardness.
[[nodiscard]] ChatRequest directAnswerRequest(RenderedDocument const& doc, std::string const& question,
                                              EpisodeConfig const& config = {});

struct FilterCounts
{
    std::size_t generated = 0;
    std::size_t easy = 0;
    std::size_t hard = 0;
    std::size_t unclassified = 0;

    void add(Hardness h);
    /// hard / generated; 0 when nothing was generated.
    [[nodiscard]] double keepRate() const noexcept;
};

struct FilterReport
{
    FilterCounts total;
    std::map<std::string, FilterCounts> byDataset;
};

struct TrainingSplit
{
    std::vector<std::string> sft; // ids
    std::vector<std::string> rl;
};

/// A seeded sftFraction of the hard ids (rounded to nearest) goes to SFT;
/// the remaining hard ids and all easy ids form the RL pool. Both lists come
/// back shuffled by the same seed.
[[nodiscard]] TrainingSplit splitForTraining(std::vector<std::string> hardIds, std::vector<std::string> easyIds,
                                             std::uint64_t seed, double sftFraction = 0.8);

} // namespace pagezip
