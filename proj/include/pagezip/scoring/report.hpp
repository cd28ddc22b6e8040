// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pagezip/corpus/trajectory.hpp>
#include <pagezip/protocol/chat.hpp>
#include <pagezip/scoring/scoring.hpp>

#include <json.hpp>

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace pagezip
{

/// What the scorer needs to know about a sample besides its trajectory.
struct GoldRecord
{
    std::string id;
    std::string dataset;
    std::vector<std::string> answers;
    std::set<int> evidencePages;
    int pageCount = 0;
};

void to_json(nlohmann::json& j, GoldRecord const& g);
void from_json(nlohmann::json const& j, GoldRecord& g);

/// Per-episode outcome. `correct` is empty when the judge reply had no
/// verdict; such episodes are left out of accuracy and reward.
struct ScoredEpisode
{
    std::string sampleId;
    std::string dataset;
    EpisodeStatus status = EpisodeStatus::Answered;
    std::optional<bool> correct;
    bool judged = false; // an answer was sent to the judge
    bool selectionHit = false;
    bool usedTool = false;
    std::size_t toolCalls = 0;
    double icr = 0;
    double ecr = 0;
    std::optional<double> reward;
    std::string judgeReply;
};

void to_json(nlohmann::json& j, ScoredEpisode const& e);

struct ScoreOptions
{
    bool forceExtract = false; // judge the last reply of budget-exhausted episodes
    int parallelism = 1;
    RewardParams reward;
};

/// Judges every trajectory that has an answer (fan-out on up to
/// `parallelism` threads, one judge endpoint per call). Episodes without an
/// answer count as incorrect without a judge call. protocol_error episodes are
/// kept in the list but never judged. Throws InputError for a trajectory
/// without a gold record, and EndpointError when the judge fails.
[[nodiscard]] std::vector<ScoredEpisode> scoreTrajectories(std::span<Trajectory const> trajectories,
                                                           std::map<std::string, GoldRecord> const& gold,
                                                           ChatEndpointFactory const& judgeFactory,
                                                           ScoreOptions const& options = {});

struct DatasetScore
{
    std::string dataset;
    std::size_t episodes = 0;       // excluding protocol errors
    std::size_t protocolErrors = 0;
    std::size_t invalidVerdicts = 0;
    std::size_t correct = 0;
    double qaAcc = 0;          // percent of episodes with a verdict
    double selAcc = 0;         // percent of episodes
    double meanIcr = 0;
    double meanEcr = 0;
    double avgExpandCalls = 0; // tool calls per episode
    double meanReward = 0;
};

struct ScoreReport
{
    std::vector<DatasetScore> datasets; // sorted by name
    DatasetScore overall;               // all episodes pooled, dataset "all"
    std::optional<double> macroQaAcc;   // unweighted mean over datasets
};

[[nodiscard]] ScoreReport aggregateScores(std::span<ScoredEpisode const> episodes);

/// dataset,episodes,protocol_errors,invalid_verdicts,qa_acc,sel_acc,icr,ecr,avg_expand_calls,reward
/// with one row per dataset, a "macro" row (qa_acc only) and an "all" row.
[[nodiscard]] std::string reportCsv(ScoreReport const& report);
[[nodiscard]] std::string reportText(ScoreReport const& report);
[[nodiscard]] nlohmann::json reportJson(ScoreReport const& report);

} // namespace pagezip
