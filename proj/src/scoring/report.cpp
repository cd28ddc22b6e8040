// SPDX-License-Identifier: Apache-2.0
#include <pagezip/error.hpp>
#include <pagezip/ledger/ledger.hpp>
#include <pagezip/scoring/report.hpp>
#include <pagezip/util/parallel.hpp>

#include <cstdio>

namespace pagezip
{

void to_json(nlohmann::json& j, GoldRecord const& g)
{
    j = { { "id", g.id },
          { "dataset", g.dataset },
          { "answers", g.answers },
          { "evidence_pages", g.evidencePages },
          { "page_count", g.pageCount } };
}

void from_json(nlohmann::json const& j, GoldRecord& g)
{
    g.id = j.at("id").get<std::string>();
    g.dataset = j.value("dataset", std::string {});
    g.answers = j.at("answers").get<std::vector<std::string>>();
    g.evidencePages = j.at("evidence_pages").get<std::set<int>>();
    g.pageCount = j.value("page_count", 0);
}

void to_json(nlohmann::json& j, ScoredEpisode const& e)
{
    j = { { "id", e.sampleId },
          { "dataset", e.dataset },
          { "status", toString(e.status) },
          { "correct", e.correct ? nlohmann::json(*e.correct) : nlohmann::json(nullptr) },
          { "judged", e.judged },
          { "selection_hit", e.selectionHit },
          { "used_tool", e.usedTool },
          { "tool_calls", e.toolCalls },
          { "icr", e.icr },
          { "ecr", e.ecr },
          { "reward", e.reward ? nlohmann::json(*e.reward) : nlohmann::json(nullptr) },
          { "judge_reply", e.judgeReply } };
}

std::vector<ScoredEpisode> scoreTrajectories(std::span<Trajectory const> trajectories,
                                             std::map<std::string, GoldRecord> const& gold,
                                             ChatEndpointFactory const& judgeFactory, ScoreOptions const& options)
{
    if (options.parallelism < 1)
        throw InputError("parallelism must be at least 1");
    auto scored = std::vector<ScoredEpisode>(trajectories.size());
    for (auto i = std::size_t { 0 }; i < trajectories.size(); ++i)
    {
        auto const& t = trajectories[i];
        auto const g = gold.find(t.sampleId);
        if (g == gold.end())
            throw InputError("no gold record for sample " + t.sampleId);
        auto& e = scored[i];
        e.sampleId = t.sampleId;
        e.dataset = t.dataset.empty() ? g->second.dataset : t.dataset;
        e.status = t.status;
        e.usedTool = !t.expandedPages().empty();
        e.selectionHit = selectionHit(t, g->second.evidencePages);
        e.toolCalls = t.expandedPages().size(); // executed expansions; a call on the last turn never runs
        e.icr = icr(t.ledger);
        e.ecr = ecr(t.ledger);
    }

    parallelFor(trajectories.size(), options.parallelism, [&](std::size_t i) {
        auto const& t = trajectories[i];
        auto& e = scored[i];
        if (t.status == EpisodeStatus::ProtocolError)
            return;
        auto const answer = answerForJudging(t, options.forceExtract);
        if (!answer)
        {
            e.correct = false;
        }
        else
        {
            auto const& g = gold.at(t.sampleId);
            auto judge = judgeFactory(EpisodeContext { .sampleId = t.sampleId,
                                                       .goldAnswers = g.answers,
                                                       .evidencePages = { g.evidencePages.begin(), g.evidencePages.end() },
                                                       .pageCount = g.pageCount });
            e.judged = true;
            auto const request = judgeRequest(t.question, g.answers, *answer);
            e.judgeReply = judge->complete(request);
            try
            {
                e.correct = parseVerdict(e.judgeReply).correct;
            }
            catch (InvalidVerdict const&)
            {
                e.correct.reset();
            }
        }
        if (e.correct)
            e.reward = reward(*e.correct, e.usedTool, options.reward);
    });
    return scored;
}

namespace
{

DatasetScore aggregate(std::string name, std::vector<ScoredEpisode const*> const& episodes)
{
    auto s = DatasetScore {};
    s.dataset = std::move(name);
    auto withVerdict = std::size_t { 0 };
    auto hits = std::size_t { 0 };
    auto icrSum = 0.0;
    auto ecrSum = 0.0;
    auto calls = std::size_t { 0 };
    auto rewardSum = 0.0;
    for (auto const* e: episodes)
    {
        if (e->status == EpisodeStatus::ProtocolError)
        {
            ++s.protocolErrors;
            continue;
        }
        ++s.episodes;
        hits += e->selectionHit;
        icrSum += e->icr;
        ecrSum += e->ecr;
        calls += e->toolCalls;
        if (!e->correct)
        {
            ++s.invalidVerdicts;
            continue;
        }
        ++withVerdict;
        s.correct += *e->correct;
        rewardSum += *e->reward;
    }
    if (s.episodes > 0)
    {
        auto const n = static_cast<double>(s.episodes);
        s.selAcc = 100.0 * static_cast<double>(hits) / n;
        s.meanIcr = icrSum / n;
        s.meanEcr = ecrSum / n;
        s.avgExpandCalls = static_cast<double>(calls) / n;
    }
    if (withVerdict > 0)
    {
        s.qaAcc = 100.0 * static_cast<double>(s.correct) / static_cast<double>(withVerdict);
        s.meanReward = rewardSum / static_cast<double>(withVerdict);
    }
    return s;
}

std::string csvRow(DatasetScore const& s, bool qaOnly)
{
    char line[512];
    if (qaOnly)
        std::snprintf(line, sizeof(line), "%s,,,,%.1f,,,,,\n", s.dataset.c_str(), s.qaAcc);
    else
        std::snprintf(line, sizeof(line), "%s,%zu,%zu,%zu,%.1f,%.1f,%.2f,%.2f,%.2f,%.3f\n", s.dataset.c_str(),
                      s.episodes, s.protocolErrors, s.invalidVerdicts, s.qaAcc, s.selAcc, s.meanIcr, s.meanEcr,
                      s.avgExpandCalls, s.meanReward);
    return line;
}

} // namespace

ScoreReport aggregateScores(std::span<ScoredEpisode const> episodes)
{
    auto byDataset = std::map<std::string, std::vector<ScoredEpisode const*>> {};
    auto all = std::vector<ScoredEpisode const*> {};
    for (auto const& e: episodes)
    {
        byDataset[e.dataset].push_back(&e);
        all.push_back(&e);
    }
    auto report = ScoreReport {};
    auto accuracies = std::vector<double> {};
    for (auto const& [name, list]: byDataset)
    {
        report.datasets.push_back(aggregate(name, list));
        if (report.datasets.back().episodes > report.datasets.back().invalidVerdicts)
            accuracies.push_back(report.datasets.back().qaAcc);
    }
    report.overall = aggregate("all", all);
    if (!accuracies.empty())
        report.macroQaAcc = macroAverage(accuracies);
    return report;
}

std::string reportCsv(ScoreReport const& report)
{
    auto out = std::string("dataset,episodes,protocol_errors,invalid_verdicts,qa_acc,sel_acc,icr,ecr,avg_expand_calls,reward\n");
    for (auto const& s: report.datasets)
        out += csvRow(s, false);
    if (report.macroQaAcc)
    {
        auto macro = DatasetScore {};
        macro.dataset = "macro";
        macro.qaAcc = roundHalfAway(*report.macroQaAcc, 1);
        out += csvRow(macro, true);
    }
    out += csvRow(report.overall, false);
    return out;
}

std::string reportText(ScoreReport const& report)
{
    auto out = std::string {};
    char line[512];
    std::snprintf(line, sizeof(line), "%-16s %8s %8s %8s %8s %8s %8s %8s\n", "dataset", "episodes", "qa_acc", "sel_acc",
                  "icr", "ecr", "expand", "invalid");
    out += line;
    auto row = [&](DatasetScore const& s) {
        std::snprintf(line, sizeof(line), "%-16s %8zu %8.1f %8.1f %8.2f %8.2f %8.2f %8zu\n", s.dataset.c_str(),
                      s.episodes, s.qaAcc, s.selAcc, s.meanIcr, s.meanEcr, s.avgExpandCalls, s.invalidVerdicts);
        out += line;
    };
    for (auto const& s: report.datasets)
        row(s);
    row(report.overall);
    if (report.macroQaAcc)
    {
        std::snprintf(line, sizeof(line), "macro qa_acc %.1f\n", roundHalfAway(*report.macroQaAcc, 1));
        out += line;
    }
    if (report.overall.protocolErrors > 0)
    {
        std::snprintf(line, sizeof(line), "protocol errors (excluded): %zu\n", report.overall.protocolErrors);
        out += line;
    }
    return out;
}

nlohmann::json reportJson(ScoreReport const& report)
{
    auto row = [](DatasetScore const& s) {
        return nlohmann::json { { "dataset", s.dataset },
                                { "episodes", s.episodes },
                                { "protocol_errors", s.protocolErrors },
                                { "invalid_verdicts", s.invalidVerdicts },
                                { "correct", s.correct },
                                { "qa_acc", s.qaAcc },
                                { "sel_acc", s.selAcc },
                                { "icr", s.meanIcr },
                                { "ecr", s.meanEcr },
                                { "avg_expand_calls", s.avgExpandCalls },
                                { "reward", s.meanReward } };
    };
    auto j = nlohmann::json { { "datasets", nlohmann::json::array() }, { "overall", row(report.overall) } };
    for (auto const& s: report.datasets)
        j["datasets"].push_back(row(s));
    j["macro_qa_acc"] = report.macroQaAcc ? nlohmann::json(*report.macroQaAcc) : nlohmann::json(nullptr);
    return j;
}

} // namespace pagezip
