// SPDX-License-Identifier: Apache-2.0
#include <pagezip/error.hpp>
#include <pagezip/protocol/prompts.hpp>
#include <pagezip/protocol/tool_call.hpp>
#include <pagezip/scoring/scoring.hpp>

#include <cmath>
#include <numeric>

namespace pagezip
{

ChatRequest judgeRequest(std::string_view question, std::vector<std::string> const& goldAnswers, std::string_view modelAnswer)
{
    auto request = ChatRequest {};
    request.messages.push_back(ChatMessage::makeText(Role::User, judgePrompt(question, goldAnswers, modelAnswer)));
    request.temperature = 0.0;
    request.maxTokens = 2048;
    return request;
}

JudgeVerdict parseVerdict(std::string_view raw)
{
    auto s = raw;
    while (!s.empty() && (s.back() == ' ' || s.back() == '\n' || s.back() == '\t' || s.back() == '\r' || s.back() == '.'))
        s.remove_suffix(1);
    if (s.ends_with("[[YES]]"))
        return { true, std::string(raw) };
    if (s.ends_with("[[NO]]"))
        return { false, std::string(raw) };
    throw InvalidVerdict("judge reply has no terminal [[YES]] or [[NO]]: '" + std::string(raw.substr(0, 200)) + "'");
}

JudgeVerdict judgeAnswer(ChatEndpoint& judge, std::string_view question, std::vector<std::string> const& goldAnswers,
                         std::string_view modelAnswer)
{
    return parseVerdict(judge.complete(judgeRequest(question, goldAnswers, modelAnswer)));
}

double reward(bool correct, bool usedTool, RewardParams const& params)
{
    auto const c = correct ? 1.0 : 0.0;
    auto const u = usedTool ? 1.0 : 0.0;
    return params.answerWeight * c + params.toolWeight * c * u;
}

bool selectionHit(std::vector<int> const& expandedPages, std::set<int> const& evidencePages)
{
    for (auto const k: expandedPages)
        if (evidencePages.contains(k))
            return true;
    return false;
}

bool selectionHit(Trajectory const& trajectory, std::set<int> const& evidencePages)
{
    return selectionHit(trajectory.expandedPages(), evidencePages);
}

double macroAverage(std::span<double const> values)
{
    if (values.empty())
        throw InputError("macro average of an empty list");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double roundHalfAway(double value, int decimals)
{
    auto const scale = std::pow(10.0, decimals);
    // The nudge keeps values such as 68.85 (stored as 68.8499...) on the printed side.
    auto const scaled = value * scale;
    return std::round(scaled + std::copysign(1e-9 * std::max(1.0, std::abs(scaled)), scaled)) / scale;
}

AgreementStats agreementStats(std::span<bool const> a, std::span<bool const> b)
{
    if (a.size() != b.size())
        throw InputError("verdict lists differ in length");
    if (a.empty())
        throw InputError("verdict lists are empty");
    auto const n = static_cast<double>(a.size());
    auto agree = 0.0;
    auto aYes = 0.0;
    auto bYes = 0.0;
    for (auto i = std::size_t { 0 }; i < a.size(); ++i)
    {
        agree += a[i] == b[i];
        aYes += a[i];
        bYes += b[i];
    }
    auto const po = agree / n;
    auto const pe = (aYes / n) * (bYes / n) + (1 - aYes / n) * (1 - bYes / n);
    auto stats = AgreementStats { .rawAgreement = 100.0 * po, .kappa = std::nullopt };
    if (pe < 1.0)
        stats.kappa = (po - pe) / (1.0 - pe);
    return stats;
}

std::optional<std::string> answerForJudging(Trajectory const& trajectory, bool forceExtract)
{
    switch (trajectory.status)
    {
        case EpisodeStatus::Answered: return trajectory.finalAnswer;
        case EpisodeStatus::BudgetExhausted:
            if (forceExtract && !trajectory.turns.empty())
                return extractAnswerText(trajectory.turns.back().reply);
            return std::nullopt;
        case EpisodeStatus::ProtocolError: return std::nullopt;
    }
    return std::nullopt;
}

} // namespace pagezip
