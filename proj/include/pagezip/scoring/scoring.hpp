// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pagezip/corpus/trajectory.hpp>
#include <pagezip/protocol/chat.hpp>

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pagezip
{

struct JudgeVerdict
{
    bool correct = false;
    std::string raw;

    friend bool operator==(JudgeVerdict const&, JudgeVerdict const&) = default;
};

/// The judge request: one user message holding the filled template.
[[nodiscard]] ChatRequest judgeRequest(std::string_view question, std::vector<std::string> const& goldAnswers,
                                       std::string_view modelAnswer);

/// Reads the terminal [[YES]] / [[NO]] token (trailing whitespace and a
/// final period are tolerated). Throws InvalidVerdict otherwise.
[[nodiscard]] JudgeVerdict parseVerdict(std::string_view raw);

/// Sends the judge request and parses the reply. Throws EndpointError or InvalidVerdict.
[[nodiscard]] JudgeVerdict judgeAnswer(ChatEndpoint& judge, std::string_view question,
                                       std::vector<std::string> const& goldAnswers, std::string_view modelAnswer);

struct RewardParams
{
    double answerWeight = 0.7;
    double toolWeight = 0.3;
};

/// answerWeight*c + toolWeight*c*u: the tool bonus only counts when the answer is right.
[[nodiscard]] double reward(bool correct, bool usedTool, RewardParams const& params = {});

/// True iff any successful expansion hit an evidence page.
[[nodiscard]] bool selectionHit(std::vector<int> const& expandedPages, std::set<int> const& evidencePages);
[[nodiscard]] bool selectionHit(Trajectory const& trajectory, std::set<int> const& evidencePages);

/// Arithmetic mean. Throws InputError for an empty list.
[[nodiscard]] double macroAverage(std::span<double const> values);

/// Rounds half away from zero to `decimals` places, for printed tables.
[[nodiscard]] double roundHalfAway(double value, int decimals);

struct AgreementStats
{
    double rawAgreement = 0;      // percent
    std::optional<double> kappa;  // empty when chance agreement is 1
};

/// Two-rater binary Cohen's kappa with marginal-product chance agreement.
/// Throws InputError on length mismatch or empty input.
[[nodiscard]] AgreementStats agreementStats(std::span<bool const> a, std::span<bool const> b);

/// The answer the judge sees: final_answer for answered episodes. With
/// forceExtract, budget-exhausted episodes yield the last reply's post-think
/// text instead of nothing.
[[nodiscard]] std::optional<std::string> answerForJudging(Trajectory const& trajectory, bool forceExtract);

} // namespace pagezip
