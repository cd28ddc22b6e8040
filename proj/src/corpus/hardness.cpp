// SPDX-License-Identifier: Apache-2.0
#include <pagezip/corpus/hardness.hpp>
#include <pagezip/error.hpp>
#include <pagezip/protocol/prompts.hpp>
#include <pagezip/protocol/tool_call.hpp>
#include <pagezip/scoring/scoring.hpp>
#include <pagezip/util/random.hpp>

#include <cmath>

namespace pagezip
{

std::string_view toString(Hardness h) noexcept
{
    switch (h)
    {
        case Hardness::Easy: return "easy";
        case Hardness::Hard: return "hard";
        case Hardness::Unclassified: return "unclassified";
    }
    return "unclassified";
}

ChatRequest directAnswerRequest(RenderedDocument const& doc, std::string const& question, EpisodeConfig const& config)
{
    // Same user turn as an episode, without the tool-describing system prompt.
    auto messages = initialMessages(doc, question, config.expandKind);
    auto user = messages.at(1);
    user.parts.back().text += directAnswerInstruction();
    return ChatRequest { .messages = { user },
                         .temperature = config.temperature,
                         .maxTokens = config.maxTokens,
                         .seed = config.seed };
}

HardnessResult classifyHardness(RenderedDocument const& doc, Sample const& sample, ChatEndpoint& model, ChatEndpoint& judge,
                                EpisodeConfig const& config)
{
    auto result = HardnessResult {};
    try
    {
        result.modelAnswer = extractAnswerText(model.complete(directAnswerRequest(doc, sample.question, config)));
        result.judgeReply = judge.complete(judgeRequest(sample.question, sample.answers, result.modelAnswer));
        result.label = parseVerdict(result.judgeReply).correct ? Hardness::Easy : Hardness::Hard;
    }
    catch (EndpointError const& e)
    {
        result.label = Hardness::Unclassified;
        result.error = e.what();
        result.errorStatus = e.httpStatus();
        result.endpointFailure = true;
    }
    catch (InvalidVerdict const& e)
    {
        result.label = Hardness::Unclassified;
        result.error = e.what();
    }
    return result;
}

void FilterCounts::add(Hardness h)
{
    ++generated;
    switch (h)
    {
        case Hardness::Easy: ++easy; break;
        case Hardness::Hard: ++hard; break;
        case Hardness::Unclassified: ++unclassified; break;
    }
}

double FilterCounts::keepRate() const noexcept
{
    return generated == 0 ? 0.0 : static_cast<double>(hard) / static_cast<double>(generated);
}

TrainingSplit splitForTraining(std::vector<std::string> hardIds, std::vector<std::string> easyIds, std::uint64_t seed,
                               double sftFraction)
{
    if (!(sftFraction >= 0.0 && sftFraction <= 1.0))
        throw InputError("SFT fraction must lie in [0, 1]");
    auto rng = SplitMix64(seed);
    shuffleInPlace(hardIds, rng);
    auto const sftCount = static_cast<std::size_t>(std::llround(sftFraction * static_cast<double>(hardIds.size())));
    auto split = TrainingSplit {};
    split.sft.assign(hardIds.begin(), hardIds.begin() + static_cast<std::ptrdiff_t>(sftCount));
    split.rl.assign(hardIds.begin() + static_cast<std::ptrdiff_t>(sftCount), hardIds.end());
    split.rl.insert(split.rl.end(), easyIds.begin(), easyIds.end());
    shuffleInPlace(split.rl, rng);
    return split;
}

} // namespace pagezip
