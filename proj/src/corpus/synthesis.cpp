// SPDX-License-Identifier: Apache-2.0
#include <pagezip/corpus/synthesis.hpp>
#include <pagezip/error.hpp>
#include <pagezip/protocol/endpoints.hpp>
#include <pagezip/protocol/prompts.hpp>
#include <pagezip/protocol/tool_call.hpp>

#include <algorithm>
#include <regex>
#include <set>

namespace pagezip
{

namespace
{

std::string trimmed(std::string const& s)
{
    auto const b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    auto const e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

SynthesisRequest buildSynthesisRequest(Sample const& sample, std::vector<EvidencePage> const& evidence,
                                       std::string const& answer, int pageCount, ExpandKind kind)
{
    if (evidence.empty())
        throw InputError("invalid sample " + sample.id + ": empty evidence set");
    auto pages = evidence;
    std::ranges::sort(pages, {}, &EvidencePage::index);
    auto const n = static_cast<int>(pages.size());
    auto const tool = std::string(toString(toolFor(kind)));

    auto task = std::string {};
    task += "Question: " + sample.question + "\n\n";
    task += "The document is shown as " + std::to_string(pageCount) + " images. The images that hold the evidence, with their text:\n";
    for (auto const& p: pages)
        task += "\n[Image " + std::to_string(p.index) + "]\n" + p.text + "\n";
    task += "\nAnswer: " + answer + "\n\n";
    task += "Write exactly " + std::to_string(n + 1) + " responses. ";
    task += n == 1 ? std::string("RESPONSE1 contains") : "RESPONSE1 to RESPONSE" + std::to_string(n) + " each contain";
    task += " one <think> block followed by exactly one tool call\n<tool_call>{\"name\": \"" + tool
            + "\", \"arguments\": {\"image\": IMAGE_NUMBER}}</tool_call>\n";
    task += "on one of the evidence images above, each evidence image exactly once (" + std::to_string(n) + " tool call"
            + (n == 1 ? "" : "s") + " in total). ";
    task += "RESPONSE" + std::to_string(n + 1) + " contains one <think> block followed by the final answer and no tool call.";

    auto request = SynthesisRequest {};
    request.sampleId = sample.id;
    request.request.messages.push_back(ChatMessage::makeText(Role::System, std::string(traceGenerationSystemPrompt())));
    request.request.messages.push_back(ChatMessage::makeText(Role::User, std::move(task)));
    for (auto const& p: pages)
        request.evidencePages.push_back(p.index);
    request.requiredToolCalls = n;
    request.tool = toolFor(kind);
    return request;
}

TraceValidation validateSynthesizedTrace(std::string const& reply, SynthesisRequest const& request)
{
    auto v = TraceValidation {};
    static auto const marker = std::regex(R"(---RESPONSE(\d+)---)");
    auto numbers = std::vector<int> {};
    auto markersAt = std::vector<std::pair<std::size_t, std::size_t>> {};
    for (auto it = std::sregex_iterator(reply.begin(), reply.end(), marker); it != std::sregex_iterator(); ++it)
    {
        numbers.push_back(std::stoi((*it)[1].str()));
        markersAt.emplace_back(static_cast<std::size_t>(it->position()), static_cast<std::size_t>(it->length()));
    }
    if (numbers.empty())
    {
        v.reason = "no ---RESPONSE<n>--- markers";
        return v;
    }
    if (!trimmed(reply.substr(0, markersAt.front().first)).empty())
    {
        v.reason = "text before ---RESPONSE1---";
        return v;
    }
    for (auto i = std::size_t { 0 }; i < numbers.size(); ++i)
    {
        if (numbers[i] != static_cast<int>(i) + 1)
        {
            v.reason = "responses are not numbered 1.." + std::to_string(numbers.size());
            return v;
        }
        auto const begin = markersAt[i].first + markersAt[i].second;
        auto const end = i + 1 < markersAt.size() ? markersAt[i + 1].first : reply.size();
        v.responses.push_back(trimmed(reply.substr(begin, end - begin)));
    }

    auto const needed = static_cast<std::size_t>(request.requiredToolCalls);
    auto calls = std::size_t { 0 };
    auto used = std::set<int> {};
    auto const evidence = std::set<int>(request.evidencePages.begin(), request.evidencePages.end());
    for (auto i = std::size_t { 0 }; i < v.responses.size(); ++i)
    {
        auto const& body = v.responses[i];
        auto const parsed = parseModelTurn(body);
        if (auto const* error = std::get_if<ParseError>(&parsed.action))
        {
            v.reason = "RESPONSE" + std::to_string(i + 1) + ": " + error->message;
            return v;
        }
        if (auto const* call = std::get_if<ToolCall>(&parsed.action))
        {
            ++calls;
            if (!parsed.warnings.empty())
            {
                v.reason = "RESPONSE" + std::to_string(i + 1) + " has more than one tool call";
                return v;
            }
            if (call->name != request.tool)
            {
                v.reason = "RESPONSE" + std::to_string(i + 1) + " calls " + std::string(toString(call->name));
                return v;
            }
            if (!evidence.contains(call->imageIndex) || !used.insert(call->imageIndex).second)
            {
                v.reason = "RESPONSE" + std::to_string(i + 1) + " expands image " + std::to_string(call->imageIndex)
                           + ", which is not an unused evidence image";
                return v;
            }
        }
        else if (i + 1 != v.responses.size())
        {
            v.reason = "RESPONSE" + std::to_string(i + 1) + " answers before the last response";
            return v;
        }
        else if (std::get<FinalAnswer>(parsed.action).text.empty())
        {
            v.reason = "final response has an empty answer";
            return v;
        }
    }
    if (calls != needed)
    {
        v.reason = "expected " + std::to_string(needed) + " tool calls, found " + std::to_string(calls);
        return v;
    }
    if (v.responses.size() != needed + 1)
    {
        v.reason = "expected " + std::to_string(needed + 1) + " responses, found " + std::to_string(v.responses.size());
        return v;
    }
    v.ok = true;
    return v;
}

Trajectory assembleSyntheticTrajectory(RenderedDocument const& doc, Sample const& sample,
                                       std::vector<std::string> const& responses, TokenCounter const& counter,
                                       EpisodeConfig config)
{
    config.maxTurns = std::max(config.maxTurns, static_cast<int>(responses.size()));
    auto replay = ScriptedEndpoint(responses);
    auto t = runEpisode(doc, sample.question, config, replay, counter);
    t.sampleId = sample.id;
    t.dataset = sample.dataset;
    return t;
}

void to_json(nlohmann::json& j, SynthesisRequest const& r)
{
    j = {
        { "id", r.sampleId },
        { "messages", r.request.messages },
        { "evidence_pages", r.evidencePages },
        { "required_tool_calls", r.requiredToolCalls },
        { "tool", toString(r.tool) },
    };
}

} // namespace pagezip
