// SPDX-License-Identifier: Apache-2.0
#include <pagezip/error.hpp>
#include <pagezip/protocol/endpoints.hpp>
#include <pagezip/text/source_text.hpp>

#include <charconv>
#include <fstream>
#include <map>

namespace pagezip
{

namespace
{

std::string toolCallText(std::string const& toolName, int image)
{
    return "<tool_call>{\"name\": \"" + toolName + "\", \"arguments\": {\"image\": " + std::to_string(image)
           + "}}</tool_call>";
}

class FixedReplyEndpoint final: public ChatEndpoint
{
  public:
    explicit FixedReplyEndpoint(std::string reply): _reply(std::move(reply)) {}
    std::string complete(ChatRequest const&) override { return _reply; }

  private:
    std::string _reply;
};

class FixedOcrEndpoint final: public OcrEndpoint
{
  public:
    explicit FixedOcrEndpoint(std::string text): _text(std::move(text)) {}
    std::string recognize(std::string const&) override { return _text; }

  private:
    std::string _text;
};

std::string_view between(std::string_view text, std::string_view open, std::string_view close, bool lastClose)
{
    auto const begin = text.find(open);
    if (begin == std::string_view::npos)
        return {};
    auto const from = begin + open.size();
    auto const end = lastClose ? text.rfind(close) : text.find(close, from);
    if (end == std::string_view::npos || end < from)
        return {};
    return text.substr(from, end - from);
}

// Script file: {"sample id": [replies], "*": [fallback replies]}.
std::shared_ptr<std::map<std::string, std::vector<std::string>> const> loadScript(std::string const& path)
{
    auto in = std::ifstream(path);
    if (!in)
        throw InputError("cannot read mock script '" + path + "'");
    auto const j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw InputError("mock script '" + path + "' must be a JSON object of reply lists");
    auto script = std::make_shared<std::map<std::string, std::vector<std::string>>>();
    for (auto const& [id, replies]: j.items())
    {
        if (!replies.is_array())
            throw InputError("mock script entry '" + id + "' must be an array of strings");
        for (auto const& r: replies)
        {
            if (!r.is_string())
                throw InputError("mock script entry '" + id + "' must be an array of strings");
            (*script)[id].push_back(r.get<std::string>());
        }
    }
    return script;
}

} // namespace

ScriptedEndpoint::ScriptedEndpoint(std::vector<std::string> replies): _replies(std::move(replies))
{
}

std::string ScriptedEndpoint::complete(ChatRequest const& request)
{
    _requests.push_back(request);
    if (_next >= _replies.size())
        throw EndpointError("scripted endpoint has no reply left for call " + std::to_string(_next + 1));
    return _replies[_next++];
}

AlwaysExpandEndpoint::AlwaysExpandEndpoint(std::string toolName, int pageCount):
    _toolName(std::move(toolName)), _pageCount(std::max(pageCount, 1))
{
}

std::string AlwaysExpandEndpoint::complete(ChatRequest const&)
{
    auto const image = _turn % _pageCount + 1;
    ++_turn;
    return "<think>Image " + std::to_string(image) + " may hold the answer.</think>\n" + toolCallText(_toolName, image);
}

OracleEndpoint::OracleEndpoint(std::string toolName, EpisodeContext context):
    _toolName(std::move(toolName)), _context(std::move(context))
{
}

std::string OracleEndpoint::complete(ChatRequest const&)
{
    auto const turn = _turn++;
    if (turn < _context.evidencePages.size())
    {
        auto const image = _context.evidencePages[turn];
        return "<think>Image " + std::to_string(image) + " looks relevant.</think>\n" + toolCallText(_toolName, image);
    }
    auto const answer = _context.goldAnswers.empty() ? std::string("unknown") : _context.goldAnswers.front();
    return "<think>The expanded text names it.</think>\n" + answer;
}

std::string ExactMatchJudge::complete(ChatRequest const& request)
{
    if (request.messages.empty())
        return "[[NO]]";
    auto const prompt = request.messages.back().text();
    auto const gold = between(prompt, "[GOLD ANSWERS]\n", "\n[/GOLD ANSWERS]", false);
    auto const answerStart = prompt.find("[/GOLD ANSWERS]");
    auto const model = answerStart == std::string::npos
                           ? std::string_view {}
                           : between(std::string_view(prompt).substr(answerStart), "[MODEL ANSWER]\n", "\n[/MODEL ANSWER]", true);
    if (model.empty())
        return "[[NO]]";
    auto rest = gold;
    while (!rest.empty())
    {
        auto const nl = rest.find('\n');
        auto const line = rest.substr(0, nl);
        if (!line.empty() && containsFolded(model, line))
            return "[[YES]]";
        if (nl == std::string_view::npos)
            break;
        rest.remove_prefix(nl + 1);
    }
    return "[[NO]]";
}

std::string FailingEndpoint::complete(ChatRequest const&)
{
    throw EndpointError("mock endpoint failure (HTTP " + std::to_string(_status) + ")", _status);
}

ChatEndpointFactory makeChatEndpointFactory(EndpointDescriptor const& descriptor, std::string const& toolName)
{
    auto const& url = descriptor.url;
    if (!url.starts_with("mock:"))
    {
        (void) HttpChatEndpoint(descriptor); // validates the url now rather than per episode
        return [descriptor](EpisodeContext const&) { return std::make_unique<HttpChatEndpoint>(descriptor); };
    }

    auto const rest = std::string_view(url).substr(5);
    auto const colon = rest.find(':');
    auto const name = std::string(rest.substr(0, colon));
    auto const arg = colon == std::string_view::npos ? std::string {} : std::string(rest.substr(colon + 1));

    if (name == "answer")
    {
        auto const text = arg.empty() ? std::string("unknown") : arg;
        return [text](EpisodeContext const&) { return std::make_unique<FixedReplyEndpoint>("<think>Answering directly.</think>\n" + text); };
    }
    if (name == "always_expand")
        return [toolName](EpisodeContext const& c) { return std::make_unique<AlwaysExpandEndpoint>(toolName, c.pageCount); };
    if (name == "oracle")
        return [toolName](EpisodeContext const& c) { return std::make_unique<OracleEndpoint>(toolName, c); };
    if (name == "reply")
        return [arg](EpisodeContext const&) { return std::make_unique<FixedReplyEndpoint>(arg); };
    if (name == "exact_match")
        return [](EpisodeContext const&) { return std::make_unique<ExactMatchJudge>(); };
    if (name == "fail")
    {
        auto status = 0;
        auto const [end, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), status);
        if (ec != std::errc {} || end != arg.data() + arg.size())
            throw InputError("mock:fail needs an HTTP status, got '" + arg + "'");
        return [status](EpisodeContext const&) { return std::make_unique<FailingEndpoint>(status); };
    }
    if (name == "script")
    {
        auto const script = loadScript(arg);
        return [script](EpisodeContext const& c) {
            auto it = script->find(c.sampleId);
            if (it == script->end())
                it = script->find("*");
            return std::make_unique<ScriptedEndpoint>(it == script->end() ? std::vector<std::string> {} : it->second);
        };
    }
    throw InputError("unknown mock endpoint '" + url + "'");
}

OcrEndpointFactory makeOcrEndpointFactory(EndpointDescriptor const& descriptor)
{
    if (descriptor.url.starts_with("mock:text:"))
    {
        auto const text = descriptor.url.substr(10);
        return [text] { return std::make_unique<FixedOcrEndpoint>(text); };
    }
    if (descriptor.url.starts_with("mock:"))
        throw InputError("unknown mock OCR endpoint '" + descriptor.url + "'");
    (void) HttpOcrEndpoint(descriptor);
    return [descriptor] { return std::make_unique<HttpOcrEndpoint>(descriptor); };
}

} // namespace pagezip
