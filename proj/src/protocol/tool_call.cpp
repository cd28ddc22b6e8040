// SPDX-License-Identifier: Apache-2.0
#include <pagezip/protocol/tool_call.hpp>

#include <json.hpp>

namespace pagezip
{

namespace
{

constexpr std::string_view OpenTag = "<tool_call>";
constexpr std::string_view CloseTag = "</tool_call>";
constexpr std::string_view ThinkOpen = "<think>";
constexpr std::string_view ThinkClose = "</think>";

std::string_view trim(std::string_view s)
{
    auto const isSpace = [](char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; };
    while (!s.empty() && isSpace(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && isSpace(s.back()))
        s.remove_suffix(1);
    return s;
}

struct Block
{
    std::string_view whole; // tags included
    std::string_view body;
    bool terminated = true;
};

std::vector<Block> findBlocks(std::string_view reply)
{
    auto blocks = std::vector<Block> {};
    auto pos = reply.find(OpenTag);
    while (pos != std::string_view::npos)
    {
        auto const bodyBegin = pos + OpenTag.size();
        auto const close = reply.find(CloseTag, bodyBegin);
        if (close == std::string_view::npos)
        {
            blocks.push_back({ reply.substr(pos), reply.substr(bodyBegin), false });
            break;
        }
        blocks.push_back({ reply.substr(pos, close + CloseTag.size() - pos), reply.substr(bodyBegin, close - bodyBegin), true });
        pos = reply.find(OpenTag, close + CloseTag.size());
    }
    return blocks;
}

// Returns the call, or an explanation of what is wrong with the body.
std::variant<ToolCall, std::string> decodeBody(Block const& block)
{
    if (!block.terminated)
        return std::string("unterminated tool_call block");
    auto const j = nlohmann::json::parse(block.body, nullptr, false);
    if (j.is_discarded())
        return std::string("tool_call body is not valid JSON");
    if (!j.is_object())
        return std::string("tool_call body must be a JSON object");
    auto const name = j.find("name");
    if (name == j.end() || !name->is_string())
        return std::string("tool_call is missing a string \"name\"");
    auto call = ToolCall {};
    if (*name == "read_text")
        call.name = ToolName::ReadText;
    else if (*name == "zoom_in")
        call.name = ToolName::ZoomIn;
    else
        return "unknown tool \"" + name->get<std::string>() + "\"";
    auto const args = j.find("arguments");
    if (args == j.end() || !args->is_object())
        return std::string("tool_call is missing an \"arguments\" object");
    auto const image = args->find("image");
    if (image == args->end() || !(image->is_number_integer()))
        return std::string("arguments.image must be an integer");
    auto const value = image->get<long long>();
    if (value < 1 || value > 1'000'000'000)
        return std::string("arguments.image must be a positive image number");
    call.imageIndex = static_cast<int>(value);
    return call;
}

std::string collectReasoning(std::string_view reply)
{
    auto out = std::string {};
    auto pos = std::size_t { 0 };
    while (true)
    {
        auto const close = reply.find(ThinkClose, pos);
        if (close == std::string_view::npos)
            break;
        // A leading </think> without an opener counts from the start (chat
        // templates often put the opener in the prompt).
        auto const open = reply.rfind(ThinkOpen, close);
        auto const begin = open != std::string_view::npos && open >= pos ? open + ThinkOpen.size() : pos;
        if (!out.empty())
            out += '\n';
        out.append(reply.substr(begin, close - begin));
        pos = close + ThinkClose.size();
    }
    return out;
}

} // namespace

std::string_view toString(ToolName name) noexcept
{
    return name == ToolName::ZoomIn ? "zoom_in" : "read_text";
}

ParsedTurn parseModelTurn(std::string_view reply)
{
    auto result = ParsedTurn { .action = FinalAnswer {}, .reasoning = collectReasoning(reply), .warnings = {} };
    auto const blocks = findBlocks(reply);
    auto const strayClose = blocks.empty() && reply.find(CloseTag) != std::string_view::npos;

    auto chosen = std::optional<ToolCall> {};
    auto firstError = std::optional<ParseError> {};
    for (auto const& block: blocks)
    {
        auto decoded = decodeBody(block);
        if (auto const* call = std::get_if<ToolCall>(&decoded))
        {
            if (chosen)
                result.warnings.push_back("ignored extra tool_call block: " + std::string(block.whole));
            else
                chosen = *call;
        }
        else
        {
            auto const& message = std::get<std::string>(decoded);
            if (!firstError)
                firstError = ParseError { .message = message, .offending = std::string(block.whole) };
            result.warnings.push_back("malformed tool_call block (" + message + ")");
        }
    }

    if (chosen)
    {
        if (firstError)
            result.warnings.insert(result.warnings.begin(),
                                   "using the first well-formed tool_call after a malformed one");
        result.action = *chosen;
    }
    else if (firstError)
        result.action = *firstError;
    else if (strayClose)
        result.action = ParseError { .message = "closing tool_call tag without an opening tag",
                                     .offending = std::string(reply.substr(reply.find(CloseTag))) };
    else
        result.action = FinalAnswer { extractAnswerText(reply) };
    return result;
}

std::string serialize(ToolCall const& call)
{
    return std::string(OpenTag) + R"({"name": ")" + std::string(toString(call.name)) + R"(", "arguments": {"image": )"
           + std::to_string(call.imageIndex) + "}}" + std::string(CloseTag);
}

std::string extractAnswerText(std::string_view reply)
{
    auto stripped = std::string {};
    auto pos = std::size_t { 0 };
    for (auto const& block: findBlocks(reply))
    {
        auto const at = static_cast<std::size_t>(block.whole.data() - reply.data());
        stripped.append(reply.substr(pos, at - pos));
        pos = at + block.whole.size();
    }
    stripped.append(reply.substr(std::min(pos, reply.size())));

    auto const view = std::string_view(stripped);
    auto const close = view.rfind(ThinkClose);
    if (close != std::string_view::npos)
    {
        auto const after = trim(view.substr(close + ThinkClose.size()));
        if (!after.empty())
            return std::string(after);
    }
    return std::string(trim(view));
}

} // namespace pagezip
