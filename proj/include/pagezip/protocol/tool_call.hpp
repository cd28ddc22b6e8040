// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pagezip
{

enum class ToolName
{
    ReadText,
    ZoomIn,
};

[[nodiscard]] std::string_view toString(ToolName name) noexcept;

struct ToolCall
{
    ToolName name = ToolName::ReadText;
    int imageIndex = 1; // 1-based

    friend bool operator==(ToolCall const&, ToolCall const&) = default;
};

struct FinalAnswer
{
    std::string text;

    friend bool operator==(FinalAnswer const&, FinalAnswer const&) = default;
};

struct ParseError
{
    std::string message;
    std::string offending; // the malformed tool_call block, tags included

    friend bool operator==(ParseError const&, ParseError const&) = default;
};

using TurnAction = std::variant<ToolCall, FinalAnswer, ParseError>;

struct ParsedTurn
{
    TurnAction action;
    std::string reasoning;             // contents of the think blocks, verbatim
    std::vector<std::string> warnings; // e.g. ignored extra tool_call blocks
};

/// Classifies one model reply. The first well-formed tool_call block wins.
/// Without any tool_call tag the reply is a final answer. Never throws.
[[nodiscard]] ParsedTurn parseModelTurn(std::string_view reply);

/// Canonical wire form: <tool_call>{"name": "read_text", "arguments": {"image": 22}}</tool_call>
[[nodiscard]] std::string serialize(ToolCall const& call);

/// Text after the last </think>, trimmed. A reply that is all reasoning is
/// returned whole (trimmed). Tool call blocks are removed first.
[[nodiscard]] std::string extractAnswerText(std::string_view reply);

} // namespace pagezip
