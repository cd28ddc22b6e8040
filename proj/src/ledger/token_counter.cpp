// SPDX-License-Identifier: Apache-2.0
#include <pagezip/error.hpp>
#include <pagezip/ledger/token_counter.hpp>

#include <charconv>

namespace pagezip
{

namespace
{

std::int64_t countCodepoints(std::string_view utf8)
{
    // Continuation bytes do not start a code point.
    auto n = std::int64_t { 0 };
    for (auto const c: utf8)
        n += (static_cast<unsigned char>(c) & 0xC0) != 0x80;
    return n;
}

} // namespace

CharRatioCounter::CharRatioCounter(int charsPerToken): _charsPerToken(charsPerToken)
{
    if (charsPerToken < 1)
        throw InputError("characters per token must be at least 1");
}

std::int64_t CharRatioCounter::count(std::string_view utf8) const
{
    auto const chars = countCodepoints(utf8);
    return (chars + _charsPerToken - 1) / _charsPerToken;
}

std::string CharRatioCounter::name() const
{
    return "chars/" + std::to_string(_charsPerToken);
}

std::int64_t WhitespaceCounter::count(std::string_view utf8) const
{
    auto words = std::int64_t { 0 };
    auto inWord = false;
    for (auto const c: utf8)
    {
        auto const space = c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
        if (!space && !inWord)
            ++words;
        inWord = !space;
    }
    return words;
}

std::shared_ptr<TokenCounter const> makeTokenCounter(std::string_view name)
{
    if (name.empty() || name == "default")
        return defaultTokenCounter();
    if (name == "whitespace")
        return std::make_shared<WhitespaceCounter const>();
    if (name.starts_with("chars/"))
    {
        auto const digits = name.substr(6);
        auto ratio = 0;
        auto const [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), ratio);
        if (ec == std::errc {} && end == digits.data() + digits.size() && ratio >= 1)
            return std::make_shared<CharRatioCounter const>(ratio);
    }
    throw InputError("unknown tokenizer '" + std::string(name) + "' (expected chars/N or whitespace)");
}

std::shared_ptr<TokenCounter const> defaultTokenCounter()
{
    static auto const counter = std::make_shared<CharRatioCounter const>(4);
    return counter;
}

} // namespace pagezip
