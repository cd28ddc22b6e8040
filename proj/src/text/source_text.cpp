// SPDX-License-Identifier: Apache-2.0
#include <pagezip/error.hpp>
#include <pagezip/text/source_text.hpp>

#include <algorithm>
#include <cctype>

namespace pagezip
{

namespace
{

constexpr char32_t Replacement = 0xFFFD;

// Decodes one code point starting at `pos`; returns bytes consumed.
std::size_t decodeOne(std::string_view s, std::size_t pos, char32_t& out)
{
    auto const b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80)
    {
        out = b0;
        return 1;
    }

    auto need = std::size_t { 0 };
    auto cp = char32_t { 0 };
    if ((b0 & 0xE0) == 0xC0)
    {
        need = 1;
        cp = b0 & 0x1F;
    }
    else if ((b0 & 0xF0) == 0xE0)
    {
        need = 2;
        cp = b0 & 0x0F;
    }
    else if ((b0 & 0xF8) == 0xF0)
    {
        need = 3;
        cp = b0 & 0x07;
    }
    else
    {
        out = Replacement;
        return 1;
    }

    if (pos + need >= s.size())
    {
        out = Replacement;
        return 1;
    }
    for (auto i = std::size_t { 1 }; i <= need; ++i)
    {
        auto const b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80)
        {
            out = Replacement;
            return 1;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range values.
    static constexpr char32_t minimum[] = { 0, 0x80, 0x800, 0x10000 };
    if (cp < minimum[need] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
    {
        out = Replacement;
        return 1;
    }
    out = cp;
    return need + 1;
}

} // namespace

SourceText::SourceText(std::string utf8): _utf8(std::move(utf8))
{
    _codepoints.reserve(_utf8.size());
    _byteOffsets.reserve(_utf8.size() + 1);
    auto pos = std::size_t { 0 };
    while (pos < _utf8.size())
    {
        auto cp = char32_t { 0 };
        _byteOffsets.push_back(pos);
        pos += decodeOne(_utf8, pos, cp);
        _codepoints.push_back(cp);
    }
    _byteOffsets.push_back(_utf8.size());
}

std::string_view SourceText::slice(CharSpan span) const
{
    if (span.begin > span.end || span.end > size())
        throw RangeError("character span [" + std::to_string(span.begin) + ", " + std::to_string(span.end)
                         + ") outside text of length " + std::to_string(size()));
    auto const from = byteOffset(span.begin);
    auto const to = byteOffset(span.end);
    return std::string_view(_utf8).substr(from, to - from);
}

std::size_t SourceText::byteOffset(std::size_t index) const
{
    if (_byteOffsets.empty())
        return 0;
    if (index >= _byteOffsets.size())
        throw RangeError("code point index " + std::to_string(index) + " out of range");
    return _byteOffsets[index];
}

std::u32string decodeUtf8(std::string_view utf8)
{
    auto out = std::u32string {};
    out.reserve(utf8.size());
    auto pos = std::size_t { 0 };
    while (pos < utf8.size())
    {
        auto cp = char32_t { 0 };
        pos += decodeOne(utf8, pos, cp);
        out.push_back(cp);
    }
    return out;
}

void appendUtf8(std::string& out, char32_t cp)
{
    if (cp < 0x80)
        out.push_back(static_cast<char>(cp));
    else if (cp < 0x800)
    {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    else if (cp < 0x10000)
    {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    else
    {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encodeUtf8(std::u32string_view text)
{
    auto out = std::string {};
    out.reserve(text.size());
    for (auto const cp: text)
        appendUtf8(out, cp);
    return out;
}

bool isHorizontalSpace(char32_t cp) noexcept
{
    return cp == U' ' || cp == U'\t' || cp == U'\r' || cp == U'\f' || cp == U'\v' || cp == 0xA0;
}

std::string normalizeWhitespace(std::string_view utf8)
{
    auto const text = decodeUtf8(utf8);
    auto paragraphs = std::vector<std::u32string> {};
    auto current = std::u32string {};
    auto pendingSpace = false;

    auto flush = [&] {
        paragraphs.push_back(std::move(current));
        current.clear();
        pendingSpace = false;
    };

    for (auto const cp: text)
    {
        if (cp == U'\n')
            flush();
        else if (isHorizontalSpace(cp))
            pendingSpace = !current.empty();
        else
        {
            if (pendingSpace)
                current.push_back(U' ');
            pendingSpace = false;
            current.push_back(cp);
        }
    }
    flush();

    auto out = std::u32string {};
    auto previousBlank = true; // suppresses leading blank lines
    auto pendingBlank = false;
    for (auto const& p: paragraphs)
    {
        if (p.empty())
        {
            if (!previousBlank)
                pendingBlank = true;
            previousBlank = true;
            continue;
        }
        if (!out.empty())
        {
            out.push_back(U'\n');
            if (pendingBlank)
                out.push_back(U'\n');
        }
        pendingBlank = false;
        previousBlank = false;
        out += p;
    }
    return encodeUtf8(out);
}

std::string foldCase(std::string_view utf8)
{
    auto out = std::string(utf8);
    std::transform(out.begin(), out.end(), out.begin(), [](char c) {
        auto const u = static_cast<unsigned char>(c);
        return u < 0x80 ? static_cast<char>(std::tolower(u)) : c;
    });
    return out;
}

bool containsFolded(std::string_view haystack, std::string_view needle)
{
    if (needle.empty())
        return true;
    return foldCase(haystack).find(foldCase(needle)) != std::string::npos;
}

} // namespace pagezip
