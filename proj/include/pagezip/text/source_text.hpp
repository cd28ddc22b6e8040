// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pagezip
{

/// Half-open character interval [begin, end) measured in Unicode code points.
struct CharSpan
{
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] constexpr std::size_t length() const noexcept { return end - begin; }
    [[nodiscard]] constexpr bool empty() const noexcept { return end <= begin; }
    [[nodiscard]] constexpr bool intersects(CharSpan other) const noexcept
    {
        return begin < other.end && other.begin < end;
    }
    [[nodiscard]] constexpr bool contains(std::size_t pos) const noexcept { return pos >= begin && pos < end; }

    friend constexpr bool operator==(CharSpan, CharSpan) = default;
};

/// UTF-8 text addressable by code point index.
///
/// Character spans throughout the project count code points, which matches the
/// offsets produced by Python-based dataset tooling. Invalid UTF-8 bytes decode
/// to U+FFFD one byte at a time, so every input has a well-defined length.
class SourceText
{
  public:
    SourceText() = default;
    explicit SourceText(std::string utf8);

    [[nodiscard]] std::string const& utf8() const noexcept { return _utf8; }
    [[nodiscard]] std::u32string const& codepoints() const noexcept { return _codepoints; }
    [[nodiscard]] std::size_t size() const noexcept { return _codepoints.size(); }
    [[nodiscard]] bool empty() const noexcept { return _codepoints.empty(); }
    [[nodiscard]] char32_t operator[](std::size_t i) const { return _codepoints[i]; }

    /// UTF-8 bytes of the code point interval. Throws RangeError when out of bounds.
    [[nodiscard]] std::string_view slice(CharSpan span) const;

    /// Byte offset of code point `index` (index == size() maps to the end).
    [[nodiscard]] std::size_t byteOffset(std::size_t index) const;

  private:
    std::string _utf8;
    std::u32string _codepoints;
    std::vector<std::size_t> _byteOffsets; // size() + 1 entries
};

[[nodiscard]] std::u32string decodeUtf8(std::string_view utf8);
[[nodiscard]] std::string encodeUtf8(std::u32string_view text);
void appendUtf8(std::string& out, char32_t cp);

/// Horizontal whitespace: space, tab, carriage return, form feed, vertical tab, NBSP.
[[nodiscard]] bool isHorizontalSpace(char32_t cp) noexcept;

/// Canonical paragraph form of a text: horizontal whitespace runs become a
/// single space, lines are trimmed, runs of blank lines collapse to one, and
/// leading/trailing blank lines are dropped. Paragraphs are joined with '\n'.
[[nodiscard]] std::string normalizeWhitespace(std::string_view utf8);

/// ASCII case folding; non-ASCII code points are left untouched.
[[nodiscard]] std::string foldCase(std::string_view utf8);

/// Case-insensitive substring test used for gold-answer matching.
[[nodiscard]] bool containsFolded(std::string_view haystack, std::string_view needle);

} // namespace pagezip
