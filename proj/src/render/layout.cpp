// SPDX-License-Identifier: Apache-2.0
#include <pagezip/error.hpp>
#include <pagezip/render/layout.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace pagezip
{

namespace
{

constexpr double Epsilon = 1e-9;

struct LineBuilder
{
    std::vector<LineLayout>& lines;
    bool open = false;
    CharSpan span;
    double width = 0;

    void start(std::size_t begin, std::size_t end, double w)
    {
        open = true;
        span = { begin, end };
        width = w;
    }

    void emit(LineBreak brk)
    {
        if (!open)
            return;
        lines.push_back(LineLayout { .span = span, .breakAfter = brk, .blank = false });
        open = false;
        width = 0;
    }
};

// Lays out one paragraph [begin, end) that contains at least one non-space character.
void wrapParagraph(std::u32string const& cps, std::size_t begin, std::size_t end, double maxWidth,
                   RenderPreset const& preset, GlyphMetrics const& metrics, std::vector<LineLayout>& lines)
{
    auto const spaceAdvance = metrics.advance(U' ', preset.fontSize);
    auto line = LineBuilder { .lines = lines, .open = false, .span = {}, .width = 0 };

    auto pos = begin;
    while (pos < end)
    {
        while (pos < end && isHorizontalSpace(cps[pos]))
            ++pos;
        if (pos >= end)
            break;
        auto const wordBegin = pos;
        auto wordWidth = 0.0;
        while (pos < end && !isHorizontalSpace(cps[pos]))
            wordWidth += metrics.advance(cps[pos++], preset.fontSize);
        auto const wordEnd = pos;

        if (line.open)
        {
            if (line.width + spaceAdvance + wordWidth <= maxWidth + Epsilon)
            {
                line.span.end = wordEnd;
                line.width += spaceAdvance + wordWidth;
                continue;
            }
            line.emit(LineBreak::Wrap);
        }

        if (wordWidth <= maxWidth + Epsilon)
        {
            line.start(wordBegin, wordEnd, wordWidth);
            continue;
        }

        // Hard break: as many characters as fit, at least one per line.
        auto fragmentBegin = wordBegin;
        auto fragmentWidth = 0.0;
        for (auto i = wordBegin; i < wordEnd; ++i)
        {
            auto const adv = metrics.advance(cps[i], preset.fontSize);
            if (i > fragmentBegin && fragmentWidth + adv > maxWidth + Epsilon)
            {
                line.start(fragmentBegin, i, fragmentWidth);
                line.emit(LineBreak::WordSplit);
                fragmentBegin = i;
                fragmentWidth = 0;
            }
            fragmentWidth += adv;
        }
        line.start(fragmentBegin, wordEnd, fragmentWidth);
    }
    line.emit(LineBreak::Paragraph);
}

std::vector<LineLayout> layoutLines(std::u32string const& cps, RenderPreset const& preset, GlyphMetrics const& metrics)
{
    auto lines = std::vector<LineLayout> {};
    auto const maxWidth = static_cast<double>(preset.usableWidth());
    auto hasPendingBlank = false;
    auto pendingBlank = std::size_t { 0 };

    auto begin = std::size_t { 0 };
    while (begin <= cps.size())
    {
        auto end = begin;
        while (end < cps.size() && cps[end] != U'\n')
            ++end;

        auto const hasInk = std::any_of(cps.begin() + static_cast<std::ptrdiff_t>(begin),
                                        cps.begin() + static_cast<std::ptrdiff_t>(end),
                                        [](char32_t c) { return !isHorizontalSpace(c); });
        if (!hasInk)
        {
            if (!lines.empty() && !hasPendingBlank)
            {
                hasPendingBlank = true;
                pendingBlank = begin;
            }
        }
        else
        {
            if (hasPendingBlank)
            {
                lines.push_back(LineLayout { .span = { pendingBlank, pendingBlank },
                                             .breakAfter = LineBreak::Paragraph,
                                             .blank = true });
                hasPendingBlank = false;
            }
            wrapParagraph(cps, begin, end, maxWidth, preset, metrics, lines);
        }

        if (end >= cps.size())
            break;
        begin = end + 1;
    }
    return lines;
}

// Horizontal position of every glyph; whitespace runs collapse to one space.
template <typename Visit>
void walkLine(std::u32string const& cps, LineLayout const& line, double fontSize, GlyphMetrics const& metrics,
              Visit&& visit)
{
    auto x = 0.0;
    auto inSpace = false;
    for (auto i = line.span.begin; i < line.span.end; ++i)
    {
        auto const cp = cps[i];
        if (isHorizontalSpace(cp))
        {
            if (!inSpace)
                x += metrics.advance(U' ', fontSize);
            inSpace = true;
            continue;
        }
        inSpace = false;
        visit(cp, x);
        x += metrics.advance(cp, fontSize);
    }
}

// Frequency (percent) of a..z in English prose.
constexpr std::array<double, 26> LetterFrequency = {
    8.167, 1.492, 2.782, 4.253, 12.702, 2.228, 2.015, 6.094, 6.966, 0.153, 0.772, 4.025, 2.406,
    6.749, 7.507, 1.929, 0.095, 5.987,  6.327, 9.056, 2.758, 0.978, 2.360, 0.150, 1.974, 0.074,
};
constexpr double MeanWordLength = 4.7;

} // namespace

std::int64_t PageSet::totalVisualTokens() const noexcept
{
    auto total = std::int64_t { 0 };
    for (auto const& p: pages)
        total += p.visualTokens;
    return total;
}

Page const& PageSet::page(int index) const
{
    if (index < 1 || static_cast<std::size_t>(index) > pages.size())
        throw RangeError("page index " + std::to_string(index) + " outside [1, " + std::to_string(pages.size()) + "]");
    return pages[static_cast<std::size_t>(index) - 1];
}

int linesPerPage(RenderPreset const& preset) noexcept
{
    if (preset.usableWidth() <= 0 || preset.usableHeight() <= 0 || !(preset.linePitch() > 0))
        return 0;
    return static_cast<int>(std::floor(preset.usableHeight() / preset.linePitch() + Epsilon));
}

PageSet renderPages(SourceText const& text, RenderPreset const& preset, GlyphMetrics const& metrics,
                    RenderOptions const& options)
{
    validate(preset);

    auto result = PageSet { .pages = {}, .preset = preset, .encoder = options.encoder, .sourceCharCount = text.size() };
    auto const& cps = text.codepoints();
    auto const perPage = linesPerPage(preset);

    auto const anyInk = std::any_of(cps.begin(), cps.end(), [](char32_t c) { return c != U'\n' && !isHorizontalSpace(c); });
    if (!anyInk)
        return result;
    if (perPage == 0)
        throw InvalidDimension("preset '" + preset.name + "' has no printable area");

    auto lines = layoutLines(cps, preset, metrics);
    auto const tokens = computeVisualTokens(preset.pageWidth, preset.pageHeight, options.encoder);

    for (auto first = std::size_t { 0 }; first < lines.size(); first += static_cast<std::size_t>(perPage))
    {
        auto const last = std::min(lines.size(), first + static_cast<std::size_t>(perPage));
        auto page = Page {};
        page.index = static_cast<int>(result.pages.size()) + 1;
        page.width = preset.pageWidth;
        page.height = preset.pageHeight;
        page.visualTokens = tokens;
        page.lines.assign(lines.begin() + static_cast<std::ptrdiff_t>(first),
                          lines.begin() + static_cast<std::ptrdiff_t>(last));
        page.charSpan.begin = result.pages.empty() ? 0 : page.lines.front().span.begin;
        result.pages.push_back(std::move(page));
    }
    for (auto i = std::size_t { 0 }; i < result.pages.size(); ++i)
        result.pages[i].charSpan.end =
            i + 1 < result.pages.size() ? result.pages[i + 1].charSpan.begin : text.size();

    if (options.rasterize)
        for (auto& page: result.pages)
            page.raster = rasterizePage(page, text, preset, metrics);

    return result;
}

double meanProseAdvance(GlyphMetrics const& metrics, double pixelSize)
{
    auto weighted = 0.0;
    auto total = 0.0;
    for (auto i = std::size_t { 0 }; i < LetterFrequency.size(); ++i)
    {
        weighted += LetterFrequency[i] * metrics.advance(static_cast<char32_t>(U'a' + i), pixelSize);
        total += LetterFrequency[i];
    }
    auto const letter = weighted / total;
    return (letter * MeanWordLength + metrics.advance(U' ', pixelSize)) / (MeanWordLength + 1.0);
}

std::int64_t pageCapacityEstimate(RenderPreset const& preset, GlyphMetrics const& metrics)
{
    auto const lines = linesPerPage(preset);
    if (lines == 0 || !(preset.fontSize > 0))
        return 0;
    auto const perLine = std::floor(preset.usableWidth() / meanProseAdvance(metrics, preset.fontSize) + Epsilon);
    return static_cast<std::int64_t>(perLine) * lines;
}

std::string reflowText(PageSet const& pages, SourceText const& text)
{
    auto out = std::string {};
    auto previous = std::optional<LineBreak> {};
    for (auto const& page: pages.pages)
    {
        for (auto const& line: page.lines)
        {
            if (previous)
            {
                if (*previous == LineBreak::Wrap)
                    out.push_back(' ');
                else if (*previous == LineBreak::Paragraph)
                    out.push_back('\n');
            }
            auto inSpace = false;
            for (auto i = line.span.begin; i < line.span.end; ++i)
            {
                if (isHorizontalSpace(text[i]))
                {
                    if (!inSpace)
                        out.push_back(' ');
                    inSpace = true;
                    continue;
                }
                inSpace = false;
                appendUtf8(out, text[i]);
            }
            previous = line.breakAfter;
        }
    }
    return out;
}

Raster rasterizePage(Page const& page, SourceText const& text, RenderPreset const& preset, GlyphMetrics const& metrics,
                     double scale)
{
    if (!(scale > 0))
        throw InvalidDimension("render scale must be positive");
    auto const width = std::max(1, static_cast<int>(std::lround(page.width * scale)));
    auto const height = std::max(1, static_cast<int>(std::lround(page.height * scale)));
    auto raster = Raster(width, height);

    auto const fontSize = preset.fontSize * scale;
    auto const pitch = preset.linePitch() * scale;
    auto const margin = preset.margin * scale;
    auto const ascent = metrics.ascent(fontSize);

    for (auto row = std::size_t { 0 }; row < page.lines.size(); ++row)
    {
        auto const& line = page.lines[row];
        if (line.blank)
            continue;
        auto const baseline = static_cast<int>(std::lround(margin + static_cast<double>(row) * pitch + ascent));
        walkLine(text.codepoints(), line, fontSize, metrics, [&](char32_t cp, double x) {
            auto const penX = margin + x;
            auto const whole = std::floor(penX);
            auto const glyph = metrics.rasterize(cp, fontSize, penX - whole);
            if (!glyph)
                return;
            auto const left = static_cast<int>(whole) + glyph->offsetX;
            auto const top = baseline + glyph->offsetY;
            for (auto gy = 0; gy < glyph->height; ++gy)
            {
                auto const y = top + gy;
                if (y < 0 || y >= height)
                    continue;
                for (auto gx = 0; gx < glyph->width; ++gx)
                {
                    auto const x = left + gx;
                    if (x < 0 || x >= width)
                        continue;
                    auto const cover = glyph->coverage[static_cast<std::size_t>(gy) * glyph->width + gx];
                    auto& px = raster.at(x, y);
                    px = std::min<std::uint8_t>(px, static_cast<std::uint8_t>(255 - cover));
                }
            }
        });
    }
    return raster;
}

} // namespace pagezip
