// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pagezip/render/encoder.hpp>
#include <pagezip/render/glyph_metrics.hpp>
#include <pagezip/render/preset.hpp>
#include <pagezip/render/raster.hpp>
#include <pagezip/text/source_text.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace pagezip
{

/// What separates a laid-out line from the next one.
enum class LineBreak
{
    Wrap,      // word wrap at whitespace
    WordSplit, // a word wider than the line was cut mid-word
    Paragraph, // source newline (or end of text)
};

struct LineLayout
{
    /// Source characters drawn on the line, first glyph to last glyph. Blank
    /// lines carry an empty span positioned at the start of the blank paragraph.
    CharSpan span;
    LineBreak breakAfter = LineBreak::Paragraph;
    bool blank = false;

    friend bool operator==(LineLayout const&, LineLayout const&) = default;
};

/// One rendered image v_k.
struct Page
{
    int index = 0; // 1-based
    int width = 0;
    int height = 0;
    CharSpan charSpan;
    std::int64_t visualTokens = 0;
    std::vector<LineLayout> lines;
    std::optional<Raster> raster;
};

/// Ordered pages of one document at one preset.
struct PageSet
{
    std::vector<Page> pages;
    RenderPreset preset;
    EncoderProfile encoder;
    std::size_t sourceCharCount = 0;

    [[nodiscard]] std::size_t pageCount() const noexcept { return pages.size(); }
    [[nodiscard]] std::int64_t totalVisualTokens() const noexcept;

    /// Page with 1-based `index`. Throws RangeError.
    [[nodiscard]] Page const& page(int index) const;
};

struct RenderOptions
{
    EncoderProfile encoder = defaultEncoder();
    /// Produce the grayscale raster for every page. Geometry-only callers
    /// (evidence tracking, token accounting) can skip it.
    bool rasterize = true;
};

/// Greedy word wrap at the preset's printable width, lines stacked at
/// fontSize * lineSpacing until the printable height is used, then a new page.
/// Source newlines force a break; consecutive blank lines collapse to one.
/// Words wider than a line are split at character granularity.
///
/// Throws InvalidDimension when the preset is invalid or has no printable
/// area while the text contains something to draw.
[[nodiscard]] PageSet renderPages(SourceText const& text, RenderPreset const& preset, GlyphMetrics const& metrics,
                                  RenderOptions const& options = {});

/// Lines that fit on one page for this preset (0 when there is no printable area).
[[nodiscard]] int linesPerPage(RenderPreset const& preset) noexcept;

/// Mean advance (px) of English prose at `pixelSize`, weighting letters by
/// their usage frequency and adding one space per average-length word.
[[nodiscard]] double meanProseAdvance(GlyphMetrics const& metrics, double pixelSize);

/// Approximate characters per page: characters per line from the mean prose
/// advance times lines per page. Degenerate presets yield 0.
[[nodiscard]] std::int64_t pageCapacityEstimate(RenderPreset const& preset, GlyphMetrics const& metrics);

/// Rebuilds text from the layout: wrapped lines join with a space, split words
/// join directly, paragraph breaks become '\n'. Equals normalizeWhitespace(text).
[[nodiscard]] std::string reflowText(PageSet const& pages, SourceText const& text);

/// Draws one page (black glyphs on white) at `scale` times the preset geometry.
[[nodiscard]] Raster rasterizePage(Page const& page, SourceText const& text, RenderPreset const& preset,
                                   GlyphMetrics const& metrics, double scale = 1.0);

} // namespace pagezip
