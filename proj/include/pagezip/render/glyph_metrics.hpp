// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

namespace pagezip
{

/// 8-bit coverage bitmap of one glyph, positioned relative to the pen on the baseline.
struct GlyphBitmap
{
    int width = 0;
    int height = 0;
    int offsetX = 0; // left edge relative to pen x
    int offsetY = 0; // top edge relative to baseline (negative = above)
    std::vector<std::uint8_t> coverage;
};

/// Source of horizontal advances (and optionally glyph shapes) at a pixel size.
///
/// Implementations must be deterministic and safe for concurrent const use.
class GlyphMetrics
{
  public:
    virtual ~GlyphMetrics() = default;

    /// Whether the font maps this code point to a real glyph.
    [[nodiscard]] virtual bool hasGlyph(char32_t cp) const = 0;

    /// Advance in pixels at `pixelSize` px per em. Missing glyphs report the
    /// advance of their substitute.
    [[nodiscard]] virtual double advance(char32_t cp, double pixelSize) const = 0;

    /// Ascent above the baseline in pixels.
    [[nodiscard]] virtual double ascent(double pixelSize) const = 0;

    /// Rasterized glyph; std::nullopt for blank glyphs or metrics-only sources.
    [[nodiscard]] virtual std::optional<GlyphBitmap> rasterize(char32_t cp, double pixelSize, double subpixelX) const
    {
        (void) cp;
        (void) pixelSize;
        (void) subpixelX;
        return std::nullopt;
    }
};

/// Fixed per-em advance for every glyph; whitespace may use its own width.
/// Useful for exact layout arithmetic in tests.
class FixedAdvanceMetrics final: public GlyphMetrics
{
  public:
    explicit FixedAdvanceMetrics(double emAdvance = 0.5, double spaceEmAdvance = 0.5):
        _emAdvance(emAdvance), _spaceEmAdvance(spaceEmAdvance)
    {
    }

    [[nodiscard]] bool hasGlyph(char32_t) const override { return true; }
    [[nodiscard]] double advance(char32_t cp, double pixelSize) const override
    {
        return (cp == U' ' ? _spaceEmAdvance : _emAdvance) * pixelSize;
    }
    [[nodiscard]] double ascent(double pixelSize) const override { return 0.8 * pixelSize; }

  private:
    double _emAdvance;
    double _spaceEmAdvance;
};

/// TrueType font loaded from disk. Glyphs missing from the font are drawn
/// with U+FFFD when available, otherwise '?'.
class TrueTypeFont final: public GlyphMetrics
{
  public:
    /// Throws InputError when the file is unreadable or not a TrueType font.
    explicit TrueTypeFont(std::filesystem::path const& path);
    ~TrueTypeFont() override;

    TrueTypeFont(TrueTypeFont const&) = delete;
    TrueTypeFont& operator=(TrueTypeFont const&) = delete;

    [[nodiscard]] bool hasGlyph(char32_t cp) const override;
    [[nodiscard]] double advance(char32_t cp, double pixelSize) const override;
    [[nodiscard]] double ascent(double pixelSize) const override;
    [[nodiscard]] std::optional<GlyphBitmap> rasterize(char32_t cp, double pixelSize,
                                                       double subpixelX) const override;

    [[nodiscard]] std::filesystem::path const& path() const noexcept { return _path; }

  private:
    struct Impl;
    std::filesystem::path _path;
    std::unique_ptr<Impl> _impl;
};

/// Locates the default sans font: $PAGEZIP_FONT, then common DejaVuSans paths.
[[nodiscard]] std::optional<std::filesystem::path> findDefaultFont();

/// Loads the font from `path`, or the default font when `path` is empty.
/// Throws InputError when nothing can be loaded.
[[nodiscard]] std::shared_ptr<TrueTypeFont const> loadFont(std::filesystem::path const& path = {});

} // namespace pagezip
