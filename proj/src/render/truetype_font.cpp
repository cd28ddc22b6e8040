// SPDX-License-Identifier: Apache-2.0
#include <pagezip/error.hpp>
#include <pagezip/render/glyph_metrics.hpp>

#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wunused-function"
#define STB_TRUETYPE_IMPLEMENTATION
#define STBTT_STATIC
#include <stb_truetype.h>
#pragma GCC diagnostic pop

#include <array>
#include <cstdlib>
#include <fstream>
#include <iterator>

namespace pagezip
{

struct TrueTypeFont::Impl
{
    std::vector<unsigned char> bytes;
    stbtt_fontinfo info {};
    int ascent = 0;
    int substitute = 0; // glyph index for unmapped code points

    [[nodiscard]] int glyphFor(char32_t cp) const
    {
        auto const g = stbtt_FindGlyphIndex(&info, static_cast<int>(cp));
        return g != 0 ? g : substitute;
    }

    [[nodiscard]] float scale(double pixelSize) const
    {
        return stbtt_ScaleForMappingEmToPixels(&info, static_cast<float>(pixelSize));
    }
};

TrueTypeFont::TrueTypeFont(std::filesystem::path const& path): _path(path), _impl(std::make_unique<Impl>())
{
    auto in = std::ifstream(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open font file " + path.string());
    _impl->bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());

    auto const offset = stbtt_GetFontOffsetForIndex(_impl->bytes.data(), 0);
    if (offset < 0 || !stbtt_InitFont(&_impl->info, _impl->bytes.data(), offset))
        throw InputError("not a TrueType font: " + path.string());

    auto descent = 0;
    auto lineGap = 0;
    stbtt_GetFontVMetrics(&_impl->info, &_impl->ascent, &descent, &lineGap);

    _impl->substitute = stbtt_FindGlyphIndex(&_impl->info, 0xFFFD);
    if (_impl->substitute == 0)
        _impl->substitute = stbtt_FindGlyphIndex(&_impl->info, '?');
}

TrueTypeFont::~TrueTypeFont() = default;

bool TrueTypeFont::hasGlyph(char32_t cp) const
{
    return stbtt_FindGlyphIndex(&_impl->info, static_cast<int>(cp)) != 0;
}

double TrueTypeFont::advance(char32_t cp, double pixelSize) const
{
    // Tabs and other horizontal spaces lay out as a single space.
    if (cp == U'\t' || cp == U'\r' || cp == U'\f' || cp == U'\v')
        cp = U' ';
    auto advanceWidth = 0;
    auto leftBearing = 0;
    stbtt_GetGlyphHMetrics(&_impl->info, _impl->glyphFor(cp), &advanceWidth, &leftBearing);
    return static_cast<double>(advanceWidth) * _impl->scale(pixelSize);
}

double TrueTypeFont::ascent(double pixelSize) const
{
    return static_cast<double>(_impl->ascent) * _impl->scale(pixelSize);
}

std::optional<GlyphBitmap> TrueTypeFont::rasterize(char32_t cp, double pixelSize, double subpixelX) const
{
    auto const glyph = _impl->glyphFor(cp);
    if (stbtt_IsGlyphEmpty(&_impl->info, glyph))
        return std::nullopt;

    auto const s = _impl->scale(pixelSize);
    auto x0 = 0;
    auto y0 = 0;
    auto x1 = 0;
    auto y1 = 0;
    stbtt_GetGlyphBitmapBoxSubpixel(&_impl->info, glyph, s, s, static_cast<float>(subpixelX), 0.0f, &x0, &y0, &x1, &y1);
    auto bitmap = GlyphBitmap { .width = x1 - x0, .height = y1 - y0, .offsetX = x0, .offsetY = y0, .coverage = {} };
    if (bitmap.width <= 0 || bitmap.height <= 0)
        return std::nullopt;
    bitmap.coverage.assign(static_cast<std::size_t>(bitmap.width) * static_cast<std::size_t>(bitmap.height), 0);
    stbtt_MakeGlyphBitmapSubpixel(&_impl->info, bitmap.coverage.data(), bitmap.width, bitmap.height, bitmap.width, s,
                                  s, static_cast<float>(subpixelX), 0.0f, glyph);
    return bitmap;
}

std::optional<std::filesystem::path> findDefaultFont()
{
    if (auto const* env = std::getenv("PAGEZIP_FONT"); env && *env)
        return std::filesystem::path(env);

    static constexpr auto candidates = std::array {
        "/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf",
        "/usr/share/fonts/dejavu/DejaVuSans.ttf",
        "/usr/share/fonts/TTF/DejaVuSans.ttf",
        "/Library/Fonts/DejaVuSans.ttf",
    };
    for (auto const* candidate: candidates)
        if (std::filesystem::exists(candidate))
            return std::filesystem::path(candidate);
    return std::nullopt;
}

std::shared_ptr<TrueTypeFont const> loadFont(std::filesystem::path const& path)
{
    if (!path.empty())
        return std::make_shared<TrueTypeFont const>(path);
    auto const found = findDefaultFont();
    if (!found)
        throw InputError("no font configured and DejaVuSans.ttf not found; set PAGEZIP_FONT");
    return std::make_shared<TrueTypeFont const>(*found);
}

} // namespace pagezip
