// SPDX-License-Identifier: Apache-2.0
#include "../support/font.hpp"
#include "../support/prose.hpp"

#include <pagezip/error.hpp>
#include <pagezip/render/encoder.hpp>
#include <pagezip/render/layout.hpp>
#include <pagezip/render/manifest.hpp>
#include <pagezip/render/preset.hpp>

#include <doctest.h>

#include <filesystem>
#include <random>

using namespace pagezip;

namespace
{

// 64 px printable width, 10 px em, 5 px per glyph: 12 glyphs per line, 4 lines per page.
RenderPreset tinyPreset()
{
    return RenderPreset { .name = "tiny",
                          .pageWidth = 64,
                          .pageHeight = 40,
                          .fontSize = 10,
                          .lineSpacing = 1.0,
                          .margin = 0,
                          .nominalTokensPerPage = 0 };
}

std::vector<std::string> lineTexts(PageSet const& pages, SourceText const& text)
{
    auto out = std::vector<std::string> {};
    for (auto const& page: pages.pages)
        for (auto const& line: page.lines)
            out.emplace_back(text.slice(line.span));
    return out;
}

// Random text over a small alphabet with spaces, tabs, newlines and long words.
std::string randomText(std::mt19937_64& rng)
{
    auto length = std::uniform_int_distribution<int>(0, 600)(rng);
    auto kind = std::uniform_int_distribution<int>(0, 19);
    auto text = std::string {};
    for (auto i = 0; i < length; ++i)
    {
        auto const k = kind(rng);
        if (k < 3)
            text += ' ';
        else if (k == 3)
            text += '\n';
        else if (k == 4)
            text += '\t';
        else if (k == 5)
            text += "\xC3\xA9"; // e-acute, two bytes
        else
            text += static_cast<char>('a' + k);
    }
    return text;
}

} // namespace

TEST_CASE("visual token formula")
{
    CHECK(computeVisualTokens(256, 284, defaultEncoder()) == 72);
    CHECK(computeVisualTokens(192, 252, defaultEncoder()) == 48);
    CHECK(computeVisualTokens(128, 190, defaultEncoder()) == 24);
    CHECK(computeVisualTokens(16, 16, defaultEncoder()) == 1);
    // 1 patch of 4 still costs a whole merged token.
    CHECK(computeVisualTokens(1, 1, defaultEncoder()) == 1);
    CHECK(computeVisualTokens(48, 16, defaultEncoder()) == 1);
    CHECK(computeVisualTokens(80, 16, defaultEncoder()) == 2);

    CHECK(computeVisualTokens(256, 284, glmEncoder()) == 90);
    CHECK(computeVisualTokens(192, 252, glmEncoder()) == 63);
    CHECK(computeVisualTokens(128, 190, glmEncoder()) == 35);
    // Exact halves round up: 42 / 28 = 1.5.
    CHECK(computeVisualTokens(42, 42, glmEncoder()) == 4);

    CHECK_THROWS_AS((void) computeVisualTokens(0, 10, defaultEncoder()), InvalidDimension);
    CHECK_THROWS_AS((void) computeVisualTokens(10, -1, glmEncoder()), InvalidDimension);
    CHECK_THROWS_AS((void) encoderByName("nope"), InputError);
}

TEST_CASE("built-in presets")
{
    CHECK(preset5x().pageWidth == 256);
    CHECK(preset5x().pageHeight == 284);
    CHECK(preset10x().fontSize == 6);
    CHECK(preset15x().lineSpacing == doctest::Approx(1.05));
    CHECK(presetByName("10x").margin == 6);
    CHECK_THROWS_AS((void) presetByName("20x"), InputError);
    for (auto const& p: builtinPresets())
        CHECK_NOTHROW(validate(p));

    auto bad = preset5x();
    bad.pageWidth = 250;
    CHECK_THROWS_AS(validate(bad), InvalidDimension);
}

TEST_CASE("empty and trivial documents")
{
    auto const metrics = FixedAdvanceMetrics {};
    CHECK(renderPages(SourceText(""), preset5x(), metrics).pageCount() == 0);
    CHECK(renderPages(SourceText("  \n\n \t\n"), preset5x(), metrics).pageCount() == 0);

    auto const one = renderPages(SourceText("hello"), preset5x(), testing::dejaVuSans());
    REQUIRE(one.pageCount() == 1);
    CHECK(one.pages[0].width == 256);
    CHECK(one.pages[0].height == 284);
    CHECK(one.pages[0].visualTokens == 72);
    CHECK(one.pages[0].charSpan == CharSpan { 0, 5 });
    REQUIRE(one.pages[0].raster);
    CHECK(one.pages[0].raster->width == 256);
    CHECK(one.pages[0].raster->height == 284);
}

TEST_CASE("greedy wrap with fixed advances")
{
    auto const metrics = FixedAdvanceMetrics(0.5, 0.5);
    auto const text = SourceText("aaaa bbbb cccc dddddddddddd e");
    auto const pages = renderPages(text, tinyPreset(), metrics, { .rasterize = false });
    CHECK(lineTexts(pages, text) == std::vector<std::string> { "aaaa bbbb", "cccc", "dddddddddddd", "e" });
    REQUIRE(pages.pageCount() == 1);
    CHECK(pages.pages[0].lines[0].breakAfter == LineBreak::Wrap);
    CHECK(pages.pages[0].lines[3].breakAfter == LineBreak::Paragraph);
}

TEST_CASE("over-long words hard-break at character granularity")
{
    auto const metrics = FixedAdvanceMetrics(0.5, 0.5);
    auto const text = SourceText(std::string(30, 'x') + " y");
    auto const pages = renderPages(text, tinyPreset(), metrics, { .rasterize = false });
    CHECK(lineTexts(pages, text)
          == std::vector<std::string> { std::string(12, 'x'), std::string(12, 'x'), std::string(6, 'x') + " y" });
    CHECK(pages.pages[0].lines[0].breakAfter == LineBreak::WordSplit);

    // A glyph wider than the whole line still advances one character per line.
    auto const wide = FixedAdvanceMetrics(10.0, 0.5);
    auto const narrow = renderPages(SourceText("abc"), tinyPreset(), wide, { .rasterize = false });
    CHECK(lineTexts(narrow, SourceText("abc")) == std::vector<std::string> { "a", "b", "c" });
}

TEST_CASE("newlines force breaks and blank lines collapse")
{
    auto const metrics = FixedAdvanceMetrics(0.5, 0.5);
    auto const text = SourceText("\n\nab\ncd\n\n\n\nef  \n  \n");
    auto const pages = renderPages(text, tinyPreset(), metrics, { .rasterize = false });
    REQUIRE(pages.pageCount() == 1);
    auto const& lines = pages.pages[0].lines;
    REQUIRE(lines.size() == 4);
    CHECK(text.slice(lines[0].span) == "ab");
    CHECK(text.slice(lines[1].span) == "cd");
    CHECK(lines[2].blank);
    CHECK(text.slice(lines[3].span) == "ef");
    CHECK(reflowText(pages, text) == "ab\ncd\n\nef");
}

TEST_CASE("pages split on the height budget")
{
    auto const metrics = FixedAdvanceMetrics(0.5, 0.5);
    // Nine lines of one word each at four lines per page.
    auto const text = SourceText("a\nb\nc\nd\ne\nf\ng\nh\ni");
    auto const pages = renderPages(text, tinyPreset(), metrics, { .rasterize = false });
    REQUIRE(pages.pageCount() == 3);
    CHECK(pages.pages[0].charSpan == CharSpan { 0, 8 });
    CHECK(pages.pages[1].charSpan == CharSpan { 8, 16 });
    CHECK(pages.pages[2].charSpan == CharSpan { 16, 17 });
    CHECK(pages.pages[2].index == 3);
    CHECK_THROWS_AS((void) pages.page(4), RangeError);
}

TEST_CASE("degenerate presets")
{
    auto const metrics = FixedAdvanceMetrics {};
    auto degenerate = tinyPreset();
    degenerate.margin = 32;
    CHECK(pageCapacityEstimate(degenerate, metrics) == 0);
    CHECK(linesPerPage(degenerate) == 0);
    CHECK_THROWS_AS((void) renderPages(SourceText("x"), degenerate, metrics), InvalidDimension);
    CHECK(renderPages(SourceText(""), degenerate, metrics).pageCount() == 0);
}

TEST_CASE("span partition and reflow round-trip hold for random text")
{
    auto rng = std::mt19937_64(1234);
    auto const metrics = FixedAdvanceMetrics(0.5, 0.3);
    auto const& font = testing::dejaVuSans();
    for (auto trial = 0; trial < 300; ++trial)
    {
        auto const text = SourceText(randomText(rng));
        auto const& preset = trial % 2 == 0 ? tinyPreset() : preset15x();
        GlyphMetrics const& m = trial % 3 == 0 ? static_cast<GlyphMetrics const&>(font) : metrics;
        auto const pages = renderPages(text, preset, m, { .rasterize = false });
        CAPTURE(text.utf8());

        CHECK(reflowText(pages, text) == normalizeWhitespace(text.utf8()));
        if (pages.pageCount() == 0)
            continue;
        CHECK(pages.pages.front().charSpan.begin == 0);
        CHECK(pages.pages.back().charSpan.end == text.size());
        for (auto i = std::size_t { 0 }; i < pages.pageCount(); ++i)
        {
            auto const& page = pages.pages[i];
            CHECK(page.index == static_cast<int>(i) + 1);
            CHECK(page.charSpan.begin < page.charSpan.end);
            if (i > 0)
                CHECK(pages.pages[i - 1].charSpan.end == page.charSpan.begin);
            for (auto const& line: page.lines)
            {
                CHECK(line.span.begin >= page.charSpan.begin);
                CHECK(line.span.end <= page.charSpan.end);
            }
            CHECK(page.lines.size() <= static_cast<std::size_t>(linesPerPage(preset)));
        }
    }
}

TEST_CASE("rendering is deterministic")
{
    auto const text = SourceText(testing::makeProse(6000, 7));
    auto const a = renderPages(text, preset10x(), testing::dejaVuSans());
    auto const b = renderPages(text, preset10x(), testing::dejaVuSans());
    REQUIRE(a.pageCount() == b.pageCount());
    auto inked = false;
    for (auto i = std::size_t { 0 }; i < a.pageCount(); ++i)
    {
        CHECK(a.pages[i].charSpan == b.pages[i].charSpan);
        CHECK(a.pages[i].lines == b.pages[i].lines);
        REQUIRE(a.pages[i].raster);
        CHECK(*a.pages[i].raster == *b.pages[i].raster);
        for (auto px: a.pages[i].raster->pixels)
            inked = inked || px < 128;
    }
    CHECK(inked);
}

TEST_CASE("token formula ratio across presets is 3:2:1")
{
    auto const t5 = computeVisualTokens(preset5x().pageWidth, preset5x().pageHeight, defaultEncoder());
    auto const t10 = computeVisualTokens(preset10x().pageWidth, preset10x().pageHeight, defaultEncoder());
    auto const t15 = computeVisualTokens(preset15x().pageWidth, preset15x().pageHeight, defaultEncoder());
    CHECK(t5 == 3 * t15);
    CHECK(t10 == 2 * t15);
}

TEST_CASE("page capacity estimates")
{
    auto const& font = testing::dejaVuSans();
    auto const c5 = static_cast<double>(pageCapacityEstimate(preset5x(), font));
    auto const c10 = static_cast<double>(pageCapacityEstimate(preset10x(), font));
    auto const c15 = static_cast<double>(pageCapacityEstimate(preset15x(), font));
    MESSAGE("capacity 5x=" << c5 << " 10x=" << c10 << " 15x=" << c15);
    CHECK(c5 == doctest::Approx(2000).epsilon(0.20));
    // Denser presets hold more text per line but the 15x page is smaller.
    CHECK(c10 > c5);
    CHECK(c15 < c5);
}

// Registered as its own ctest entry: DejaVuSans geometry at 192x252 / 6 px /
// 1.10 fits about 2,100 characters, below the nominal 2,700 - 20%.
TEST_CASE("page capacity estimate at 10x matches the nominal table value")
{
    auto const c10 = static_cast<double>(pageCapacityEstimate(preset10x(), testing::dejaVuSans()));
    CHECK(c10 == doctest::Approx(2700).epsilon(0.20));
}

TEST_CASE("a 10,000-token document at 5x fills about 25 pages of 72 tokens")
{
    // 10,000 tokens at the default 4 characters per token.
    auto const text = SourceText(testing::makeProse(40000, 2024));
    auto const pages = renderPages(text, preset5x(), testing::dejaVuSans(), { .rasterize = false });
    MESSAGE("pages at 5x: " << pages.pageCount());
    CHECK(pages.pageCount() >= 22);
    CHECK(pages.pageCount() <= 28);
    for (auto const& page: pages.pages)
        CHECK(page.visualTokens == 72);
}

TEST_CASE("PNG persistence keeps geometry")
{
    auto const pages = renderPages(SourceText("Pour Moi won the 2011 Derby."), preset15x(), testing::dejaVuSans());
    REQUIRE(pages.pageCount() == 1);
    auto const png = encodePng(*pages.pages[0].raster);
    CHECK(png.substr(1, 3) == "PNG");
    auto const decoded = decodePng(png);
    CHECK(decoded == *pages.pages[0].raster);
    CHECK_THROWS_AS((void) decodePng("not a png"), InputError);

    auto const dir = std::filesystem::temp_directory_path() / "pagezip_render_test";
    std::filesystem::remove_all(dir);
    auto const docDir = writeDocumentPages(dir, "doc-1", pages);
    CHECK(std::filesystem::exists(docDir / "page_0001.png"));
    CHECK(std::filesystem::exists(docDir / "manifest.json"));
    auto const manifest = pageSetManifest("doc-1", pages);
    CHECK(manifest["pages"][0]["visual_tokens"] == 24);
    CHECK(manifest["pages"][0]["file"] == "page_0001.png");
    std::filesystem::remove_all(dir);
}
