// SPDX-License-Identifier: Apache-2.0
#include <pagezip/error.hpp>
#include <pagezip/render/manifest.hpp>

#include <cstdio>
#include <fstream>

namespace pagezip
{

namespace
{

char const* roundingName(TokenRounding r)
{
    return r == TokenRounding::RoundPerAxis ? "round_per_axis" : "ceil_divide_then_merge";
}

} // namespace

std::string pageFileName(int index)
{
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "page_%04d.png", index);
    return buffer;
}

nlohmann::json pageSetManifest(std::string const& docId, PageSet const& pages)
{
    auto const& p = pages.preset;
    auto manifest = nlohmann::json {
        { "doc_id", docId },
        { "preset",
          { { "name", p.name },
            { "page_width", p.pageWidth },
            { "page_height", p.pageHeight },
            { "font_size", p.fontSize },
            { "line_spacing", p.lineSpacing },
            { "margin", p.margin },
            { "nominal_tokens_per_page", p.nominalTokensPerPage } } },
        { "encoder",
          { { "grid_stride", pages.encoder.gridStride },
            { "merge_factor", pages.encoder.mergeFactor },
            { "rounding", roundingName(pages.encoder.rounding) } } },
        { "source_char_count", pages.sourceCharCount },
        { "total_visual_tokens", pages.totalVisualTokens() },
        { "pages", nlohmann::json::array() },
    };
    for (auto const& page: pages.pages)
        manifest["pages"].push_back({
            { "index", page.index },
            { "file", pageFileName(page.index) },
            { "width", page.width },
            { "height", page.height },
            { "char_span", { page.charSpan.begin, page.charSpan.end } },
            { "visual_tokens", page.visualTokens },
        });
    return manifest;
}

std::filesystem::path writeDocumentPages(std::filesystem::path const& outDir, std::string const& docId,
                                         PageSet const& pages)
{
    auto const dir = outDir / docId;
    std::filesystem::create_directories(dir);
    for (auto const& page: pages.pages)
        if (page.raster)
            writePng(*page.raster, dir / pageFileName(page.index));

    auto out = std::ofstream(dir / "manifest.json", std::ios::trunc);
    if (!out)
        throw InputError("cannot write manifest in " + dir.string());
    out << pageSetManifest(docId, pages).dump(2) << '\n';
    return dir;
}

} // namespace pagezip
