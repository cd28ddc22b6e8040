// SPDX-License-Identifier: Apache-2.0
#pragma once

// Rendered documents shared by protocol, corpus and acceptance tests.

#include "font.hpp"
#include "prose.hpp"

#include <pagezip/corpus/sample.hpp>
#include <pagezip/ledger/token_counter.hpp>
#include <pagezip/protocol/episode.hpp>
#include <pagezip/render/preset.hpp>

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>

namespace pagezip::testing
{

// 6 px glyphs on a 64 px line, 3 lines per page.
inline RenderPreset gridPreset()
{
    return RenderPreset { .name = "grid",
                          .pageWidth = 64,
                          .pageHeight = 36,
                          .fontSize = 12,
                          .lineSpacing = 1.0,
                          .margin = 0,
                          .nominalTokensPerPage = 0 };
}

inline std::shared_ptr<GlyphMetrics const> gridMetrics()
{
    static auto const metrics = std::make_shared<FixedAdvanceMetrics const>(0.5, 0.5);
    return metrics;
}

/// Three nine-letter words per page, "pNNlL____", one per line, so every page
/// is easy to recognise in tool responses.
inline std::string gridText(int pages)
{
    auto text = std::string {};
    for (auto p = 1; p <= pages; ++p)
        for (auto line = 0; line < 3; ++line)
        {
            char word[16];
            std::snprintf(word, sizeof(word), "p%02dl%d___ ", p, line);
            text += word;
        }
    return text;
}

inline std::shared_ptr<RenderedDocument const> gridDocument(std::string id, std::string text,
                                                            std::optional<std::int64_t> injectedTokens = std::nullopt)
{
    return makeRenderedDocument(std::move(id), std::move(text), gridPreset(), gridMetrics(), *defaultTokenCounter(),
                                injectedTokens);
}

inline constexpr std::string_view DerbyPassage =
    "Result of the 2011 Epsom Derby. The winner was Pour Moi, a colt foaled in Ireland in 2008 and sired by "
    "Montjeu, ridden by Mickael Barzalona.";

inline constexpr std::string_view DerbyQuestion = "What was the French sounding winner of the 2011 Epsom Derby?";

struct DerbyDocument
{
    std::string text;
    CharSpan passage;
    std::shared_ptr<RenderedDocument const> doc;
};

/// A 29-page document at the 10x preset with DerbyPassage entirely on page 22.
inline DerbyDocument const& derbyDocument()
{
    static auto const built = [] {
        auto const& preset = preset10x();
        auto const& font = dejaVuSans();
        auto const geometry = RenderOptions { .encoder = defaultEncoder(), .rasterize = false };
        auto const filler = makeProse(120000, 2011);
        auto const fillerPages = renderPages(SourceText(filler), preset, font, geometry);
        auto const& target = fillerPages.page(22);
        for (auto const& line: target.lines)
        {
            auto const at = line.span.begin;
            auto text = filler.substr(0, at) + std::string(DerbyPassage) + " " + filler.substr(at);
            auto const passage = CharSpan { at, at + DerbyPassage.size() };
            auto const pages = renderPages(SourceText(text), preset, font, geometry);
            if (mapSpansToPages(std::span(&passage, 1), pages) != std::set<int> { 22 })
                continue;
            text.resize(pages.page(29).charSpan.end);
            auto doc = makeRenderedDocument("derby", text, preset, std::shared_ptr<GlyphMetrics const>(&font, [](auto*) {}),
                                            *defaultTokenCounter(), std::nullopt, defaultEncoder(), false);
            if (doc->pages->pageCount() != 29)
                continue;
            return DerbyDocument { .text = std::move(text), .passage = passage, .doc = std::move(doc) };
        }
        throw std::runtime_error("could not place the passage on page 22");
    }();
    return built;
}

inline std::string const& derbyToolTurn()
{
    static auto const reply = std::string(
        "<think>The 2011 race results should sit near the pages about the Derby; image 22 mentions the race "
        "and its jockeys, so I will read it.</think>\n"
        "<tool_call>{\"name\": \"read_text\", \"arguments\": {\"image\": 22}}</tool_call>");
    return reply;
}

inline std::string const& derbyAnswerTurn()
{
    static auto const reply = std::string("<think>The page names the 2011 winner, Pour Moi.</think>\npour moi");
    return reply;
}

} // namespace pagezip::testing
