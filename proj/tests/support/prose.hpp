// SPDX-License-Identifier: Apache-2.0
#pragma once

// Seeded English-like filler text for layout and corpus tests.

#include <array>
#include <cctype>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace pagezip::testing
{

inline constexpr auto ProseVocabulary = std::to_array<std::string_view>({
    "the",      "of",       "and",       "to",        "in",       "a",        "is",       "that",     "for",
    "it",       "as",       "was",      "with",      "be",        "by",       "on",       "not",      "he",
    "this",     "are",      "or",       "his",       "from",      "at",       "which",    "but",      "have",
    "an",       "had",      "they",     "you",       "were",      "their",    "one",      "all",      "we",
    "can",      "her",      "has",      "there",     "been",      "if",       "more",     "when",     "will",
    "would",    "who",      "so",       "no",        "river",     "city",     "century",  "government",
    "history",  "people",   "during",   "between",   "station",   "railway",  "company",  "population",
    "county",   "village",  "school",   "church",    "building",  "album",    "released", "season",
    "football", "league",   "national", "university", "published", "series",   "written",  "directed",
    "film",     "species",  "family",   "region",    "district",  "island",   "north",    "south",
    "western",  "eastern",  "original", "several",   "including", "following", "received", "record",
    "award",    "party",    "election", "member",    "council",   "army",     "war",      "battle",
    "king",     "queen",    "empire",   "capital",   "area",      "water",    "land",     "known",
    "named",    "after",    "before",   "between",   "under",     "later",    "early",    "first",
    "second",   "new",      "old",      "large",     "small",     "high",     "public",   "local",
    "state",    "also",     "about",    "into",      "than",      "other",    "some",     "time",
    "year",     "years",    "two",      "three",     "most",      "many",     "such",     "only",
    "used",     "made",     "may",      "over",      "its",       "where",    "these",    "while",
    "both",     "each",     "through",  "because",   "however",   "although", "around",
});

/// Deterministic prose of exactly `chars` bytes (ASCII). Paragraphs are
/// separated by `paragraphBreak`, one newline by default as in dataset dumps.
inline std::string makeProse(std::size_t chars, std::uint64_t seed, std::string_view paragraphBreak = "\n")
{
    auto rng = std::mt19937_64(seed);
    auto pick = std::uniform_int_distribution<std::size_t>(0, ProseVocabulary.size() - 1);
    auto sentenceLength = std::uniform_int_distribution<int>(8, 22);
    auto paragraphLength = std::uniform_int_distribution<int>(3, 7);

    auto text = std::string {};
    text.reserve(chars + 64);
    while (text.size() < chars)
    {
        if (!text.empty())
            text += paragraphBreak;
        auto const sentences = paragraphLength(rng);
        for (auto s = 0; s < sentences && text.size() < chars; ++s)
        {
            if (s > 0)
                text += ' ';
            auto const words = sentenceLength(rng);
            for (auto w = 0; w < words; ++w)
            {
                auto word = std::string(ProseVocabulary[pick(rng)]);
                if (w == 0)
                    word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
                else
                    text += ' ';
                text += word;
            }
            text += '.';
        }
    }
    text.resize(chars);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\n'))
        text.back() = '.';
    return text;
}

} // namespace pagezip::testing
