// SPDX-License-Identifier: Apache-2.0
#include <pagezip/corpus/padding.hpp>
#include <pagezip/error.hpp>
#include <pagezip/util/random.hpp>

#include <algorithm>

namespace pagezip
{

namespace
{

constexpr std::string_view Separator = "\n";

std::size_t codepointsIn(std::string_view utf8)
{
    return static_cast<std::size_t>(std::ranges::count_if(utf8, [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::int64_t separatedCost(std::string_view passage, TokenCounter const& counter)
{
    return counter.count(std::string(Separator) + std::string(passage));
}

// Longest prefix ending at a word boundary whose separated cost fits `budget`.
std::string truncateToBudget(std::string_view passage, std::int64_t budget, TokenCounter const& counter)
{
    auto ends = std::vector<std::size_t> {};
    for (auto i = std::size_t { 0 }; i < passage.size(); ++i)
        if (passage[i] != ' ' && passage[i] != '\n' && passage[i] != '\t'
            && (i + 1 == passage.size() || passage[i + 1] == ' ' || passage[i + 1] == '\n' || passage[i + 1] == '\t'))
            ends.push_back(i + 1);
    auto lo = std::size_t { 0 };
    auto hi = ends.size();
    while (lo < hi)
    {
        auto const mid = (lo + hi + 1) / 2;
        if (separatedCost(passage.substr(0, ends[mid - 1]), counter) <= budget)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo == 0 ? std::string {} : std::string(passage.substr(0, ends[lo - 1]));
}

} // namespace

PaddingResult padWithDistractors(Sample const& sample, std::span<std::string const> pool, TokenRange range,
                                 std::uint64_t seed, TokenCounter const& counter)
{
    if (range.lo < 3000 || range.hi > 32000)
        throw InputError("padding range must lie within [3000, 32000] tokens");
    return padWithDistractorsUnchecked(sample, pool, range, seed, counter);
}

PaddingResult padWithDistractorsUnchecked(Sample const& sample, std::span<std::string const> pool, TokenRange range,
                                          std::uint64_t seed, TokenCounter const& counter)
{
    if (range.lo < 0 || range.lo > range.hi)
        throw InputError("padding range must satisfy 0 <= lo <= hi");
    auto usable = std::vector<std::string_view> {};
    for (auto const& p: pool)
        if (p.find_first_not_of(" \t\n\r") != std::string::npos)
            usable.push_back(p);
    if (usable.empty())
        throw InputError("distractor pool has no non-empty passage");

    auto result = PaddingResult { .sample = sample, .aboveCeiling = false, .tokens = counter.count(sample.document), .distractors = 0 };
    if (result.tokens > range.hi)
    {
        result.aboveCeiling = true;
        return result;
    }

    auto rng = SplitMix64(seed);
    auto const target = uniformBetween(rng, std::max(range.lo, result.tokens), range.hi);
    if (target == result.tokens)
        return result;

    // Pieces in document order, each tagged with its insertion sequence so the
    // most recent distractors can be removed if the exact count overshoots.
    struct Piece
    {
        std::string text;
        int order; // -1 for the gold document
    };
    auto pieces = std::vector<Piece> { { sample.document, -1 } };
    auto inserted = 0;

    auto assemble = [&] {
        auto doc = std::string {};
        for (auto i = std::size_t { 0 }; i < pieces.size(); ++i)
        {
            if (i)
                doc += Separator;
            doc += pieces[i].text;
        }
        return doc;
    };

    auto addUntil = [&](std::int64_t budget) {
        // budget: tokens still wanted, estimated piecewise.
        while (budget > 0)
        {
            auto passage = std::string(usable[uniformBelow(rng, usable.size())]);
            auto cost = separatedCost(passage, counter);
            if (cost > budget)
            {
                passage = truncateToBudget(passage, budget, counter);
                if (passage.empty())
                    return;
                cost = separatedCost(passage, counter);
            }
            auto const slot = uniformBelow(rng, pieces.size() + 1);
            pieces.insert(pieces.begin() + static_cast<std::ptrdiff_t>(slot), Piece { std::move(passage), inserted++ });
            budget -= cost;
        }
    };

    addUntil(target - result.tokens);
    auto document = assemble();
    auto tokens = counter.count(document);
    // Piecewise estimates can drift from the exact count; correct a few times.
    for (auto round = 0; round < 8 && (tokens > range.hi || tokens < range.lo); ++round)
    {
        if (tokens > range.hi)
        {
            auto const newest = std::ranges::max_element(pieces, {}, &Piece::order);
            if (newest->order < 0)
                break;
            pieces.erase(newest);
        }
        else
            addUntil(target - tokens);
        document = assemble();
        tokens = counter.count(document);
    }

    auto offset = std::size_t { 0 };
    for (auto const& piece: pieces)
    {
        if (piece.order < 0)
            break;
        offset += codepointsIn(piece.text) + codepointsIn(Separator);
    }
    for (auto& span: result.sample.spans)
    {
        span.begin += offset;
        span.end += offset;
    }
    result.sample.document = std::move(document);
    result.sample.numTokens.reset();
    result.tokens = tokens;
    result.distractors = pieces.size() - 1;
    return result;
}

} // namespace pagezip
