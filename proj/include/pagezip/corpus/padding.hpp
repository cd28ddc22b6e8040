// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pagezip/corpus/sample.hpp>
#include <pagezip/ledger/token_counter.hpp>

#include <cstdint>
#include <span>
#include <string>

namespace pagezip
{

/// Inclusive token range of padded documents.
struct TokenRange
{
    std::int64_t lo = 3000;
    std::int64_t hi = 32000;
};

struct PaddingResult
{
    Sample sample;
    bool aboveCeiling = false;  // input already exceeded range.hi and was left alone
    std::int64_t tokens = 0;    // counter tokens of the returned document
    std::size_t distractors = 0;
};

/// Draws a target uniformly in [max(lo, current), hi] and inserts pool
/// passages (drawn with replacement, the last one cut at a word boundary) at
/// random positions before and after the gold document, which stays
/// contiguous. Passages are joined with '\n'. Answer spans are shifted.
/// The injected num_tokens is dropped because it no longer describes the text.
///
/// Throws InputError when the range is outside [3000, 32000] or inverted, or
/// when the pool has no non-empty passage.
[[nodiscard]] PaddingResult padWithDistractors(Sample const& sample, std::span<std::string const> pool,
                                               TokenRange range, std::uint64_t seed, TokenCounter const& counter);

/// Same as padWithDistractors without the [3000, 32000] bound on the range.
[[nodiscard]] PaddingResult padWithDistractorsUnchecked(Sample const& sample, std::span<std::string const> pool,
                                                        TokenRange range, std::uint64_t seed,
                                                        TokenCounter const& counter);

} // namespace pagezip
