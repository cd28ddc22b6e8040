// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>

namespace pagezip
{

enum class TokenRounding
{
    /// ceil(H/stride) * ceil(W/stride) / merge, rounded up when inexact.
    CeilDivideThenMerge,
    /// round(H/cell) * round(W/cell) with half-up rounding, cell = stride * merge side.
    RoundPerAxis,
};

/// How a vision encoder turns image geometry into a visual token count.
struct EncoderProfile
{
    int gridStride = 16;
    int mergeFactor = 4; // tokens merged into one (2x2)
    TokenRounding rounding = TokenRounding::CeilDivideThenMerge;

    friend bool operator==(EncoderProfile const&, EncoderProfile const&) = default;
};

/// Patch stride 16 with 2x2 spatial merge.
[[nodiscard]] constexpr EncoderProfile defaultEncoder() noexcept
{
    return EncoderProfile {};
}

/// Patch 14 with 2x2 merge: 28 px per merged token on each axis.
[[nodiscard]] constexpr EncoderProfile glmEncoder() noexcept
{
    return EncoderProfile { .gridStride = 14, .mergeFactor = 4, .rounding = TokenRounding::RoundPerAxis };
}

/// Looks up "default" / "qwen" or "glm". Throws InputError.
[[nodiscard]] EncoderProfile encoderByName(std::string_view name);

/// Visual tokens produced for a width x height image. Throws InvalidDimension
/// for non-positive sizes or a malformed profile.
[[nodiscard]] std::int64_t computeVisualTokens(int width, int height, EncoderProfile const& profile);

} // namespace pagezip
