// SPDX-License-Identifier: Apache-2.0
#include <pagezip/error.hpp>
#include <pagezip/render/encoder.hpp>

#include <cmath>
#include <string>

namespace pagezip
{

namespace
{

std::int64_t ceilDiv(std::int64_t a, std::int64_t b)
{
    return (a + b - 1) / b;
}

// Side length of the square merge window (4 -> 2).
int mergeSide(int mergeFactor)
{
    auto const side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(mergeFactor))));
    if (side < 1 || side * side != mergeFactor)
        throw InvalidDimension("merge factor must be a perfect square, got " + std::to_string(mergeFactor));
    return side;
}

// round(x / cell) with halves rounded up, in exact integer arithmetic.
std::int64_t roundHalfUpDiv(std::int64_t x, std::int64_t cell)
{
    return (2 * x + cell) / (2 * cell);
}

} // namespace

EncoderProfile encoderByName(std::string_view name)
{
    if (name == "default" || name == "qwen")
        return defaultEncoder();
    if (name == "glm")
        return glmEncoder();
    throw InputError("unknown encoder profile '" + std::string(name) + "'");
}

std::int64_t computeVisualTokens(int width, int height, EncoderProfile const& profile)
{
    if (width < 1 || height < 1)
        throw InvalidDimension("image dimensions must be positive, got " + std::to_string(width) + "x"
                               + std::to_string(height));
    if (profile.gridStride < 1 || profile.mergeFactor < 1)
        throw InvalidDimension("encoder stride and merge factor must be positive");

    switch (profile.rounding)
    {
        case TokenRounding::CeilDivideThenMerge: {
            auto const patches = ceilDiv(height, profile.gridStride) * ceilDiv(width, profile.gridStride);
            return ceilDiv(patches, profile.mergeFactor);
        }
        case TokenRounding::RoundPerAxis: {
            auto const cell = static_cast<std::int64_t>(profile.gridStride) * mergeSide(profile.mergeFactor);
            return roundHalfUpDiv(height, cell) * roundHalfUpDiv(width, cell);
        }
    }
    throw InvalidDimension("unknown token rounding mode");
}

} // namespace pagezip
