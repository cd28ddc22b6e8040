// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pagezip/render/glyph_metrics.hpp>

namespace pagezip::testing
{

/// DejaVuSans, loaded once per process.
inline TrueTypeFont const& dejaVuSans()
{
    static auto const font = loadFont();
    return *font;
}

} // namespace pagezip::testing
