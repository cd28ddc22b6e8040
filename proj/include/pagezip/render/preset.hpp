// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <string_view>

namespace pagezip
{

/// Geometry of one compression level. Font size is in pixels per em
/// (points at 72 dpi, which is how the renderer interprets them).
struct RenderPreset
{
    std::string name;
    int pageWidth = 0;
    int pageHeight = 0;
    double fontSize = 0;
    double lineSpacing = 1.0;
    int margin = 0;
    int nominalTokensPerPage = 0; // informational only

    [[nodiscard]] double linePitch() const noexcept { return fontSize * lineSpacing; }
    [[nodiscard]] int usableWidth() const noexcept { return pageWidth - 2 * margin; }
    [[nodiscard]] int usableHeight() const noexcept { return pageHeight - 2 * margin; }

    friend bool operator==(RenderPreset const&, RenderPreset const&) = default;
};

/// Throws InvalidDimension unless width is a positive multiple of 32, height is
/// positive, font size and line spacing are positive and margin is non-negative.
void validate(RenderPreset const& preset);

[[nodiscard]] RenderPreset const& preset5x();
[[nodiscard]] RenderPreset const& preset10x();
[[nodiscard]] RenderPreset const& preset15x();

/// The three built-in presets in increasing compression order.
[[nodiscard]] std::span<RenderPreset const> builtinPresets();

/// Looks up a built-in preset by name ("5x", "10x", "15x"). Throws InputError.
[[nodiscard]] RenderPreset const& presetByName(std::string_view name);

} // namespace pagezip
