// SPDX-License-Identifier: Apache-2.0
#include <pagezip/error.hpp>
#include <pagezip/render/preset.hpp>

#include <array>

namespace pagezip
{

namespace
{

std::array<RenderPreset, 3> const& presets()
{
    static auto const table = std::array<RenderPreset, 3> {
        RenderPreset { .name = "5x",
                       .pageWidth = 256,
                       .pageHeight = 284,
                       .fontSize = 8,
                       .lineSpacing = 1.15,
                       .margin = 7,
                       .nominalTokensPerPage = 405 },
        RenderPreset { .name = "10x",
                       .pageWidth = 192,
                       .pageHeight = 252,
                       .fontSize = 6,
                       .lineSpacing = 1.10,
                       .margin = 6,
                       .nominalTokensPerPage = 540 },
        RenderPreset { .name = "15x",
                       .pageWidth = 128,
                       .pageHeight = 190,
                       .fontSize = 5,
                       .lineSpacing = 1.05,
                       .margin = 5,
                       .nominalTokensPerPage = 378 },
    };
    return table;
}

} // namespace

void validate(RenderPreset const& preset)
{
    if (preset.pageWidth <= 0 || preset.pageWidth % 32 != 0)
        throw InvalidDimension("preset '" + preset.name + "': page width must be a positive multiple of 32, got "
                               + std::to_string(preset.pageWidth));
    if (preset.pageHeight <= 0)
        throw InvalidDimension("preset '" + preset.name + "': page height must be positive");
    if (!(preset.fontSize > 0) || !(preset.lineSpacing > 0))
        throw InvalidDimension("preset '" + preset.name + "': font size and line spacing must be positive");
    if (preset.margin < 0)
        throw InvalidDimension("preset '" + preset.name + "': margin must be non-negative");
}

RenderPreset const& preset5x()
{
    return presets()[0];
}

RenderPreset const& preset10x()
{
    return presets()[1];
}

RenderPreset const& preset15x()
{
    return presets()[2];
}

std::span<RenderPreset const> builtinPresets()
{
    return presets();
}

RenderPreset const& presetByName(std::string_view name)
{
    for (auto const& p: presets())
        if (p.name == name)
            return p;
    throw InputError("unknown preset '" + std::string(name) + "' (expected 5x, 10x or 15x)");
}

} // namespace pagezip
