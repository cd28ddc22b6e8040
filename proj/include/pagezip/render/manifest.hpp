// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pagezip/render/layout.hpp>

#include <json.hpp>

#include <filesystem>
#include <string>

namespace pagezip
{

/// "page_0007.png" for k = 7.
[[nodiscard]] std::string pageFileName(int index);

/// Sidecar manifest: preset, encoder, page dimensions, char spans and visual tokens.
[[nodiscard]] nlohmann::json pageSetManifest(std::string const& docId, PageSet const& pages);

/// Writes {outDir}/{docId}/page_{k:04}.png for every rasterized page plus
/// {outDir}/{docId}/manifest.json. Returns the document directory.
std::filesystem::path writeDocumentPages(std::filesystem::path const& outDir, std::string const& docId,
                                         PageSet const& pages);

} // namespace pagezip
