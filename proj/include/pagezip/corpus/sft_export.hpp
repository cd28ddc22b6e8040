// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pagezip/corpus/trajectory.hpp>

#include <json.hpp>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pagezip
{

inline constexpr std::string_view ImagePlaceholder = "<image>";

/// One conversation: {"id", "messages": [{"role", "content", "loss"}], "images": [refs]}.
/// Image parts become <image> placeholders, listed in order under "images".
/// "loss" is true only for model-produced messages.
[[nodiscard]] nlohmann::json toSftRecord(Trajectory const& trajectory);

/// Inverse of toSftRecord for the conversation part (id, dataset, messages).
/// Throws InputError when placeholders and images disagree.
[[nodiscard]] Trajectory fromSftRecord(nlohmann::json const& record);

struct ExportReport
{
    std::size_t written = 0;
    std::size_t skippedProtocolError = 0;
};

/// One JSON line per trajectory; protocol_error trajectories are skipped and counted.
ExportReport exportSftDataset(std::span<Trajectory const> trajectories, std::ostream& out);

/// Reads an export back. Throws InputError naming the bad line.
[[nodiscard]] std::vector<Trajectory> importSftDataset(std::istream& in);

} // namespace pagezip
