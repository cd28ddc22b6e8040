// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pagezip/corpus/padding.hpp>
#include <pagezip/protocol/endpoints.hpp>
#include <pagezip/protocol/episode.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pagezip
{

/// Everything a pipeline run reads from its config file. Command-line flags
/// are applied on top by the CLI.
///
///   seed = 7
///   parallelism = 4
///   tokenizer = "default"        # or "chars/N", "whitespace"
///   font = ""                    # empty: $PAGEZIP_FONT or DejaVuSans
///   presets = ["10x"]
///
///   [episode]
///   max_turns = 6
///   expand_kind = "source_text"  # ocr_text, image_zoom
///   temperature = 0.0
///   max_tokens = 2048
///   zoom_scale = 3.0
///
///   [padding]
///   min_tokens = 3000
///   max_tokens = 32000
///
///   [endpoints.model]            # also [endpoints.judge], [endpoints.ocr]
///   url = "http://localhost:8000/v1/chat/completions"
///   model = "reader"
///   api_key_env = "READER_API_KEY"
///   timeout_seconds = 300
struct PipelineConfig
{
    std::uint64_t seed = 0;
    int parallelism = 1;
    std::string tokenizer = "default";
    std::filesystem::path font;
    std::vector<std::string> presets { "10x" };
    EpisodeConfig episode;
    TokenRange padding;
    EndpointDescriptor model { .url = "mock:answer", .model = "", .apiKeyEnv = "", .timeoutSeconds = 300 };
    EndpointDescriptor judge { .url = "mock:exact_match", .model = "", .apiKeyEnv = "", .timeoutSeconds = 300 };
    EndpointDescriptor ocr { .url = "", .model = "", .apiKeyEnv = "", .timeoutSeconds = 300 };

    /// Throws InputError naming the offending field.
    void validate() const;
};

/// Reads a TOML config. Unknown keys are rejected so typos do not pass
/// silently. Throws InputError.
[[nodiscard]] PipelineConfig loadConfig(std::filesystem::path const& path);
[[nodiscard]] PipelineConfig parseConfig(std::string_view toml, std::string const& sourceName = "<config>");

} // namespace pagezip
