// SPDX-License-Identifier: Apache-2.0
#include <pagezip/cli/config.hpp>
#include <pagezip/error.hpp>
#include <pagezip/ledger/token_counter.hpp>
#include <pagezip/render/preset.hpp>

#include <toml.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace pagezip
{

namespace
{

void rejectUnknown(toml::table const& table, std::set<std::string_view> const& known, std::string const& where)
{
    for (auto const& [key, value]: table)
    {
        (void) value;
        if (!known.contains(key.str()))
            throw InputError("unknown config key " + where + std::string(key.str()));
    }
}

template <typename T>
void read(toml::table const& table, std::string_view key, T& out, std::string const& where)
{
    auto const* node = table.get(key);
    if (!node)
        return;
    if constexpr (std::is_same_v<T, std::string>)
    {
        auto const v = node->value<std::string>();
        if (!v)
            throw InputError("config key " + where + std::string(key) + " must be a string");
        out = *v;
    }
    else if constexpr (std::is_same_v<T, double>)
    {
        auto const v = node->value<double>(); // integers convert
        if (!v)
            throw InputError("config key " + where + std::string(key) + " must be a number");
        out = *v;
    }
    else
    {
        auto const v = node->value<std::int64_t>();
        if (!v || (node->is_floating_point()))
            throw InputError("config key " + where + std::string(key) + " must be an integer");
        if constexpr (std::is_same_v<T, std::uint64_t>)
        {
            if (*v < 0)
                throw InputError("config key " + where + std::string(key) + " must be non-negative");
        }
        out = static_cast<T>(*v);
    }
}

toml::table const* subtable(toml::table const& table, std::string_view key, std::string const& where)
{
    auto const* node = table.get(key);
    if (!node)
        return nullptr;
    if (!node->is_table())
        throw InputError("config key " + where + std::string(key) + " must be a table");
    return node->as_table();
}

void readEndpoint(toml::table const& endpoints, std::string_view name, EndpointDescriptor& out)
{
    auto const where = "endpoints." + std::string(name) + ".";
    auto const* t = subtable(endpoints, name, "endpoints.");
    if (!t)
        return;
    rejectUnknown(*t, { "url", "model", "api_key_env", "timeout_seconds" }, where);
    read(*t, "url", out.url, where);
    read(*t, "model", out.model, where);
    read(*t, "api_key_env", out.apiKeyEnv, where);
    read(*t, "timeout_seconds", out.timeoutSeconds, where);
}

} // namespace

void PipelineConfig::validate() const
{
    if (parallelism < 1)
        throw InputError("parallelism must be at least 1");
    if (presets.empty())
        throw InputError("at least one preset is required");
    for (auto const& name: presets)
        (void) presetByName(name);
    (void) makeTokenCounter(tokenizer);
    episode.validate();
    if (padding.lo > padding.hi)
        throw InputError("padding.min_tokens exceeds padding.max_tokens");
    for (auto const* d: { &model, &judge, &ocr })
        if (d->timeoutSeconds < 1)
            throw InputError("endpoint timeout_seconds must be at least 1");
}

PipelineConfig parseConfig(std::string_view text, std::string const& sourceName)
{
    auto table = toml::table {};
    try
    {
        table = toml::parse(text, sourceName);
    }
    catch (toml::parse_error const& e)
    {
        auto out = std::ostringstream {};
        out << sourceName << ": " << e.description() << " (line " << e.source().begin.line << ")";
        throw InputError(out.str());
    }

    auto config = PipelineConfig {};
    rejectUnknown(table, { "seed", "parallelism", "tokenizer", "font", "presets", "episode", "padding", "endpoints" }, "");
    read(table, "seed", config.seed, "");
    read(table, "parallelism", config.parallelism, "");
    read(table, "tokenizer", config.tokenizer, "");
    auto font = std::string {};
    read(table, "font", font, "");
    config.font = font;
    if (auto const* node = table.get("presets"))
    {
        auto const* list = node->as_array();
        if (!list)
            throw InputError("config key presets must be an array of strings");
        config.presets.clear();
        for (auto const& item: *list)
        {
            auto const v = item.value<std::string>();
            if (!v)
                throw InputError("config key presets must be an array of strings");
            config.presets.push_back(*v);
        }
    }
    if (auto const* e = subtable(table, "episode", ""))
    {
        rejectUnknown(*e, { "max_turns", "expand_kind", "temperature", "max_tokens", "zoom_scale" }, "episode.");
        read(*e, "max_turns", config.episode.maxTurns, "episode.");
        auto kind = std::string(toString(config.episode.expandKind));
        read(*e, "expand_kind", kind, "episode.");
        config.episode.expandKind = expandKindFromString(kind);
        read(*e, "temperature", config.episode.temperature, "episode.");
        read(*e, "max_tokens", config.episode.maxTokens, "episode.");
        read(*e, "zoom_scale", config.episode.zoom.scale, "episode.");
    }
    if (auto const* p = subtable(table, "padding", ""))
    {
        rejectUnknown(*p, { "min_tokens", "max_tokens" }, "padding.");
        read(*p, "min_tokens", config.padding.lo, "padding.");
        read(*p, "max_tokens", config.padding.hi, "padding.");
    }
    if (auto const* endpoints = subtable(table, "endpoints", ""))
    {
        rejectUnknown(*endpoints, { "model", "judge", "ocr" }, "endpoints.");
        readEndpoint(*endpoints, "model", config.model);
        readEndpoint(*endpoints, "judge", config.judge);
        readEndpoint(*endpoints, "ocr", config.ocr);
    }
    return config;
}

PipelineConfig loadConfig(std::filesystem::path const& path)
{
    auto in = std::ifstream(path, std::ios::binary);
    if (!in)
        throw InputError("cannot read config " + path.string());
    auto text = std::ostringstream {};
    text << in.rdbuf();
    return parseConfig(text.str(), path.string());
}

} // namespace pagezip
