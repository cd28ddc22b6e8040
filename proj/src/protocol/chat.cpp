// SPDX-License-Identifier: Apache-2.0
#include <pagezip/error.hpp>
#include <pagezip/protocol/chat.hpp>

#include <algorithm>

namespace pagezip
{

std::string_view toString(Role role) noexcept
{
    switch (role)
    {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
        case Role::Tool: return "tool";
    }
    return "user";
}

Role roleFromString(std::string_view name)
{
    if (name == "system")
        return Role::System;
    if (name == "user")
        return Role::User;
    if (name == "assistant")
        return Role::Assistant;
    if (name == "tool")
        return Role::Tool;
    throw InputError("unknown message role '" + std::string(name) + "'");
}

ContentPart ContentPart::makeText(std::string text)
{
    return ContentPart { .kind = Kind::Text, .text = std::move(text), .png = {} };
}

ContentPart ContentPart::makeImage(std::string ref, std::shared_ptr<std::string const> png)
{
    return ContentPart { .kind = Kind::Image, .text = std::move(ref), .png = std::move(png) };
}

ChatMessage ChatMessage::make(Role role, std::vector<ContentPart> parts)
{
    return ChatMessage { .role = role,
                         .parts = std::move(parts),
                         .loss = role == Role::Assistant ? LossFlag::ModelProduced : LossFlag::ContextOnly };
}

ChatMessage ChatMessage::makeText(Role role, std::string text)
{
    auto parts = std::vector<ContentPart> {};
    parts.push_back(ContentPart::makeText(std::move(text)));
    return make(role, std::move(parts));
}

std::string ChatMessage::text() const
{
    auto out = std::string {};
    for (auto const& p: parts)
        if (p.kind == ContentPart::Kind::Text)
            out += p.text;
    return out;
}

std::size_t ChatMessage::imageCount() const
{
    return static_cast<std::size_t>(
        std::ranges::count_if(parts, [](auto const& p) { return p.kind == ContentPart::Kind::Image; }));
}

void to_json(nlohmann::json& j, ContentPart const& part)
{
    if (part.kind == ContentPart::Kind::Text)
        j = { { "type", "text" }, { "text", part.text } };
    else
        j = { { "type", "image" }, { "image", part.text } };
}

void from_json(nlohmann::json const& j, ContentPart& part)
{
    auto const type = j.at("type").get<std::string>();
    if (type == "text")
        part = ContentPart::makeText(j.at("text").get<std::string>());
    else if (type == "image")
        part = ContentPart::makeImage(j.at("image").get<std::string>());
    else
        throw InputError("unknown content part type '" + type + "'");
}

void to_json(nlohmann::json& j, ChatMessage const& message)
{
    j = { { "role", toString(message.role) },
          { "content", message.parts },
          { "loss", message.loss == LossFlag::ModelProduced } };
}

void from_json(nlohmann::json const& j, ChatMessage& message)
{
    message.role = roleFromString(j.at("role").get<std::string>());
    message.parts = j.at("content").get<std::vector<ContentPart>>();
    message.loss = j.at("loss").get<bool>() ? LossFlag::ModelProduced : LossFlag::ContextOnly;
}

} // namespace pagezip
