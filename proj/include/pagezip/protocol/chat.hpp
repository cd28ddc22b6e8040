// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pagezip
{

enum class Role
{
    System,
    User,
    Assistant,
    Tool,
};

[[nodiscard]] std::string_view toString(Role role) noexcept;
[[nodiscard]] Role roleFromString(std::string_view name);

/// One piece of message content. Images carry a stable reference (used in
/// serialized records) and, while an episode runs, the encoded PNG itself.
struct ContentPart
{
    enum class Kind
    {
        Text,
        Image,
    };

    Kind kind = Kind::Text;
    std::string text;                          // text, or the image reference
    std::shared_ptr<std::string const> png {}; // not serialized

    [[nodiscard]] static ContentPart makeText(std::string text);
    [[nodiscard]] static ContentPart makeImage(std::string ref, std::shared_ptr<std::string const> png = {});

    /// Compares kind and text; the attached bytes are a transport detail.
    friend bool operator==(ContentPart const& a, ContentPart const& b) { return a.kind == b.kind && a.text == b.text; }
};

enum class LossFlag
{
    ModelProduced,
    ContextOnly,
};

struct ChatMessage
{
    Role role = Role::User;
    std::vector<ContentPart> parts;
    LossFlag loss = LossFlag::ContextOnly;

    /// Assistant messages are model-produced, everything else is context.
    [[nodiscard]] static ChatMessage make(Role role, std::vector<ContentPart> parts);
    [[nodiscard]] static ChatMessage makeText(Role role, std::string text);

    /// Concatenated text parts.
    [[nodiscard]] std::string text() const;
    [[nodiscard]] std::size_t imageCount() const;

    friend bool operator==(ChatMessage const&, ChatMessage const&) = default;
};

struct ChatRequest
{
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int maxTokens = 2048;
    std::optional<std::uint64_t> seed;
};

/// A chat-completion model. complete() returns the assistant text or throws
/// EndpointError. One instance serves one episode at a time.
class ChatEndpoint
{
  public:
    virtual ~ChatEndpoint() = default;
    [[nodiscard]] virtual std::string complete(ChatRequest const& request) = 0;
};

/// What a per-episode endpoint may know about its sample. Real endpoints
/// ignore it; scripted mocks use it to stay deterministic.
struct EpisodeContext
{
    std::string sampleId;
    std::vector<std::string> goldAnswers;
    std::vector<int> evidencePages;
    int pageCount = 0;
};

using ChatEndpointFactory = std::function<std::unique_ptr<ChatEndpoint>(EpisodeContext const&)>;

/// Image in, text out.
class OcrEndpoint
{
  public:
    virtual ~OcrEndpoint() = default;
    [[nodiscard]] virtual std::string recognize(std::string const& png) = 0;
};

using OcrEndpointFactory = std::function<std::unique_ptr<OcrEndpoint>()>;

void to_json(nlohmann::json& j, ContentPart const& part);
void from_json(nlohmann::json const& j, ContentPart& part);
void to_json(nlohmann::json& j, ChatMessage const& message);
void from_json(nlohmann::json const& j, ChatMessage& message);

} // namespace pagezip
