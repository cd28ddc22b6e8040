// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pagezip/protocol/chat.hpp>

#include <memory>
#include <string>
#include <vector>

namespace pagezip
{

/// Where a model, judge or OCR service lives. A url of the form "mock:..."
/// selects a built-in mock instead of HTTP (see makeChatEndpointFactory).
struct EndpointDescriptor
{
    std::string url;          // http(s)://host[:port]/path, or mock:<name>[:arg]
    std::string model;        // "model" field of the request body
    std::string apiKeyEnv;    // env var holding a bearer token; empty for none
    int timeoutSeconds = 300;
};

/// OpenAI-compatible chat/completions client. Images travel as base64 PNG
/// data URLs. Tool messages are sent as user turns wrapped in
/// <tool_response> tags, the convention of Qwen-style chat templates.
class HttpChatEndpoint final: public ChatEndpoint
{
  public:
    explicit HttpChatEndpoint(EndpointDescriptor descriptor);
    [[nodiscard]] std::string complete(ChatRequest const& request) override;

    /// The JSON body complete() would POST.
    [[nodiscard]] nlohmann::json requestBody(ChatRequest const& request) const;

  private:
    EndpointDescriptor _descriptor;
};

/// POSTs image/png and accepts {"text": ...} JSON or a plain-text reply.
class HttpOcrEndpoint final: public OcrEndpoint
{
  public:
    explicit HttpOcrEndpoint(EndpointDescriptor descriptor);
    [[nodiscard]] std::string recognize(std::string const& png) override;

  private:
    EndpointDescriptor _descriptor;
};

[[nodiscard]] std::string base64Encode(std::string const& bytes);

/// Replays fixed replies in order; throws EndpointError once they run out.
class ScriptedEndpoint final: public ChatEndpoint
{
  public:
    explicit ScriptedEndpoint(std::vector<std::string> replies);
    [[nodiscard]] std::string complete(ChatRequest const& request) override;

    /// Every request received so far.
    [[nodiscard]] std::vector<ChatRequest> const& requests() const noexcept { return _requests; }

  private:
    std::vector<std::string> _replies;
    std::size_t _next = 0;
    std::vector<ChatRequest> _requests;
};

/// Calls the tool on every turn, cycling through pages 1..K.
class AlwaysExpandEndpoint final: public ChatEndpoint
{
  public:
    AlwaysExpandEndpoint(std::string toolName, int pageCount);
    [[nodiscard]] std::string complete(ChatRequest const& request) override;

  private:
    std::string _toolName;
    int _pageCount;
    int _turn = 0;
};

/// Expands each evidence page once, then answers with the first gold answer.
class OracleEndpoint final: public ChatEndpoint
{
  public:
    OracleEndpoint(std::string toolName, EpisodeContext context);
    [[nodiscard]] std::string complete(ChatRequest const& request) override;

  private:
    std::string _toolName;
    EpisodeContext _context;
    std::size_t _turn = 0;
};

/// Judge stand-in: [[YES]] when the model answer block contains a gold
/// answer (ASCII case-insensitive), else [[NO]].
class ExactMatchJudge final: public ChatEndpoint
{
  public:
    [[nodiscard]] std::string complete(ChatRequest const& request) override;
};

/// Always throws EndpointError with the given HTTP status.
class FailingEndpoint final: public ChatEndpoint
{
  public:
    explicit FailingEndpoint(int httpStatus): _status(httpStatus) {}
    [[nodiscard]] std::string complete(ChatRequest const& request) override;

  private:
    int _status;
};

/// Builds a per-episode endpoint factory. Mock urls:
///   mock:answer[:TEXT]      answers immediately (default TEXT "unknown")
///   mock:always_expand      calls the tool on every turn
///   mock:oracle             expands the evidence pages, then answers gold[0]
///   mock:script:PATH        JSON {"<sample id>" or "*": [replies...]}
///   mock:reply:TEXT         always returns TEXT (e.g. [[YES]] for a judge)
///   mock:exact_match        judge by case-insensitive substring
///   mock:fail:STATUS        every call fails with that HTTP status
/// toolName is the tool the mocks call (read_text or zoom_in).
/// Throws InputError for an unknown mock or an unreadable script.
[[nodiscard]] ChatEndpointFactory makeChatEndpointFactory(EndpointDescriptor const& descriptor,
                                                          std::string const& toolName = "read_text");

/// mock:text:TEXT returns a fixed string; anything else is HTTP.
[[nodiscard]] OcrEndpointFactory makeOcrEndpointFactory(EndpointDescriptor const& descriptor);

} // namespace pagezip
