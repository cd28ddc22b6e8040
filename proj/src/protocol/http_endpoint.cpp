// SPDX-License-Identifier: Apache-2.0
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <pagezip/error.hpp>
#include <pagezip/protocol/endpoints.hpp>

#include <httplib.h>
#include <openssl/evp.h>

#include <cstdlib>

namespace pagezip
{

namespace
{

struct SplitUrl
{
    std::string origin; // scheme://host[:port]
    std::string path;
};

SplitUrl splitUrl(std::string const& url)
{
    auto const scheme = url.find("://");
    if (scheme == std::string::npos || (!url.starts_with("http://") && !url.starts_with("https://")))
        throw InputError("endpoint url must start with http:// or https://: '" + url + "'");
    auto const slash = url.find('/', scheme + 3);
    if (slash == std::string::npos)
        return { url, "/" };
    return { url.substr(0, slash), url.substr(slash) };
}

httplib::Headers authHeaders(EndpointDescriptor const& d)
{
    auto headers = httplib::Headers {};
    if (!d.apiKeyEnv.empty())
        if (auto const* key = std::getenv(d.apiKeyEnv.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);
    return headers;
}

httplib::Result post(EndpointDescriptor const& d, std::string const& body, std::string const& contentType)
{
    auto const [origin, path] = splitUrl(d.url);
    auto client = httplib::Client(origin);
    client.set_connection_timeout(d.timeoutSeconds, 0);
    client.set_read_timeout(d.timeoutSeconds, 0);
    client.set_write_timeout(d.timeoutSeconds, 0);
    auto result = client.Post(path, authHeaders(d), body, contentType);
    if (!result)
        throw EndpointError("request to " + d.url + " failed: " + httplib::to_string(result.error()));
    if (result->status < 200 || result->status >= 300)
    {
        auto snippet = result->body.substr(0, 300);
        throw EndpointError("endpoint " + d.url + " returned HTTP " + std::to_string(result->status) + ": " + snippet,
                            result->status);
    }
    return result;
}

nlohmann::json wireContent(ChatMessage const& message)
{
    auto parts = std::vector<ContentPart> {};
    if (message.role == Role::Tool)
        parts.push_back(ContentPart::makeText("<tool_response>\n"));
    parts.insert(parts.end(), message.parts.begin(), message.parts.end());
    if (message.role == Role::Tool)
        parts.push_back(ContentPart::makeText("\n</tool_response>"));

    if (message.imageCount() == 0)
    {
        auto text = std::string {};
        for (auto const& p: parts)
            text += p.text;
        return text;
    }

    auto content = nlohmann::json::array();
    auto pendingText = std::string {};
    auto flush = [&] {
        if (!pendingText.empty())
            content.push_back({ { "type", "text" }, { "text", pendingText } });
        pendingText.clear();
    };
    for (auto const& p: parts)
    {
        if (p.kind == ContentPart::Kind::Text)
        {
            pendingText += p.text;
            continue;
        }
        if (!p.png)
            throw EndpointError("image '" + p.text + "' has no pixel data attached");
        flush();
        content.push_back({ { "type", "image_url" },
                            { "image_url", { { "url", "data:image/png;base64," + base64Encode(*p.png) } } } });
    }
    flush();
    return content;
}

} // namespace

std::string base64Encode(std::string const& bytes)
{
    auto out = std::string(4 * ((bytes.size() + 2) / 3), '\0');
    auto const n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                   reinterpret_cast<unsigned char const*>(bytes.data()),
                                   static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

HttpChatEndpoint::HttpChatEndpoint(EndpointDescriptor descriptor): _descriptor(std::move(descriptor))
{
    (void) splitUrl(_descriptor.url);
}

nlohmann::json HttpChatEndpoint::requestBody(ChatRequest const& request) const
{
    auto messages = nlohmann::json::array();
    for (auto const& m: request.messages)
    {
        auto const role = m.role == Role::Tool ? std::string("user") : std::string(toString(m.role));
        messages.push_back({ { "role", role }, { "content", wireContent(m) } });
    }
    auto body = nlohmann::json {
        { "model", _descriptor.model },
        { "messages", std::move(messages) },
        { "temperature", request.temperature },
        { "max_tokens", request.maxTokens },
    };
    if (request.seed)
        body["seed"] = *request.seed;
    return body;
}

std::string HttpChatEndpoint::complete(ChatRequest const& request)
{
    auto const result = post(_descriptor, requestBody(request).dump(), "application/json");
    auto const reply = nlohmann::json::parse(result->body, nullptr, false);
    if (reply.is_discarded())
        throw EndpointError("endpoint " + _descriptor.url + " returned a non-JSON body");
    auto const choices = reply.find("choices");
    if (choices == reply.end() || !choices->is_array() || choices->empty())
        throw EndpointError("endpoint reply has no choices");
    auto const& message = (*choices)[0].value("message", nlohmann::json::object());
    auto content = message.contains("content") && message["content"].is_string() ? message["content"].get<std::string>()
                                                                                   : std::string {};
    // Servers that split reasoning out of the content field get it folded back in.
    if (message.contains("reasoning_content") && message["reasoning_content"].is_string())
        content = "<think>" + message["reasoning_content"].get<std::string>() + "</think>\n" + content;
    return content;
}

HttpOcrEndpoint::HttpOcrEndpoint(EndpointDescriptor descriptor): _descriptor(std::move(descriptor))
{
    (void) splitUrl(_descriptor.url);
}

std::string HttpOcrEndpoint::recognize(std::string const& png)
{
    auto const result = post(_descriptor, png, "image/png");
    auto const reply = nlohmann::json::parse(result->body, nullptr, false);
    if (!reply.is_discarded() && reply.is_object() && reply.contains("text") && reply["text"].is_string())
        return reply["text"].get<std::string>();
    return result->body;
}

} // namespace pagezip
