// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace pagezip
{

/// Measures text length in reader tokens. Implementations are pure and
/// thread-safe; count("") is 0.
class TokenCounter
{
  public:
    virtual ~TokenCounter() = default;
    [[nodiscard]] virtual std::int64_t count(std::string_view utf8) const = 0;
    [[nodiscard]] virtual std::string name() const = 0;
};

/// ceil(code points / charsPerToken). The default approximation uses 4.
class CharRatioCounter final: public TokenCounter
{
  public:
    explicit CharRatioCounter(int charsPerToken = 4);
    [[nodiscard]] std::int64_t count(std::string_view utf8) const override;
    [[nodiscard]] std::string name() const override;

  private:
    int _charsPerToken;
};

/// Number of whitespace-separated words.
class WhitespaceCounter final: public TokenCounter
{
  public:
    [[nodiscard]] std::int64_t count(std::string_view utf8) const override;
    [[nodiscard]] std::string name() const override { return "whitespace"; }
};

/// "chars/4" (default), "chars/N" or "whitespace". Throws InputError.
[[nodiscard]] std::shared_ptr<TokenCounter const> makeTokenCounter(std::string_view name);

[[nodiscard]] std::shared_ptr<TokenCounter const> defaultTokenCounter();

} // namespace pagezip
