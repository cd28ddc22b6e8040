// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pagezip
{

enum class ExpansionKind
{
    Text,
    OcrText,
    Image,
};

[[nodiscard]] std::string_view toString(ExpansionKind kind) noexcept;
/// "text", "ocr_text" or "image". Throws InputError.
[[nodiscard]] ExpansionKind expansionKindFromString(std::string_view name);

struct Expansion
{
    int turn = 0;       // 1-based turn that issued the call
    ExpansionKind kind = ExpansionKind::Text;
    std::int64_t tokens = 0;
    int imageIndex = 0; // 1-based page that was expanded

    friend bool operator==(Expansion const&, Expansion const&) = default;
};

/// Every token of source-derived content the reader processes in one episode:
/// the initial page images plus each Expand payload. Prompts, the question and
/// generated reasoning are not counted.
class TokenLedger
{
  public:
    TokenLedger() = default;
    /// Throws InputError for negative counts.
    TokenLedger(std::int64_t sourceTokens, std::int64_t initialVisualTokens);

    /// Appends one expansion; the cost must be strictly positive.
    void append(Expansion expansion);

    [[nodiscard]] std::int64_t sourceTokens() const noexcept { return _sourceTokens; }
    [[nodiscard]] std::int64_t initialVisualTokens() const noexcept { return _initialVisualTokens; }
    [[nodiscard]] std::vector<Expansion> const& expansions() const noexcept { return _expansions; }
    [[nodiscard]] std::int64_t expansionTokens() const noexcept { return _expansionTokens; }
    [[nodiscard]] std::int64_t readerTotal() const noexcept { return _initialVisualTokens + _expansionTokens; }

    friend bool operator==(TokenLedger const&, TokenLedger const&) = default;

  private:
    std::int64_t _sourceTokens = 0;
    std::int64_t _initialVisualTokens = 0;
    std::int64_t _expansionTokens = 0;
    std::vector<Expansion> _expansions;
};

/// Input compression rate N / sum(n_k). Throws UndefinedRatio without visual tokens.
[[nodiscard]] double icr(TokenLedger const& ledger);

/// Effective compression rate N / reader_total. Throws UndefinedRatio when reader_total is 0.
[[nodiscard]] double ecr(TokenLedger const& ledger);

/// Two bytes (K and V) per layer, KV head and head dimension element.
[[nodiscard]] constexpr std::int64_t kvBytesPerToken(int layers, int kvHeads, int headDim, int bytesPerElement) noexcept
{
    return std::int64_t { 2 } * layers * kvHeads * headDim * bytesPerElement;
}

/// 8 full-attention layers, 4 KV heads, head_dim 256, bf16.
inline constexpr std::int64_t DefaultKvBytesPerToken = kvBytesPerToken(8, 4, 256, 2);

/// tokens * bytesPerToken. Throws InputError for negative arguments.
[[nodiscard]] std::int64_t kvBytes(std::int64_t tokens, std::int64_t bytesPerToken = DefaultKvBytesPerToken);

[[nodiscard]] double toMiB(std::int64_t bytes) noexcept;

/// MiB with one decimal, e.g. "71.5".
[[nodiscard]] std::string formatMiB(std::int64_t bytes);

/// 100 * (1 - method / baseline). Throws UndefinedRatio for a zero baseline.
[[nodiscard]] double reductionPercent(std::int64_t baselineTokens, std::int64_t methodTokens);

/// Benchmark-level compression. Both averaging conventions are reported
/// because per-sample means and ratios of sums differ when N varies.
struct LedgerSummary
{
    std::size_t episodes = 0;
    std::int64_t sourceTokens = 0;
    std::int64_t initialVisualTokens = 0;
    std::int64_t readerTokens = 0;
    std::size_t expansions = 0;
    double meanIcr = 0;        // mean of per-episode ratios
    double meanEcr = 0;        // mean of per-episode ratios
    double pooledIcr = 0;      // sum N / sum visual
    double pooledEcr = 0;      // sum N / sum reader
    double meanExpansions = 0; // Expand calls per episode
};

/// Throws UndefinedRatio if any ledger has a zero reader total. Empty input yields zeros.
[[nodiscard]] LedgerSummary summarize(std::span<TokenLedger const> ledgers);

void to_json(nlohmann::json& j, TokenLedger const& ledger);
void from_json(nlohmann::json const& j, TokenLedger& ledger);

} // namespace pagezip
