// SPDX-License-Identifier: Apache-2.0
#include <pagezip/error.hpp>
#include <pagezip/ledger/ledger.hpp>

#include <cstdio>

namespace pagezip
{

std::string_view toString(ExpansionKind kind) noexcept
{
    switch (kind)
    {
        case ExpansionKind::Text: return "text";
        case ExpansionKind::OcrText: return "ocr_text";
        case ExpansionKind::Image: return "image";
    }
    return "text";
}

ExpansionKind expansionKindFromString(std::string_view name)
{
    if (name == "text")
        return ExpansionKind::Text;
    if (name == "ocr_text")
        return ExpansionKind::OcrText;
    if (name == "image")
        return ExpansionKind::Image;
    throw InputError("unknown expansion kind '" + std::string(name) + "'");
}

TokenLedger::TokenLedger(std::int64_t sourceTokens, std::int64_t initialVisualTokens):
    _sourceTokens(sourceTokens), _initialVisualTokens(initialVisualTokens)
{
    if (sourceTokens < 0 || initialVisualTokens < 0)
        throw InputError("token counts must be non-negative");
}

void TokenLedger::append(Expansion expansion)
{
    if (expansion.tokens <= 0)
        throw InputError("an expansion must cost at least one token");
    _expansionTokens += expansion.tokens;
    _expansions.push_back(expansion);
}

double icr(TokenLedger const& ledger)
{
    if (ledger.initialVisualTokens() == 0)
        throw UndefinedRatio("ICR undefined: no visual tokens");
    return static_cast<double>(ledger.sourceTokens()) / static_cast<double>(ledger.initialVisualTokens());
}

double ecr(TokenLedger const& ledger)
{
    if (ledger.readerTotal() == 0)
        throw UndefinedRatio("ECR undefined: reader processed no tokens");
    return static_cast<double>(ledger.sourceTokens()) / static_cast<double>(ledger.readerTotal());
}

std::int64_t kvBytes(std::int64_t tokens, std::int64_t bytesPerToken)
{
    if (tokens < 0 || bytesPerToken < 0)
        throw InputError("token and byte counts must be non-negative");
    return tokens * bytesPerToken;
}

double toMiB(std::int64_t bytes) noexcept
{
    return static_cast<double>(bytes) / (1024.0 * 1024.0);
}

std::string formatMiB(std::int64_t bytes)
{
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.1f", toMiB(bytes));
    return buffer;
}

double reductionPercent(std::int64_t baselineTokens, std::int64_t methodTokens)
{
    if (baselineTokens == 0)
        throw UndefinedRatio("reduction undefined for a zero baseline");
    return 100.0 * (1.0 - static_cast<double>(methodTokens) / static_cast<double>(baselineTokens));
}

LedgerSummary summarize(std::span<TokenLedger const> ledgers)
{
    auto s = LedgerSummary {};
    s.episodes = ledgers.size();
    if (ledgers.empty())
        return s;
    for (auto const& l: ledgers)
    {
        s.sourceTokens += l.sourceTokens();
        s.initialVisualTokens += l.initialVisualTokens();
        s.readerTokens += l.readerTotal();
        s.expansions += l.expansions().size();
        s.meanIcr += icr(l);
        s.meanEcr += ecr(l);
    }
    auto const n = static_cast<double>(ledgers.size());
    s.meanIcr /= n;
    s.meanEcr /= n;
    s.meanExpansions = static_cast<double>(s.expansions) / n;
    s.pooledIcr = static_cast<double>(s.sourceTokens) / static_cast<double>(s.initialVisualTokens);
    s.pooledEcr = static_cast<double>(s.sourceTokens) / static_cast<double>(s.readerTokens);
    return s;
}

void to_json(nlohmann::json& j, TokenLedger const& ledger)
{
    j = nlohmann::json {
        { "source_tokens", ledger.sourceTokens() },
        { "initial_visual_tokens", ledger.initialVisualTokens() },
        { "expansions", nlohmann::json::array() },
    };
    for (auto const& e: ledger.expansions())
        j["expansions"].push_back({ { "turn", e.turn },
                                    { "kind", toString(e.kind) },
                                    { "tokens", e.tokens },
                                    { "image", e.imageIndex } });
}

void from_json(nlohmann::json const& j, TokenLedger& ledger)
{
    ledger = TokenLedger(j.at("source_tokens").get<std::int64_t>(), j.at("initial_visual_tokens").get<std::int64_t>());
    for (auto const& e: j.at("expansions"))
        ledger.append(Expansion { .turn = e.at("turn").get<int>(),
                                  .kind = expansionKindFromString(e.at("kind").get<std::string>()),
                                  .tokens = e.at("tokens").get<std::int64_t>(),
                                  .imageIndex = e.at("image").get<int>() });
}

} // namespace pagezip
