// SPDX-License-Identifier: Apache-2.0
#include <pagezip/error.hpp>
#include <pagezip/simlab/simlab.hpp>
#include <pagezip/util/parallel.hpp>
#include <pagezip/util/random.hpp>

#include <cmath>
#include <cstdio>

namespace pagezip
{

namespace
{

constexpr std::uint64_t ChunkSize = 1 << 16;

bool isProbability(double x)
{
    return x >= 0.0 && x <= 1.0; // false for NaN
}

} // namespace

void PolicySpec::validate() const
{
    if (!isProbability(pHit) || !isProbability(errHit) || !isProbability(errMiss))
        throw InputError("policy probabilities must lie in [0, 1]");
}

double expectedError(PolicySpec const& policy)
{
    policy.validate();
    return policy.pHit * policy.errHit + (1.0 - policy.pHit) * policy.errMiss;
}

double benefit(PolicySpec const& policy, double dNo)
{
    policy.validate();
    if (!isProbability(dNo))
        throw InputError("no-tool error must lie in [0, 1]");
    return policy.pHit * (dNo - policy.errHit) - (1.0 - policy.pHit) * (policy.errMiss - dNo);
}

void RegimeCurve::validate() const
{
    if (rates.empty())
        throw InputError("regime curve has no points");
    if (dNo.size() != rates.size() || pHit.size() != rates.size())
        throw InputError("regime curve columns differ in length");
    for (auto i = std::size_t { 0 }; i < rates.size(); ++i)
    {
        if (!std::isfinite(rates[i]) || (i > 0 && !(rates[i] > rates[i - 1])))
            throw InputError("compression rates must be finite and strictly increasing");
        if (!isProbability(dNo[i]) || !isProbability(pHit[i]))
            throw InputError("regime curve values must lie in [0, 1]");
    }
}

SweepResult sweep(RegimeCurve const& curve, double errHit, double errMiss)
{
    curve.validate();
    auto result = SweepResult {};
    result.positiveEverywhere = true;
    for (auto i = std::size_t { 0 }; i < curve.rates.size(); ++i)
    {
        auto const policy = PolicySpec { .pHit = curve.pHit[i], .errHit = errHit, .errMiss = errMiss };
        auto const row = SweepRow { .rate = curve.rates[i],
                                    .dNo = curve.dNo[i],
                                    .pHit = curve.pHit[i],
                                    .expectedError = expectedError(policy),
                                    .benefit = benefit(policy, curve.dNo[i]) };
        if (row.benefit <= 0)
            result.positiveEverywhere = false;
        if (i > 0 && !result.crossoverRate && row.benefit > 0 && result.rows.back().benefit <= 0)
            result.crossoverRate = row.rate;
        result.rows.push_back(row);
    }
    return result;
}

std::string sweepCsv(SweepResult const& result)
{
    auto out = std::string("rate,d_no,p,expected_error,benefit\n");
    char line[160];
    for (auto const& r: result.rows)
    {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.rate, r.dNo, r.pHit, r.expectedError, r.benefit);
        out += line;
    }
    return out;
}

double SimulationResult::noToolErrorRate() const noexcept
{
    return trials == 0 ? 0.0 : static_cast<double>(noToolErrors) / static_cast<double>(trials);
}

double SimulationResult::withToolErrorRate() const noexcept
{
    return trials == 0 ? 0.0 : static_cast<double>(withToolErrors) / static_cast<double>(trials);
}

SimulationResult simulateEpisodes(PolicySpec const& policy, double dNo, std::uint64_t trials, std::uint64_t seed,
                                  int parallelism)
{
    policy.validate();
    if (!isProbability(dNo))
        throw InputError("no-tool error must lie in [0, 1]");
    if (trials == 0)
        throw InputError("simulation needs at least one trial");

    auto const chunks = (trials + ChunkSize - 1) / ChunkSize;
    auto partial = std::vector<SimulationResult>(chunks);
    parallelFor(chunks, parallelism, [&](std::size_t c) {
        auto rng = SplitMix64(deriveSeed(seed, c));
        auto const begin = c * ChunkSize;
        auto const n = std::min(ChunkSize, trials - begin);
        auto& r = partial[c];
        r.trials = n;
        for (auto i = std::uint64_t { 0 }; i < n; ++i)
        {
            r.noToolErrors += uniformUnit(rng) < dNo;
            auto const hit = uniformUnit(rng) < policy.pHit;
            r.hits += hit;
            r.withToolErrors += uniformUnit(rng) < (hit ? policy.errHit : policy.errMiss);
        }
    });

    auto total = SimulationResult {};
    for (auto const& r: partial)
    {
        total.trials += r.trials;
        total.noToolErrors += r.noToolErrors;
        total.withToolErrors += r.withToolErrors;
        total.hits += r.hits;
    }
    return total;
}

double binomialSigma(double p, std::uint64_t trials)
{
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

} // namespace pagezip
