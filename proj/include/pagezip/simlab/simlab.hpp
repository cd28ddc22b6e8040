// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pagezip
{

/// Selection policy: probability that every evidence page is expanded, and
/// the answer error rate in the hit and miss cases.
struct PolicySpec
{
    double pHit = 0;
    double errHit = 0;
    double errMiss = 0;

    /// Throws InputError unless every field lies in [0, 1].
    void validate() const;
};

/// p*errHit + (1-p)*errMiss.
[[nodiscard]] double expectedError(PolicySpec const& policy);

/// p*(dNo - errHit) - (1-p)*(errMiss - dNo), the error removed by selective
/// expansion relative to reading the compressed pages directly.
[[nodiscard]] double benefit(PolicySpec const& policy, double dNo);

/// Measured points: no-tool error and selection probability per compression rate.
struct RegimeCurve
{
    std::vector<double> rates; // strictly increasing
    std::vector<double> dNo;
    std::vector<double> pHit;

    /// Throws InputError for empty or ragged data, a non-increasing grid or
    /// values outside [0, 1].
    void validate() const;
};

struct SweepRow
{
    double rate = 0;
    double dNo = 0;
    double pHit = 0;
    double expectedError = 0;
    double benefit = 0;
};

struct SweepResult
{
    std::vector<SweepRow> rows;
    /// First rate where benefit becomes positive after a non-positive rate.
    std::optional<double> crossoverRate;
    bool positiveEverywhere = false;
};

[[nodiscard]] SweepResult sweep(RegimeCurve const& curve, double errHit, double errMiss);

/// CSV with header rate,d_no,p,expected_error,benefit.
[[nodiscard]] std::string sweepCsv(SweepResult const& result);

struct SimulationResult
{
    std::uint64_t trials = 0;
    std::uint64_t noToolErrors = 0;
    std::uint64_t withToolErrors = 0;
    std::uint64_t hits = 0;

    [[nodiscard]] double noToolErrorRate() const noexcept;
    [[nodiscard]] double withToolErrorRate() const noexcept;

    friend bool operator==(SimulationResult const&, SimulationResult const&) = default;
};

/// Monte-Carlo episodes: each trial draws a no-tool error with probability
/// dNo and, independently, a hit with probability pHit followed by an error
/// with errHit or errMiss. Trials run in fixed-size chunks with seeds derived
/// from (seed, chunk), so the result does not depend on `parallelism`.
/// Throws InputError when trials is 0 or inputs are out of range.
[[nodiscard]] SimulationResult simulateEpisodes(PolicySpec const& policy, double dNo, std::uint64_t trials,
                                                std::uint64_t seed, int parallelism = 1);

/// Standard deviation of a rate estimated from `trials` Bernoulli draws.
[[nodiscard]] double binomialSigma(double p, std::uint64_t trials);

} // namespace pagezip
