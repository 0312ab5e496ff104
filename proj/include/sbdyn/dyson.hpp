// Bare diagrammatic Monte Carlo: truncated series expansion of <O(tau)>
// over the whole contour [0, 2 tau] in powers of the coupling, sampled order
// by order, plus the variance-vs-contour-length diagnostic that exhibits the
// dynamical sign problem.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbdyn/bath.hpp"
#include "sbdyn/mc.hpp"
#include "sbdyn/spin.hpp"

namespace sbdyn::dyson {

// Estimate of <O(tau)> with the series truncated at even order M. Orders are
// stratified: the order-0 term is exact, every higher even order gets
// samples_per_order samples; per-sample weight is the simplex volume times
// the pairing-family multiplicity (m-1)!!.
mc::MCEstimate bare_observable(const spin::SystemSpec& system, const bath::CorrelationTable& corr,
                               double tau, int truncation, long long samples_per_order,
                               std::uint64_t seed, int threads = 1);

struct VariancePoint {
    double length;        // contour length Sf - Si
    double variance;      // empirical per-sample variance of the bare estimator
    double variance_sigma;  // chunk-estimate of the std error of `variance`
    double envelope;      // exp(C_b^2 length^2 / 2) - 1
};

std::vector<VariancePoint> variance_profile(const spin::SystemSpec& system,
                                            const bath::CorrelationTable& corr,
                                            std::span<const double> lengths, int truncation,
                                            long long samples_per_order, std::uint64_t seed,
                                            int threads = 1);

}  // namespace sbdyn::dyson
