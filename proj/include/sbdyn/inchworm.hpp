// Integro-differential solver for the full propagator on the unfolded
// contour. The table is filled column by column with a two-stage
// second-order step (Heun or exponential Heun); the memory integral over
// connected diagrams is evaluated either by a composite midpoint rule
// (truncation 1) or by Monte Carlo over sorted uniform time points and
// uniformly drawn connected pairings.

#pragma once

#include <cstdint>
#include <vector>

#include "sbdyn/bath.hpp"
#include "sbdyn/contour.hpp"
#include "sbdyn/pairings.hpp"
#include "sbdyn/spin.hpp"

namespace sbdyn::inchworm {

enum class SumMode { quadrature, monte_carlo };
enum class Integrator { heun, exponential_heun };

struct SolveSpec {
    int truncation = 1;  // M, odd; quadrature mode requires 1
    SumMode mode = SumMode::quadrature;
    Integrator integrator = Integrator::heun;
    long long samples_per_order = 10000;  // per entry, stage and order
    int connected_cap = 9;
    std::uint64_t seed = 0;
    int threads = 1;

    void validate() const;
};

struct DiagramParams {
    const spin::SystemSpec* system;
    const bath::CorrelationTable* corr;
    const pairings::ConnectedSampler* sampler;
    int truncation;
    SumMode mode;
    long long samples_per_order;
    int threads;
};

// Sum over odd orders m <= M of
//   i^(m+1) Int_{head > s_m > ... > s_1 > base} sum_{connected q}
//   (-1)^(#{s < t}) Prod B * W G_I(head, s_m) W ... W G_I(s_1, base) ds,
// where the pairings q run over connected matchings of the s_k plus the
// head. head_row/base_col are storage indices into the table; an empty
// window yields zero. variance_out (optional) receives the summed variance
// of the Monte Carlo mean, entrywise.
Mat2 connected_sum(const contour::PropagatorTable& table, int head_row, int base_col,
                   const DiagramParams& params, std::uint64_t stream_key,
                   double* variance_out = nullptr);

struct SolveResult {
    contour::PropagatorTable table;
    std::vector<double> entry_std_error;  // same triangular layout as the table

    double std_error_at(int r, int c) const {
        return entry_std_error[static_cast<std::size_t>(r) * (r + 1) / 2 + c];
    }
};

SolveResult solve(const spin::SystemSpec& system, const bath::CorrelationTable& corr,
                  const SolveSpec& spec, int n_steps, double dt);

}  // namespace sbdyn::inchworm
