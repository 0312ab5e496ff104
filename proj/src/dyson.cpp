#include "sbdyn/dyson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sbdyn/contour.hpp"
#include "sbdyn/pairings.hpp"
#include "sbdyn/rng.hpp"

namespace sbdyn::dyson {

namespace {

struct OrderEstimate {
    cplx mean{};
    double var_of_mean = 0.0;
    double single_sample_variance = 0.0;
    std::vector<double> chunk_variances;  // per-chunk single-sample variances
};

// one stratified order m >= 2: sample the m-fold simplex over [0, 2 tau]
OrderEstimate estimate_order(const spin::SystemSpec& system, const bath::CorrelationTable& corr,
                             double tau, int m, const pairings::PairingFamily& family,
                             long long samples, std::uint64_t seed, int threads) {
    const Mat2 h = spin::hamiltonian(system);
    const Mat2 w = pauli::z;  // system side of the coupling
    const Mat2& obs = system.observable;
    const double t_end = 2.0 * tau;
    const auto n_pairings = static_cast<double>(family.members.size());
    // i^m for even m
    const double order_phase = (m / 2) % 2 == 0 ? 1.0 : -1.0;
    double volume = 1.0;
    for (int i = 1; i <= m; ++i) volume *= t_end / i;

    auto g0 = [&](double sf, double si) -> Mat2 {
        if (sf < tau) return spin::evolve(h, sf - si);
        if (si >= tau) return spin::evolve(h, si - sf);
        return spin::evolve(h, tau - sf) * obs * spin::evolve(h, tau - si);
    };

    int n_chunks = mc::chunk_count(samples);
    std::vector<mc::ScalarAccumulator> partials(n_chunks);

    mc::run_chunks(n_chunks, threads, [&](int chunk) {
        RngStream rng = RngStream::keyed(seed, static_cast<std::uint64_t>(m),
                                         static_cast<std::uint64_t>(chunk));
        std::vector<double> s(m);
        mc::ScalarAccumulator acc;
        for (long long i = mc::chunk_begin(chunk); i < mc::chunk_end(chunk, samples); ++i) {
            for (double& x : s) x = rng.uniform(0.0, t_end);
            std::sort(s.begin(), s.end());
            const pairings::Pairing& q =
                family.members[family.members.size() == 1 ? 0 : rng.below(family.members.size())];

            cplx bath_product(1.0, 0.0);
            for (const auto& [a, b] : q.pairs) bath_product *= corr.contour(s[a], s[b], tau);

            Mat2 u = g0(t_end, s[m - 1]);
            for (int k = m - 1; k > 0; --k) u = u * w * g0(s[k], s[k - 1]);
            u = u * w * g0(s[0], 0.0);

            double sign = contour::sign_parity(s, tau) * order_phase;
            acc.add(sign * bath_product * trace(system.rho * u));
        }
        partials[chunk] = acc;
    });

    mc::ScalarAccumulator total;
    OrderEstimate est;
    est.chunk_variances.reserve(n_chunks);
    double scale = volume * n_pairings;
    for (const auto& p : partials) {
        total.merge(p);
        est.chunk_variances.push_back(scale * scale * p.sample_variance());
    }
    est.mean = scale * total.mean();
    est.single_sample_variance = scale * scale * total.sample_variance();
    est.var_of_mean = est.single_sample_variance / static_cast<double>(total.count);
    return est;
}

cplx order_zero(const spin::SystemSpec& system, double tau) {
    return spin::expectation(system.rho, spin::bare_propagator(system, 2.0 * tau, 0.0, tau));
}

void check_truncation(int truncation) {
    if (truncation < 0 || truncation % 2 != 0 || truncation > 8)
        throw std::invalid_argument("bare dQMC: truncation must be even and <= 8");
}

}  // namespace

mc::MCEstimate bare_observable(const spin::SystemSpec& system, const bath::CorrelationTable& corr,
                               double tau, int truncation, long long samples_per_order,
                               std::uint64_t seed, int threads) {
    check_truncation(truncation);
    if (tau <= 0.0) throw std::invalid_argument("bare dQMC: tau must be positive");

    mc::MCEstimate out;
    out.mean = order_zero(system, tau);
    out.samples = 1;
    double var = 0.0;
    for (int m = 2; m <= truncation; m += 2) {
        pairings::PairingFamily family = pairings::enumerate_pairings(m);
        OrderEstimate est =
            estimate_order(system, corr, tau, m, family, samples_per_order, seed, threads);
        out.mean += est.mean;
        var += est.var_of_mean;
        out.samples += samples_per_order;
    }
    out.std_error = std::sqrt(var);
    return out;
}

std::vector<VariancePoint> variance_profile(const spin::SystemSpec& system,
                                            const bath::CorrelationTable& corr,
                                            std::span<const double> lengths, int truncation,
                                            long long samples_per_order, std::uint64_t seed,
                                            int threads) {
    check_truncation(truncation);
    double cb = corr.c_b();
    std::vector<VariancePoint> points;
    points.reserve(lengths.size());
    for (double len : lengths) {
        VariancePoint pt;
        pt.length = len;
        pt.envelope = std::exp(cb * cb * len * len / 2.0) - 1.0;
        pt.variance = 0.0;
        pt.variance_sigma = 0.0;
        if (len > 0.0) {
            double tau = len / 2.0;
            std::vector<double> chunk_totals;
            for (int m = 2; m <= truncation; m += 2) {
                pairings::PairingFamily family = pairings::enumerate_pairings(m);
                OrderEstimate est = estimate_order(system, corr, tau, m, family,
                                                   samples_per_order, seed, threads);
                pt.variance += est.single_sample_variance;
                if (chunk_totals.empty()) chunk_totals.assign(est.chunk_variances.size(), 0.0);
                for (std::size_t c = 0; c < est.chunk_variances.size(); ++c)
                    chunk_totals[c] += est.chunk_variances[c];
            }
            if (chunk_totals.size() > 1) {
                double mean = 0.0;
                for (double v : chunk_totals) mean += v;
                mean /= static_cast<double>(chunk_totals.size());
                double ss = 0.0;
                for (double v : chunk_totals) ss += (v - mean) * (v - mean);
                auto j = static_cast<double>(chunk_totals.size());
                pt.variance_sigma = std::sqrt(ss / (j - 1.0) / j);
            }
        }
        points.push_back(pt);
    }
    return points;
}

}  // namespace sbdyn::dyson
