#include "sbdyn/inchworm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "sbdyn/mc.hpp"
#include "sbdyn/rng.hpp"

namespace sbdyn::inchworm {

namespace {

constexpr int kMaxOrder = 15;

std::uint64_t stage_key(std::uint64_t seed, int r, int c, int stage) {
    std::uint64_t x = splitmix64(seed);
    x = splitmix64(x ^ static_cast<std::uint64_t>(r));
    x = splitmix64(x ^ static_cast<std::uint64_t>(c));
    return splitmix64(x ^ static_cast<std::uint64_t>(stage));
}

int grid_index(const contour::PropagatorTable& table, int r) {
    return r <= table.row_minus() ? r : r - 1;
}

// composite midpoint evaluation of the order-1 term, one node per grid cell
Mat2 quadrature_order1(const contour::PropagatorTable& table, int head_row, int base_col,
                       const DiagramParams& params) {
    const double t = table.measurement_time();
    const double dt = table.dt();
    const double t_head = table.node_time(head_row);
    const double t_base = table.node_time(base_col);
    const Mat2 w = pauli::z;
    const int cells = grid_index(table, head_row) - grid_index(table, base_col);

    Mat2 sum = Mat2::zero();
    for (int cell = 0; cell < cells; ++cell) {
        double s = t_base + (cell + 0.5) * dt;
        // i^2 * (-1)^(#{s<t}) = +1 below t, -1 above
        double sign = s < t ? 1.0 : -1.0;
        Mat2 chain = w * table.interp_row(head_row, s) * (w * table.interp_col(s, base_col));
        sum += (sign * params.corr->contour(s, t_head, t)) * chain;
    }
    return sum * cplx(dt);
}

Mat2 monte_carlo_order(const contour::PropagatorTable& table, int head_row, int base_col,
                       int m, const DiagramParams& params, std::uint64_t stream_key,
                       double* variance_out) {
    const double t = table.measurement_time();
    const double t_head = table.node_time(head_row);
    const double t_base = table.node_time(base_col);
    const Mat2 w = pauli::z;
    const pairings::PairingFamily& family = params.sampler->family(m);
    const auto n_pairings = family.members.size();
    // i^(m+1), m odd
    const double order_phase = ((m + 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    double volume = 1.0;
    for (int i = 1; i <= m; ++i) volume *= (t_head - t_base) / i;

    const long long samples = params.samples_per_order;
    int n_chunks = mc::chunk_count(samples);
    std::vector<mc::MatAccumulator> partials(n_chunks);

    mc::run_chunks(n_chunks, params.threads, [&](int chunk) {
        RngStream rng = RngStream::keyed(stream_key, static_cast<std::uint64_t>(m),
                                         static_cast<std::uint64_t>(chunk));
        std::array<double, kMaxOrder + 1> ts{};
        mc::MatAccumulator acc;
        for (long long i = mc::chunk_begin(chunk); i < mc::chunk_end(chunk, samples); ++i) {
            for (int k = 0; k < m; ++k) ts[k] = rng.uniform(t_base, t_head);
            std::sort(ts.begin(), ts.begin() + m);
            ts[m] = t_head;
            const pairings::Pairing& q =
                n_pairings == 1 ? family.members[0] : family.members[rng.below(n_pairings)];

            cplx bath_product(1.0, 0.0);
            for (const auto& [a, b] : q.pairs) bath_product *= params.corr->contour(ts[a], ts[b], t);

            int below = 0;
            for (int k = 0; k < m; ++k)
                if (ts[k] < t) ++below;
            double sign = below % 2 == 0 ? order_phase : -order_phase;

            Mat2 chain = w * table.interp_row(head_row, ts[m - 1]);
            for (int k = m - 1; k > 0; --k) chain = chain * (w * table.interp(ts[k], ts[k - 1]));
            chain = chain * (w * table.interp_col(ts[0], base_col));

            acc.add((sign * bath_product) * chain);
        }
        partials[chunk] = acc;
    });

    mc::MatAccumulator total;
    for (const auto& p : partials) total.merge(p);
    double scale = volume * static_cast<double>(n_pairings);
    if (variance_out) *variance_out += scale * scale * total.mean_variance();
    return total.mean() * cplx(scale);
}

}  // namespace

void SolveSpec::validate() const {
    if (truncation < 1 || truncation % 2 == 0)
        throw std::invalid_argument("inchworm: truncation must be odd and >= 1");
    if (mode == SumMode::quadrature && truncation != 1)
        throw std::invalid_argument("inchworm: quadrature mode supports truncation 1 only");
    if (mode == SumMode::monte_carlo && truncation > connected_cap)
        throw std::invalid_argument("inchworm: truncation above the connected-family cap");
    if (truncation > kMaxOrder)
        throw std::invalid_argument("inchworm: truncation too large");
    if (samples_per_order < 1)
        throw std::invalid_argument("inchworm: samples_per_order must be >= 1");
    if (threads < 1) throw std::invalid_argument("inchworm: threads must be >= 1");
}

Mat2 connected_sum(const contour::PropagatorTable& table, int head_row, int base_col,
                   const DiagramParams& params, std::uint64_t stream_key,
                   double* variance_out) {
    if (variance_out) *variance_out = 0.0;
    double len = table.node_time(head_row) - table.node_time(base_col);
    if (len <= 1e-300) return Mat2::zero();  // empty window

    if (params.mode == SumMode::quadrature) {
        if (params.truncation != 1)
            throw std::invalid_argument("connected_sum: quadrature mode supports order 1 only");
        return quadrature_order1(table, head_row, base_col, params);
    }

    Mat2 total = Mat2::zero();
    for (int m = 1; m <= params.truncation; m += 2)
        total += monte_carlo_order(table, head_row, base_col, m, params, stream_key, variance_out);
    return total;
}

SolveResult solve(const spin::SystemSpec& system, const bath::CorrelationTable& corr,
                  const SolveSpec& spec, int n_steps, double dt) {
    spec.validate();
    pairings::ConnectedSampler sampler(spec.connected_cap);
    DiagramParams params{&system, &corr, &sampler, spec.truncation,
                         spec.mode,  spec.samples_per_order, spec.threads};

    SolveResult result{contour::PropagatorTable(n_steps, dt), {}};
    contour::PropagatorTable& table = result.table;
    result.entry_std_error.assign(static_cast<std::size_t>(table.rows()) * (table.rows() + 1) / 2,
                                  0.0);

    const Mat2 h = spin::hamiltonian(system);
    const Mat2& obs = system.observable;
    const cplx iu(0.0, 1.0);
    const int rm = table.row_minus();
    const int rp = table.row_plus();

    for (int r = 0; r < table.rows(); ++r) {
        for (int c = r; c >= 0; --c) {
            // special rules: the diagonal, the jump row N+ and the jump
            // column N- are set directly, never stepped
            if (c == r) {
                table.set(r, c, Mat2::identity());
                continue;
            }
            if (r == rp) {
                table.set(r, c, obs * table.at(rm, c));
                continue;
            }
            if (c == rm && r > rp) {
                table.set(r, c, table.at(r, rp) * obs);
                continue;
            }

            const double sgn = table.branch_sign(r);
            const Mat2 prev = table.at(r - 1, c);
            double var1 = 0.0, var2 = 0.0;

            Mat2 k1 = connected_sum(table, r - 1, c, params, stage_key(spec.seed, r, c, 1), &var1);
            Mat2 g_star;
            Mat2 propagate;  // linear part over one step, exponential variant
            if (spec.integrator == Integrator::heun) {
                g_star = prev + cplx(sgn * dt) * (iu * (h * prev) + k1);
            } else {
                propagate = spin::evolve(h, -sgn * dt);  // e^{sgn i dt H}
                g_star = propagate * prev + cplx(sgn * dt) * k1;
            }

            // provisional value: the stage-2 interpolant sees G* at (r, c)
            table.set(r, c, g_star);
            Mat2 k2 = connected_sum(table, r, c, params, stage_key(spec.seed, r, c, 2), &var2);

            Mat2 g;
            if (spec.integrator == Integrator::heun) {
                g = cplx(0.5) * (prev + g_star) +
                    cplx(0.5 * sgn * dt) * (iu * (h * g_star) + k2);
            } else {
                g = propagate * prev + cplx(0.5 * sgn * dt) * (propagate * k1 + k2);
            }
            table.set(r, c, g);
            result.entry_std_error[static_cast<std::size_t>(r) * (r + 1) / 2 + c] =
                0.5 * dt * std::sqrt(var1 + var2);
        }
    }
    return result;
}

}  // namespace sbdyn::inchworm
