// Discretized Ohmic bath: mode frequencies and couplings on a logarithmic
// grid, the two-point correlation function of the coupling operator at
// thermal equilibrium, its uniform bound, and a finely tabulated form with
// linear-interpolation lookup for the solver hot paths.

#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

namespace sbdyn::bath {

using cplx = std::complex<double>;

struct BathSpec {
    int L = 200;              // number of modes
    double beta = 5.0;        // inverse temperature, units 1/Delta
    double omega_c = 2.5;     // primary frequency, units Delta
    double omega_max = 10.0;  // frequency cutoff, >= omega_c
    double xi = 0.2;          // Kondo parameter

    void validate() const;  // throws std::invalid_argument
};

struct BathModes {
    std::vector<double> omega;     // strictly increasing, omega[L-1] == omega_max
    std::vector<double> coupling;  // nonnegative
};

BathModes build_modes(const BathSpec& spec);

// f(s) = sum_l c_l^2/(2 w_l) [coth(beta w_l / 2) cos(w_l s) - i sin(w_l s)]
cplx correlation_f(const BathModes& modes, double beta, double s);

// C_b = sum_l c_l^2/(2 w_l) coth(beta w_l / 2) = f(0); |f(s)| <= C_b.
double bound_Cb(const BathModes& modes, double beta);

// Dense samples of f on [-t_max, t_max]; lookups interpolate linearly
// between adjacent nodes. Immutable once built.
class CorrelationTable {
  public:
    CorrelationTable() = default;  // empty; every lookup is out of range

    static CorrelationTable tabulate(const BathModes& modes, double beta, double t_max,
                                     double step);

    // f at arbitrary s inside the tabulated range
    cplx lookup(double s) const;

    // Correlation between two points on the unfolded contour [0, 2t]. The
    // backward branch is folded to physical time, u(tau) = min(tau, 2t - tau),
    // and the value is f(u(tau2) - u(tau1)). With literal_difference set, the
    // raw contour difference f(tau2 - tau1) is used instead (A/B switch).
    cplx contour(double tau1, double tau2, double t) const;

    double c_b() const { return c_b_; }
    double step() const { return step_; }
    double t_max() const { return t_max_; }
    bool literal_difference() const { return literal_difference_; }
    void set_literal_difference(bool v) { literal_difference_ = v; }

    // columns: s, Re f, Im f
    void write_csv(std::ostream& os) const;

  private:
    double step_ = 0.0;
    double t_max_ = 0.0;
    double c_b_ = 0.0;
    bool literal_difference_ = false;
    std::vector<cplx> values_;  // node i at s = -t_max + i*step
};

}  // namespace sbdyn::bath
