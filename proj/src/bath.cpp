#include "sbdyn/bath.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace sbdyn::bath {

void BathSpec::validate() const {
    if (L < 1) throw std::invalid_argument("bath: L must be >= 1");
    if (beta <= 0.0) throw std::invalid_argument("bath: beta must be positive");
    if (omega_c <= 0.0) throw std::invalid_argument("bath: omega_c must be positive");
    if (omega_max < omega_c) throw std::invalid_argument("bath: omega_max must be >= omega_c");
    if (xi < 0.0) throw std::invalid_argument("bath: xi must be nonnegative");
}

BathModes build_modes(const BathSpec& spec) {
    spec.validate();
    // Logarithmic discretization of the Ohmic spectral density: equal
    // spectral weight per mode, densest where exp(-w/wc) is largest.
    double span = 1.0 - std::exp(-spec.omega_max / spec.omega_c);
    double amp = std::sqrt(spec.xi * spec.omega_c * span / spec.L);
    BathModes modes;
    modes.omega.resize(spec.L);
    modes.coupling.resize(spec.L);
    for (int l = 1; l <= spec.L; ++l) {
        double w = -spec.omega_c * std::log(1.0 - span * l / spec.L);
        modes.omega[l - 1] = w;
        modes.coupling[l - 1] = w * amp;
    }
    // the endpoint is exact up to roundoff; pin it
    modes.omega[spec.L - 1] = spec.omega_max;
    modes.coupling[spec.L - 1] = spec.omega_max * amp;
    return modes;
}

namespace {

// coth saturates to 1 for large arguments; evaluate through expm1 to avoid
// overflow and keep precision for small x
double coth(double x) {
    if (x > 360.0) return 1.0;
    return 1.0 + 2.0 / std::expm1(2.0 * x);
}

}  // namespace

cplx correlation_f(const BathModes& modes, double beta, double s) {
    double re = 0.0, im = 0.0;
    for (std::size_t l = 0; l < modes.omega.size(); ++l) {
        double w = modes.omega[l];
        double a = modes.coupling[l] * modes.coupling[l] / (2.0 * w);
        re += a * coth(0.5 * beta * w) * std::cos(w * s);
        im -= a * std::sin(w * s);
    }
    return {re, im};
}

double bound_Cb(const BathModes& modes, double beta) {
    double cb = 0.0;
    for (std::size_t l = 0; l < modes.omega.size(); ++l) {
        double w = modes.omega[l];
        cb += modes.coupling[l] * modes.coupling[l] / (2.0 * w) * coth(0.5 * beta * w);
    }
    return cb;
}

CorrelationTable CorrelationTable::tabulate(const BathModes& modes, double beta, double t_max,
                                            double step) {
    if (step <= 0.0) throw std::invalid_argument("tabulate: step must be positive");
    if (t_max <= 0.0) throw std::invalid_argument("tabulate: t_max must be positive");
    CorrelationTable table;
    table.step_ = step;
    table.c_b_ = bound_Cb(modes, beta);
    auto nodes = static_cast<std::size_t>(std::ceil(t_max / step)) + 1;
    table.t_max_ = step * static_cast<double>(nodes - 1);
    table.values_.resize(2 * nodes - 1);
    // conjugate symmetry f(-s) = conj(f(s)): evaluate s >= 0 once
    std::size_t mid = nodes - 1;
    for (std::size_t i = 0; i < nodes; ++i) {
        cplx v = correlation_f(modes, beta, step * static_cast<double>(i));
        table.values_[mid + i] = v;
        table.values_[mid - i] = std::conj(v);
    }
    table.values_[mid] = cplx(table.values_[mid].real(), 0.0);  // f(0) is real
    return table;
}

cplx CorrelationTable::lookup(double s) const {
    double x = (s + t_max_) / step_;
    if (x < 0.0 || x > static_cast<double>(values_.size() - 1))
        throw std::domain_error("CorrelationTable: argument outside tabulated range");
    auto i = static_cast<std::size_t>(x);
    if (i >= values_.size() - 1) i = values_.size() - 2;
    double w = x - static_cast<double>(i);
    const cplx& lo = values_[i];
    const cplx& hi = values_[i + 1];
    return lo + w * (hi - lo);
}

cplx CorrelationTable::contour(double tau1, double tau2, double t) const {
    if (tau1 < 0.0 || tau2 > 2.0 * t || tau1 > tau2)
        throw std::domain_error("CorrelationTable::contour: need 0 <= tau1 <= tau2 <= 2t");
    if (literal_difference_) return lookup(tau2 - tau1);
    double u1 = tau1 < t ? tau1 : 2.0 * t - tau1;
    double u2 = tau2 < t ? tau2 : 2.0 * t - tau2;
    return lookup(u2 - u1);
}

void CorrelationTable::write_csv(std::ostream& os) const {
    os << "# bath correlation table: step=" << step_ << " range=[" << -t_max_ << "," << t_max_
       << "] C_b=" << c_b_ << "\n";
    os << "# s,re_f,im_f\n";
    for (std::size_t i = 0; i < values_.size(); ++i) {
        double s = -t_max_ + step_ * static_cast<double>(i);
        os << s << "," << values_[i].real() << "," << values_[i].imag() << "\n";
    }
}

}  // namespace sbdyn::bath
