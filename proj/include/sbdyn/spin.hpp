// Spin-1/2 system algebra: Hamiltonian assembly, closed-form unitaries and
// the uncoupled propagator on the unfolded contour (forward branch, backward
// branch, and the observable insertion when a segment crosses the
// measurement time).

#pragma once

#include <stdexcept>

#include "sbdyn/mat2.hpp"

namespace sbdyn::spin {

struct SystemSpec {
    double epsilon = 0.0;             // bias, units of Delta
    double delta = 1.0;               // tunneling; fixes the unit system
    Mat2 rho = {1.0, 0.0, 0.0, 0.0};  // initial system state, default |1><1|
    Mat2 observable = pauli::z;
};

// H_s = epsilon*sigma_z + delta*sigma_x
inline Mat2 hamiltonian(const SystemSpec& spec) {
    return {spec.epsilon, spec.delta, spec.delta, -spec.epsilon};
}

// e^{-i theta H} for Hermitian H, via the Pauli decomposition
// H = a*Id + b*(n.sigma):  e^{-i theta H} = e^{-i theta a} (cos(theta b) Id
// - i sin(theta b) n.sigma).
inline Mat2 evolve(const Mat2& h, double theta) {
    double a = 0.5 * (h.a00.real() + h.a11.real());
    double bx = h.a01.real();
    double by = -h.a01.imag();
    double bz = 0.5 * (h.a00.real() - h.a11.real());
    double b = std::sqrt(bx * bx + by * by + bz * bz);

    cplx phase = std::polar(1.0, -theta * a);
    if (b == 0.0) return {phase, 0.0, 0.0, phase};

    double c = std::cos(theta * b);
    double s = std::sin(theta * b) / b;
    cplx i(0.0, 1.0);
    Mat2 u{c - i * s * bz, -i * s * (bx - i * by),
           -i * s * (bx + i * by), c + i * s * bz};
    return u *= phase;
}

// Uncoupled propagator G_s^(0)(Sf, Si) on the unfolded contour [0, 2t]:
//   Si <= Sf < t        e^{-i (Sf-Si) H}
//   t <= Si <= Sf       e^{+i (Sf-Si) H}
//   Si < t <= Sf        e^{+i (Sf-t) H} O e^{-i (t-Si) H}
inline Mat2 bare_propagator(const SystemSpec& spec, double sf, double si, double t) {
    if (si > sf || si < 0.0 || sf > 2.0 * t)
        throw std::domain_error("bare_propagator: need 0 <= Si <= Sf <= 2t");
    Mat2 h = hamiltonian(spec);
    if (sf < t) return evolve(h, sf - si);
    if (si >= t) return evolve(h, si - sf);
    return evolve(h, t - sf) * spec.observable * evolve(h, t - si);
}

inline cplx expectation(const Mat2& rho, const Mat2& a) { return trace(rho * a); }

}  // namespace sbdyn::spin
