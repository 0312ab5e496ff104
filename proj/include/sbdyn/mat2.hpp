// Dense complex 2x2 matrices with value semantics. Everything the solvers
// touch in their inner loops lives here, so all operations are inline.

#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace sbdyn {

using cplx = std::complex<double>;

struct Mat2 {
    // row-major entries
    cplx a00{}, a01{}, a10{}, a11{};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }

    Mat2& operator+=(const Mat2& o) {
        a00 += o.a00; a01 += o.a01; a10 += o.a10; a11 += o.a11;
        return *this;
    }
    Mat2& operator-=(const Mat2& o) {
        a00 -= o.a00; a01 -= o.a01; a10 -= o.a10; a11 -= o.a11;
        return *this;
    }
    Mat2& operator*=(cplx s) {
        a00 *= s; a01 *= s; a10 *= s; a11 *= s;
        return *this;
    }
};

inline Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
inline Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
inline Mat2 operator*(cplx s, Mat2 a) { return a *= s; }
inline Mat2 operator*(Mat2 a, cplx s) { return a *= s; }

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a00 * b.a00 + a.a01 * b.a10, a.a00 * b.a01 + a.a01 * b.a11,
            a.a10 * b.a00 + a.a11 * b.a10, a.a10 * b.a01 + a.a11 * b.a11};
}

inline Mat2 adjoint(const Mat2& a) {
    return {std::conj(a.a00), std::conj(a.a10), std::conj(a.a01), std::conj(a.a11)};
}

inline cplx trace(const Mat2& a) { return a.a00 + a.a11; }

inline double frobenius_norm(const Mat2& a) {
    return std::sqrt(std::norm(a.a00) + std::norm(a.a01) + std::norm(a.a10) + std::norm(a.a11));
}

// Spectral norm: largest singular value, closed form via the eigenvalues of A^H A.
inline double op_norm(const Mat2& a) {
    double s = std::norm(a.a00) + std::norm(a.a01) + std::norm(a.a10) + std::norm(a.a11);
    cplx det = a.a00 * a.a11 - a.a01 * a.a10;
    double d = std::norm(det);
    double disc = s * s - 4.0 * d;
    if (disc < 0.0) disc = 0.0;
    return std::sqrt(0.5 * (s + std::sqrt(disc)));
}

inline double max_abs_diff(const Mat2& a, const Mat2& b) {
    double m = std::abs(a.a00 - b.a00);
    m = std::max(m, std::abs(a.a01 - b.a01));
    m = std::max(m, std::abs(a.a10 - b.a10));
    m = std::max(m, std::abs(a.a11 - b.a11));
    return m;
}

// a + w*(b - a), entrywise
inline Mat2 lerp(const Mat2& a, const Mat2& b, double w) {
    return {a.a00 + w * (b.a00 - a.a00), a.a01 + w * (b.a01 - a.a01),
            a.a10 + w * (b.a10 - a.a10), a.a11 + w * (b.a11 - a.a11)};
}

namespace pauli {
inline const Mat2 id{1.0, 0.0, 0.0, 1.0};
inline const Mat2 x{0.0, 1.0, 1.0, 0.0};
inline const Mat2 y{0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0};
inline const Mat2 z{1.0, 0.0, 0.0, -1.0};
}  // namespace pauli

}  // namespace sbdyn
