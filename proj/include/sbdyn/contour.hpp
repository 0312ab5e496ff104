// Triangular grid of propagator values over the unfolded contour [0, 2t].
// The measurement time t sits at grid index N and is double-valued: the
// N- node carries the limit from the forward branch, N+ the limit from the
// backward branch. Storage indices run 0..2N+1 with N- at N and N+ at N+1.
//
// Interpolation is piecewise linear on the triangles obtained by splitting
// every grid square along its main diagonal, and resolves grid lines at the
// measurement time to the correct branch from the side the query approaches.

#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "sbdyn/mat2.hpp"

namespace sbdyn::contour {

class PropagatorTable {
  public:
    PropagatorTable(int n_steps, double dt);

    int n_steps() const { return n_; }
    double dt() const { return dt_; }
    double measurement_time() const { return n_ * dt_; }
    int rows() const { return 2 * n_ + 2; }
    int row_minus() const { return n_; }      // N-
    int row_plus() const { return n_ + 1; }   // N+

    // contour time of a storage index
    double node_time(int r) const { return dt_ * (r <= n_ ? r : r - 1); }
    // -1 on the forward side of the measurement time (incl. N-), +1 after
    int branch_sign(int r) const { return r <= n_ ? -1 : +1; }

    bool filled(int r, int c) const { return filled_[index(r, c)]; }
    const Mat2& at(int r, int c) const;
    void set(int r, int c, const Mat2& value);

    // interpolated lookups; every touched vertex must already be computed
    Mat2 interp_row(int r, double si) const;         // Sf at node r, Si interior
    Mat2 interp_col(double sf, int c) const;         // Si at node c, Sf interior
    Mat2 interp(double sf, double si) const;         // both interior

    void write_csv(std::ostream& os) const;

  private:
    std::size_t index(int r, int c) const;
    const Mat2& vertex(int r, int c) const;  // filled-checked read
    // storage index of a grid line approached from the given side
    int line_from_above(int g) const { return g >= n_ ? g + 1 : g; }
    int line_from_below(int g) const { return g > n_ ? g + 1 : g; }
    int cell_of(double x) const;

    int n_;
    double dt_;
    std::vector<Mat2> values_;
    std::vector<char> filled_;
};

// (-1)^(number of times strictly below t)
int sign_parity(std::span<const double> times, double t);

// Observable trace along the anti-diagonal Si + Sf = 2t: for k = N..0 the
// entry (2N-k, k) gives <O(t - t_k)>. Returned with tau ascending in [0, t].
std::vector<std::pair<double, cplx>> antidiagonal_observables(const PropagatorTable& table,
                                                              const Mat2& rho);

}  // namespace sbdyn::contour
