#include "sbdyn/contour.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace sbdyn::contour {

PropagatorTable::PropagatorTable(int n_steps, double dt) : n_(n_steps), dt_(dt) {
    if (n_steps < 1) throw std::invalid_argument("PropagatorTable: need at least one step");
    if (dt <= 0.0) throw std::invalid_argument("PropagatorTable: dt must be positive");
    std::size_t total = static_cast<std::size_t>(rows()) * (rows() + 1) / 2;
    values_.resize(total);
    filled_.assign(total, 0);
}

std::size_t PropagatorTable::index(int r, int c) const {
    if (c > r || c < 0 || r >= rows())
        throw std::domain_error("PropagatorTable: index (" + std::to_string(r) + "," +
                                std::to_string(c) + ") outside the lower triangle");
    return static_cast<std::size_t>(r) * (r + 1) / 2 + c;
}

const Mat2& PropagatorTable::at(int r, int c) const {
    std::size_t i = index(r, c);
    if (!filled_[i])
        throw std::logic_error("PropagatorTable: sweep-order violation, entry (" +
                               std::to_string(r) + "," + std::to_string(c) + ") not yet computed");
    return values_[i];
}

void PropagatorTable::set(int r, int c, const Mat2& value) {
    std::size_t i = index(r, c);
    values_[i] = value;
    filled_[i] = 1;
}

const Mat2& PropagatorTable::vertex(int r, int c) const { return at(r, c); }

int PropagatorTable::cell_of(double x) const {
    if (x < 0.0 || x > 2.0 * n_ * dt_ * (1.0 + 1e-12))
        throw std::domain_error("PropagatorTable: contour time outside [0, 2t]");
    int c = static_cast<int>(std::floor(x / dt_));
    if (c < 0) c = 0;
    if (c > 2 * n_ - 1) c = 2 * n_ - 1;
    return c;
}

Mat2 PropagatorTable::interp_row(int r, double si) const {
    int row_line = r <= n_ ? r : r - 1;
    if (row_line == 0) return at(r, r);  // only si = 0 fits
    int cc = std::min(cell_of(si), row_line - 1);  // keep the cell left of the diagonal
    double w = si / dt_ - cc;
    const Mat2& lo = vertex(r, line_from_above(cc));
    const Mat2& hi = vertex(r, line_from_below(cc + 1));
    return lerp(lo, hi, w);
}

Mat2 PropagatorTable::interp_col(double sf, int c) const {
    int col_line = c <= n_ ? c : c - 1;
    if (col_line == 2 * n_) return at(c, c);  // only sf = 2t fits
    int rc = std::max(cell_of(sf), col_line);  // keep the cell above the diagonal
    double w = sf / dt_ - rc;
    const Mat2& lo = vertex(line_from_above(rc), c);
    const Mat2& hi = vertex(line_from_below(rc + 1), c);
    return lerp(lo, hi, w);
}

Mat2 PropagatorTable::interp(double sf, double si) const {
    if (si > sf) throw std::domain_error("PropagatorTable::interp: need Si <= Sf");
    int rc = cell_of(sf);
    int cc = cell_of(si);
    double eta = sf / dt_ - rc;
    double xi = si / dt_ - cc;
    int rb = line_from_above(rc), rt = line_from_below(rc + 1);
    int cl = line_from_above(cc), cr = line_from_below(cc + 1);
    const Mat2& a = vertex(rb, cl);  // (Sf, Si) cell corner at (0, 0)
    const Mat2& c = vertex(rt, cr);  // (1, 1)
    if (xi <= eta) {
        const Mat2& b = vertex(rt, cl);  // (1, 0) in (eta, xi)
        double wb = eta - xi;
        return {a.a00 + wb * (b.a00 - a.a00) + xi * (c.a00 - a.a00),
                a.a01 + wb * (b.a01 - a.a01) + xi * (c.a01 - a.a01),
                a.a10 + wb * (b.a10 - a.a10) + xi * (c.a10 - a.a10),
                a.a11 + wb * (b.a11 - a.a11) + xi * (c.a11 - a.a11)};
    }
    const Mat2& d = vertex(rb, cr);
    double wd = xi - eta;
    return {a.a00 + wd * (d.a00 - a.a00) + eta * (c.a00 - a.a00),
            a.a01 + wd * (d.a01 - a.a01) + eta * (c.a01 - a.a01),
            a.a10 + wd * (d.a10 - a.a10) + eta * (c.a10 - a.a10),
            a.a11 + wd * (d.a11 - a.a11) + eta * (c.a11 - a.a11)};
}

namespace {

std::string node_label(int r, int n) {
    if (r == n) return std::to_string(n) + "-";
    if (r == n + 1) return std::to_string(n) + "+";
    return std::to_string(r <= n ? r : r - 1);
}

}  // namespace

void PropagatorTable::write_csv(std::ostream& os) const {
    os << "# propagator table: N=" << n_ << " dt=" << dt_ << "\n";
    os << "# j,k,re00,im00,re01,im01,re10,im10,re11,im11\n";
    for (int r = 0; r < rows(); ++r) {
        for (int c = 0; c <= r; ++c) {
            if (!filled_[index(r, c)]) continue;
            const Mat2& g = values_[index(r, c)];
            os << node_label(r, n_) << "," << node_label(c, n_);
            for (const cplx& v : {g.a00, g.a01, g.a10, g.a11})
                os << "," << v.real() << "," << v.imag();
            os << "\n";
        }
    }
}

int sign_parity(std::span<const double> times, double t) {
    int below = 0;
    for (double s : times)
        if (s < t) ++below;
    return below % 2 == 0 ? +1 : -1;
}

std::vector<std::pair<double, cplx>> antidiagonal_observables(const PropagatorTable& table,
                                                              const Mat2& rho) {
    int n = table.n_steps();
    std::vector<std::pair<double, cplx>> out;
    out.reserve(n + 1);
    for (int k = n; k >= 0; --k) {
        int row = k == n ? table.row_plus() : 2 * n - k + 1;
        double tau = table.dt() * (n - k);
        out.emplace_back(tau, trace(rho * table.at(row, k)));
    }
    return out;
}

}  // namespace sbdyn::contour
