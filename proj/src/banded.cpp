#include "cem/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cem {

void Band1D::set_row(int r, int first_col, std::span<const double> c) {
    if (r < 0 || r >= rows_) throw size_error("row out of range");
    if (first_col < 0 || first_col + int(c.size()) > cols_)
        throw size_error("row window exceeds matrix columns");
    if (count_[r] != 0) throw size_error("row already set");
    first_[r] = first_col;
    count_[r] = int(c.size());
    offset_[r] = coef_.size();
    coef_.insert(coef_.end(), c.begin(), c.end());
}

double Band1D::entry(int r, int c) const {
    if (c < first_[r] || c >= first_[r] + count_[r]) return 0.0;
    return coef_[offset_[r] + (c - first_[r])];
}

void Band1D::matvec(std::span<const double> x, std::span<double> y) const {
    for (int r = 0; r < rows_; ++r) {
        double s = 0.0;
        const double* c = row_coef(r);
        const int f = first_[r];
        for (int k = 0; k < count_[r]; ++k) s += c[k] * x[f + k];
        y[r] = s;
    }
}

void Band1D::matvec_t(std::span<const double> x, std::span<double> y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (int r = 0; r < rows_; ++r) {
        const double* c = row_coef(r);
        const int f = first_[r];
        for (int k = 0; k < count_[r]; ++k) y[f + k] += c[k] * x[r];
    }
}

Band1D Band1D::transposed() const {
    Band1D t(cols_, rows_);
    // column windows of the transpose: find per-column first/last row
    std::vector<int> lo(cols_, rows_), hi(cols_, -1);
    for (int r = 0; r < rows_; ++r)
        for (int k = 0; k < count_[r]; ++k) {
            int c = first_[r] + k;
            lo[c] = std::min(lo[c], r);
            hi[c] = std::max(hi[c], r);
        }
    std::vector<double> w;
    for (int c = 0; c < cols_; ++c) {
        if (hi[c] < 0) {
            t.set_row(c, 0, std::span<const double>{});
            continue;
        }
        w.assign(hi[c] - lo[c] + 1, 0.0);
        for (int r = lo[c]; r <= hi[c]; ++r) w[r - lo[c]] = entry(r, c);
        t.set_row(c, lo[c], w);
    }
    return t;
}

BandedLU::BandedLU(const Band1D& a) {
    if (a.rows() != a.cols()) throw size_error("BandedLU needs a square matrix");
    n_ = a.rows();
    kl_ = ku_ = 0;
    for (int r = 0; r < n_; ++r) {
        kl_ = std::max(kl_, r - a.row_first(r));
        ku_ = std::max(ku_, a.row_first(r) + a.row_count(r) - 1 - r);
    }
    band_.assign(std::size_t(n_) * (kl_ + ku_ + 1), 0.0);
    for (int r = 0; r < n_; ++r)
        for (int k = 0; k < a.row_count(r); ++k) at(r, a.row_first(r) + k) = a.row_coef(r)[k];

    for (int k = 0; k < n_; ++k) {
        const double piv = at(k, k);
        if (piv == 0.0 || !std::isfinite(piv))
            throw size_error("zero pivot in banded LU at row " + std::to_string(k));
        const int iend = std::min(k + kl_, n_ - 1);
        const int jend = std::min(k + ku_, n_ - 1);
        for (int i = k + 1; i <= iend; ++i) {
            const double l = at(i, k) / piv;
            at(i, k) = l;
            for (int j = k + 1; j <= jend; ++j) at(i, j) -= l * at(k, j);
        }
    }
}

void BandedLU::solve(std::span<double> b) const {
    for (int i = 0; i < n_; ++i) {
        double s = b[i];
        const int j0 = std::max(0, i - kl_);
        for (int j = j0; j < i; ++j) s -= at(i, j) * b[j];
        b[i] = s;
    }
    for (int i = n_ - 1; i >= 0; --i) {
        double s = b[i];
        const int j1 = std::min(n_ - 1, i + ku_);
        for (int j = i + 1; j <= j1; ++j) s -= at(i, j) * b[j];
        b[i] = s / at(i, i);
    }
}

std::vector<double> fd_weights(double z, std::span<const double> xs, int m) {
    const int n = int(xs.size());
    if (n <= m) throw size_error("fd_weights: need more nodes than the derivative order");
    // Fornberg recursion, weights for derivatives 0..m; keep order m.
    std::vector<double> c(std::size_t(n) * (m + 1), 0.0);
    auto C = [&](int i, int j) -> double& { return c[std::size_t(i) * (m + 1) + j]; };
    double c1 = 1.0;
    C(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        double c2 = 1.0;
        const int mn = std::min(i, m);
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C(i, k) = c1 * (k * C(i - 1, k - 1) - (xs[i - 1] - z) * C(i - 1, k)) / c2;
                C(i, 0) = -c1 * (xs[i - 1] - z) * C(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                C(j, k) = ((xs[i] - z) * C(j, k) - k * C(j, k - 1)) / c3;
            C(j, 0) = (xs[i] - z) * C(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = C(i, m);
    return w;
}

Band1D d1_forward(int m, double h) {
    if (m < 2) throw size_error("d1_forward needs m >= 2");
    Band1D b(m - 1, m);
    const double c[2] = {-1.0 / h, 1.0 / h};
    for (int r = 0; r < m - 1; ++r) b.set_row(r, r, std::span<const double>(c, 2));
    return b;
}

Band1D d2_dirichlet(int m, double h) {
    if (m < 2) throw size_error("d2_dirichlet needs m >= 2");
    Band1D b(m, m);
    const double s = 1.0 / (h * h);
    b.set_row(0, 0, {-2.0 * s, s});
    for (int r = 1; r < m - 1; ++r) b.set_row(r, r - 1, {s, -2.0 * s, s});
    b.set_row(m - 1, m - 2, {s, -2.0 * s});
    return b;
}

Band1D d2_mirror(int m, double h) {
    if (m < 2) throw size_error("d2_mirror needs m >= 2");
    Band1D b(m, m);
    const double s = 1.0 / (h * h);
    b.set_row(0, 0, {-s, s});
    for (int r = 1; r < m - 1; ++r) b.set_row(r, r - 1, {s, -2.0 * s, s});
    b.set_row(m - 1, m - 2, {s, -s});
    return b;
}

Band1D d2_extended(int m, double h) {
    if (m < 1) throw size_error("d2_extended needs m >= 1");
    Band1D b(m, m + 2);
    const double s = 1.0 / (h * h);
    for (int r = 0; r < m; ++r) b.set_row(r, r, {s, -2.0 * s, s});
    return b;
}

Band1D pade_lhs(int n) {
    if (n < 4) throw size_error("pade_lhs needs n >= 4 (i.e. at least 5 samples)");
    Band1D a(n, n);
    a.set_row(0, 0, {26.0 / 24, -5.0 / 24, 4.0 / 24, -1.0 / 24});
    for (int r = 1; r < n - 1; ++r) a.set_row(r, r - 1, {1.0 / 24, 22.0 / 24, 1.0 / 24});
    a.set_row(n - 1, n - 4, {-1.0 / 24, 4.0 / 24, -5.0 / 24, 26.0 / 24});
    return a;
}

}  // namespace cem
