#include "cem/operators.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <string>

namespace cem {

void apply_band(const Band1D& B, int axis, const Field& in, Field& out,
                double scale, bool accumulate) {
    const auto ie = in.extents();
    if (B.cols() != ie[axis]) throw size_error("apply_band: factor columns do not match axis extent");
    auto oe = ie;
    oe[axis] = B.rows();
    if (out.extents() != oe) throw size_error("apply_band: output extents mismatch");

    const std::size_t is[3] = {std::size_t(ie[1]) * ie[2], std::size_t(ie[2]), 1};
    const std::size_t os[3] = {std::size_t(oe[1]) * oe[2], std::size_t(oe[2]), 1};
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    const std::size_t ia = is[axis], oa = os[axis];

    for (int p = 0; p < ie[a1]; ++p) {
        for (int q = 0; q < ie[a2]; ++q) {
            const double* ip = in.data() + p * is[a1] + q * is[a2];
            double* op = out.data() + p * os[a1] + q * os[a2];
            for (int r = 0; r < B.rows(); ++r) {
                const double* c = B.row_coef(r);
                const int f = B.row_first(r);
                double s = 0.0;
                for (int k = 0; k < B.row_count(r); ++k) s += c[k] * ip[(f + k) * ia];
                const double v = scale * s;
                if (accumulate)
                    op[r * oa] += v;
                else
                    op[r * oa] = v;
            }
        }
    }
}

Field crop(const Field& u, const std::array<int, 3>& lo, const std::array<int, 3>& n) {
    Field out(n);
    for (int i = 0; i < n[0]; ++i)
        for (int j = 0; j < n[1]; ++j)
            for (int k = 0; k < n[2]; ++k) out(i, j, k) = u(lo[0] + i, lo[1] + j, lo[2] + k);
    return out;
}

std::array<int, 3> TensorOperator::out_extents(const std::array<int, 3>& in) const {
    if (terms_.empty()) throw size_error("TensorOperator has no terms");
    std::array<int, 3> oe{};
    bool have = false;
    for (const Term& t : terms_) {
        auto e = in;
        for (int a = 0; a < 3; ++a)
            if (t.factor[a]) {
                if (t.factor[a]->cols() != in[a])
                    throw size_error("TensorOperator: factor columns mismatch input");
                e[a] = t.factor[a]->rows();
            }
        if (!have) {
            oe = e;
            have = true;
        } else if (e != oe) {
            throw size_error("TensorOperator: terms disagree on output shape");
        }
    }
    return oe;
}

void TensorOperator::apply(const Field& u, Field& out) const {
    const auto oe = out_extents(u.extents());
    if (out.extents() != oe)
        out = Field(oe);
    else
        out.fill(0.0);

    Field buf[2];
    for (const Term& t : terms_) {
        const Field* cur = &u;
        int which = 0;
        bool applied = false;
        for (int a = 0; a < 3; ++a) {
            if (!t.factor[a]) continue;
            auto ne = cur->extents();
            ne[a] = t.factor[a]->rows();
            Field& dst = buf[which];
            if (dst.extents() != ne) dst = Field(ne);
            apply_band(*t.factor[a], a, *cur, dst);
            cur = &dst;
            which ^= 1;
            applied = true;
        }
        if (!applied && u.extents() != oe)
            throw size_error("TensorOperator: identity term with non-square shape");
        axpy(t.coeff, *cur, out);
    }
}

TensorOperator laplacian_dirichlet(const std::array<int, 3>& ext, int dim, double h) {
    TensorOperator op;
    for (int a = 0; a < dim; ++a) {
        TensorOperator::Term t;
        t.coeff = 1.0;
        t.factor[a] = d2_dirichlet(ext[a], h);
        op.add_term(std::move(t));
    }
    return op;
}

TensorOperator upsilon_dirichlet(const std::array<int, 3>& ext, int dim, double h) {
    TensorOperator op;
    auto add = [&](int a, int b) {
        TensorOperator::Term t;
        t.coeff = 1.0;
        t.factor[a] = d2_dirichlet(ext[a], h);
        t.factor[b] = d2_dirichlet(ext[b], h);
        op.add_term(std::move(t));
    };
    if (dim == 2) {
        add(0, 1);
    } else {
        add(2, 0);
        add(1, 2);
        add(0, 1);
    }
    return op;
}

PadeDerivative::PadeDerivative(int m, double h) : m_(m), h_(h), lu_(pade_lhs(m - 1)) {
    if (m < 5) throw size_error("PadeDerivative needs at least 5 samples");
}

std::vector<double> PadeDerivative::apply(std::span<const double> f) const {
    if (int(f.size()) != m_) throw size_error("PadeDerivative: sample count mismatch");
    std::vector<double> d(m_ - 1);
    for (int r = 0; r < m_ - 1; ++r) d[r] = (f[r + 1] - f[r]) / h_;
    lu_.solve(d);
    return d;
}

void PadeDerivative::apply(int axis, const Field& in, Field& out) const {
    const auto ie = in.extents();
    if (ie[axis] != m_) throw size_error("PadeDerivative: axis extent mismatch");
    auto oe = ie;
    oe[axis] = m_ - 1;
    if (out.extents() != oe) out = Field(oe);

    const std::size_t is[3] = {std::size_t(ie[1]) * ie[2], std::size_t(ie[2]), 1};
    const std::size_t os[3] = {std::size_t(oe[1]) * oe[2], std::size_t(oe[2]), 1};
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    const std::size_t ia = is[axis], oa = os[axis];

    std::vector<double> d(m_ - 1);
    for (int p = 0; p < ie[a1]; ++p) {
        for (int q = 0; q < ie[a2]; ++q) {
            const double* ip = in.data() + p * is[a1] + q * is[a2];
            double* op = out.data() + p * os[a1] + q * os[a2];
            for (int r = 0; r < m_ - 1; ++r) d[r] = (ip[(r + 1) * ia] - ip[r * ia]) / h_;
            lu_.solve(d);
            for (int r = 0; r < m_ - 1; ++r) op[r * oa] = d[r];
        }
    }
}

std::pair<Band1D, Band1D> assemble_pade_pair(int m, double h) {
    if (m < 5) throw size_error("assemble_pade_pair needs m >= 5");
    return {pade_lhs(m - 1), d1_forward(m, h)};
}

double power_iteration(const std::vector<double>& seed,
                       const std::function<void(const std::vector<double>&, std::vector<double>&)>& matvec,
                       int iters) {
    std::vector<double> v = seed, w(seed.size());
    double nv = norm2(v);
    if (nv == 0.0) throw size_error("power_iteration: zero seed");
    for (double& x : v) x /= nv;
    double lam = 0.0;
    for (int it = 0; it < iters; ++it) {
        matvec(v, w);
        lam = norm2(w);
        if (lam == 0.0) return 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / lam;
    }
    return lam;
}

double pade_inverse_norm(int n, int iters) {
    const Band1D a = pade_lhs(n);
    const BandedLU lu(a);
    const BandedLU lut(a.transposed());
    std::vector<double> seed(n);
    for (int i = 0; i < n; ++i) seed[i] = 1.0 + 0.37 * ((i * 2654435761u) % 97);
    const double lam = power_iteration(
        seed,
        [&](const std::vector<double>& x, std::vector<double>& y) {
            y = x;
            lut.solve(y);
            lu.solve(y);
        },
        iters);
    return std::sqrt(lam);
}

TmDerivs::TmDerivs(const StaggeredGrid& g)
    : N_(g.N()), half_to_int_(g.N(), g.h()), int_to_half_(g.N() + 1, g.h()) {
    if (g.dim() != 2) throw grid_error("TmDerivs needs a 2D TM grid");
}

Field TmDerivs::dx_h2e(const Field& hy) const {
    Field out;
    half_to_int_.apply(0, hy, out);
    return out;
}

Field TmDerivs::dy_h2e(const Field& hx) const {
    Field out;
    half_to_int_.apply(1, hx, out);
    return out;
}

Field TmDerivs::dx_e2h(const Field& ez) const {
    Field out;
    int_to_half_.apply(0, ez, out);
    return out;
}

Field TmDerivs::dy_e2h(const Field& ez) const {
    Field out;
    int_to_half_.apply(1, ez, out);
    return out;
}

Field TmDerivs::dmid(int axis, const Field& u) const {
    const int m = u.extents()[axis];
    const PadeDerivative& p = (m == half_to_int_.samples()) ? half_to_int_ : int_to_half_;
    if (m != p.samples()) throw size_error("dmid: axis extent matches neither staggered mapping");
    Field out;
    p.apply(axis, u, out);
    return out;
}

Field TmDerivs::curl_h(const Field& hx, const Field& hy) const {
    const Field dxhy = dx_h2e(hy);
    const Field dyhx = dy_h2e(hx);
    Field out(N_ + 1, N_ + 1);
    for (int i = 1; i < N_; ++i)
        for (int j = 1; j < N_; ++j) out(i, j) = dxhy(i - 1, j) - dyhx(i, j - 1);
    return out;
}

std::pair<Field, Field> TmDerivs::grad_perp(const Field& ez, double Z) const {
    Field gx = dy_e2h(ez);
    Field gy = dx_e2h(ez);
    for (std::size_t n = 0; n < gx.size(); ++n) gx[n] *= -1.0 / Z;
    for (std::size_t n = 0; n < gy.size(); ++n) gy[n] *= 1.0 / Z;
    return {std::move(gx), std::move(gy)};
}

Curl3D::Curl3D(const StaggeredGrid& g) : N_(g.N()), half_to_int_(g.N(), g.h()), h_(g.h()) {
    if (g.dim() != 3) throw grid_error("Curl3D needs a 3D grid");
}

std::array<std::array<int, 3>, 3> Curl3D::out_extents() const {
    const int n = N_, m = N_ - 1;
    return {{{n, m, m}, {m, n, m}, {m, m, n}}};
}

std::array<Field, 3> Curl3D::apply_h(const std::array<Field, 3>& H) const {
    const Field &hx = H[0], &hy = H[1], &hz = H[2];
    const int n = N_, m = N_ - 1;
    Field t;

    // (curl H)_x = d_y Hz - d_z Hy on int(Ex) = n x m x m
    Field cx(n, m, m);
    half_to_int_.apply(1, hz, t);  // (n, m, n+1)
    {
        Field a = crop(t, {0, 0, 1}, {n, m, m});
        half_to_int_.apply(2, hy, t);  // (n, n+1, m)
        Field b = crop(t, {0, 1, 0}, {n, m, m});
        for (std::size_t q = 0; q < cx.size(); ++q) cx[q] = a[q] - b[q];
    }

    // (curl H)_y = d_z Hx - d_x Hz on int(Ey) = m x n x m
    Field cy(m, n, m);
    half_to_int_.apply(2, hx, t);  // (n+1, n, m)
    {
        Field a = crop(t, {1, 0, 0}, {m, n, m});
        half_to_int_.apply(0, hz, t);  // (m, n, n+1)
        Field b = crop(t, {0, 0, 1}, {m, n, m});
        for (std::size_t q = 0; q < cy.size(); ++q) cy[q] = a[q] - b[q];
    }

    // (curl H)_z = d_x Hy - d_y Hx on int(Ez) = m x m x n
    Field cz(m, m, n);
    half_to_int_.apply(0, hy, t);  // (m, n+1, n)
    {
        Field a = crop(t, {0, 1, 0}, {m, m, n});
        half_to_int_.apply(1, hx, t);  // (n+1, m, n)
        Field b = crop(t, {1, 0, 0}, {m, m, n});
        for (std::size_t q = 0; q < cz.size(); ++q) cz[q] = a[q] - b[q];
    }

    return {std::move(cx), std::move(cy), std::move(cz)};
}

}  // namespace cem
