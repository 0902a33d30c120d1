#include "cem/elliptic.hpp"

#include <cmath>
#include <string>

namespace cem {

GhostClosure neumann_ghost_closure(NeumannMethod method, bool high, double h, double kappa2,
                                   double g, std::optional<double> tangential,
                                   std::optional<double> f_n, std::optional<double> phi_nnn) {
    const double sgn = high ? 1.0 : -1.0;
    switch (method) {
        case NeumannMethod::Mirror:
            return {0.0};
        case NeumannMethod::EquationBased: {
            if (!tangential || !f_n)
                throw std::invalid_argument("equation-based closure needs tangential and F_n data");
            const double corr = *tangential - kappa2 * g - kappa2 * (*f_n);
            return {sgn * (h * g - h * h * h / 24.0 * corr)};
        }
        case NeumannMethod::TaylorBased: {
            if (!phi_nnn)
                throw std::invalid_argument("taylor-based closure needs the third normal derivative");
            return {sgn * (h * g + h * h * h / 24.0 * (*phi_nnn))};
        }
    }
    return {0.0};
}

CompactHelmholtz::CompactHelmholtz(const StaggeredGrid& g, Comp c, double h_tau)
    : dim_(g.dim()), h_(g.h()), h_tau_(h_tau) {
    if (h_tau <= 0.0) throw std::invalid_argument("h_tau must be positive");
    r_ = h_tau / h_;
    if (r_ >= positivity_limit())
        throw positivity_error("CFL ratio r=" + std::to_string(r_) +
                               " >= sqrt(3+sqrt(21)); compact operator loses positive definiteness");
    kappa2_ = 24.0 / (h_tau * h_tau);
    const auto& m = g.mesh(c);
    for (int a = 0; a < dim_; ++a) {
        dirichlet_axis_[a] = !m.half[a];
        n_[a] = dirichlet_axis_[a] ? m.ext[a] - 2 : m.ext[a];
        if (n_[a] < 1) throw grid_error("no interior nodes along axis " + std::to_string(a));
        next_[a] = n_[a] + 2;
    }
}

std::array<int, 3> CompactHelmholtz::grid_offset() const {
    std::array<int, 3> o{0, 0, 0};
    for (int a = 0; a < dim_; ++a) o[a] = dirichlet_axis_[a] ? 1 : 0;
    return o;
}

void CompactHelmholtz::embed(const Field& u, Field& ext, const std::array<FaceData, 6>* fd) const {
    if (u.extents() != n_) throw size_error("embed: unknown-box extents mismatch");
    if (ext.extents() != next_) ext = Field(next_);

    const int e0 = dim_ > 0 ? 1 : 0, e1 = dim_ > 1 ? 1 : 0, e2 = dim_ > 2 ? 1 : 0;
    for (int i = 0; i < n_[0]; ++i)
        for (int j = 0; j < n_[1]; ++j)
            for (int k = 0; k < n_[2]; ++k) ext(i + e0, j + e1, k + e2) = u(i, j, k);

    // Dirichlet face layers (grid positions of the other axes only; corner
    // ghost positions are produced by the mirror pass below).
    for (int a = 0; a < dim_; ++a) {
        if (!dirichlet_axis_[a]) continue;
        for (int s = 0; s < 2; ++s) {
            const auto& fn = fd ? (*fd)[2 * a + s].dirichlet : nullptr;
            std::array<int, 3> lo{0, 0, 0}, hi{next_[0], next_[1], next_[2]};
            for (int b = 0; b < 3; ++b) {
                if (b == a || b >= dim_) continue;
                if (!dirichlet_axis_[b]) {
                    lo[b] = 1;
                    hi[b] = n_[b] + 1;
                }
            }
            const int layer = s == 0 ? 0 : next_[a] - 1;
            lo[a] = layer;
            hi[a] = layer + 1;
            for (int i = lo[0]; i < hi[0]; ++i)
                for (int j = lo[1]; j < hi[1]; ++j)
                    for (int k = lo[2]; k < hi[2]; ++k) {
                        double v = 0.0;
                        if (fn) {
                            std::array<int, 3> gi{i, j, k};
                            for (int b = 0; b < dim_; ++b)
                                if (!dirichlet_axis_[b]) gi[b] -= 1;
                            v = fn(gi);
                        }
                        ext(i, j, k) = v;
                    }
        }
    }

    // Mirror ghosts on the half-staggered axes, full extended slabs so that
    // cross-derivative corners are covered.
    for (int a = 0; a < dim_; ++a) {
        if (dirichlet_axis_[a]) continue;
        for (int s = 0; s < 2; ++s) {
            const auto& fn = fd ? (*fd)[2 * a + s].ghost_shift : nullptr;
            const int layer = s == 0 ? 0 : next_[a] - 1;
            const int inside = s == 0 ? 1 : next_[a] - 2;
            std::array<int, 3> lo{0, 0, 0}, hi{next_[0], next_[1], next_[2]};
            lo[a] = layer;
            hi[a] = layer + 1;
            for (int i = lo[0]; i < hi[0]; ++i)
                for (int j = lo[1]; j < hi[1]; ++j)
                    for (int k = lo[2]; k < hi[2]; ++k) {
                        std::array<int, 3> src{i, j, k};
                        src[a] = inside;
                        double v = ext(src[0], src[1], src[2]);
                        if (fn) {
                            std::array<int, 3> gi{i, j, k};
                            for (int b = 0; b < dim_; ++b)
                                if (!dirichlet_axis_[b]) gi[b] -= 1;
                            v += fn(gi);
                        }
                        ext(i, j, k) = v;
                    }
        }
    }
}

void CompactHelmholtz::laplacian_ext(const Field& ext, Field& y) const {
    if (ext.extents() != next_) throw size_error("laplacian_ext: extents mismatch");
    if (y.extents() != n_) y = Field(n_);
    const double w = 1.0 / (h_ * h_);
    if (dim_ == 2) {
        for (int i = 0; i < n_[0]; ++i)
            for (int j = 0; j < n_[1]; ++j)
                y(i, j) = w * (ext(i, j + 1) + ext(i + 2, j + 1) + ext(i + 1, j) + ext(i + 1, j + 2) -
                               4.0 * ext(i + 1, j + 1));
    } else {
        for (int i = 0; i < n_[0]; ++i)
            for (int j = 0; j < n_[1]; ++j)
                for (int k = 0; k < n_[2]; ++k)
                    y(i, j, k) = w * (ext(i, j + 1, k + 1) + ext(i + 2, j + 1, k + 1) +
                                      ext(i + 1, j, k + 1) + ext(i + 1, j + 2, k + 1) +
                                      ext(i + 1, j + 1, k) + ext(i + 1, j + 1, k + 2) -
                                      6.0 * ext(i + 1, j + 1, k + 1));
    }
}

void CompactHelmholtz::apply_p1_ext(const Field& ext, Field& y) const {
    if (ext.extents() != next_) throw size_error("apply_p1_ext: extents mismatch");
    if (y.extents() != n_) y = Field(n_);
    const double w = 1.0 / (h_ * h_);
    const double diag = kappa2_ * (1.0 + 2.0 / (r_ * r_));
    if (dim_ == 2) {
        // fused 9-point stencil of -(Delta_h + h^2/6 D_xx D_yy) + diag
        const double cc = 10.0 / 3.0 * w + diag;  // center
        const double ce = -2.0 / 3.0 * w;         // axis neighbors
        const double cd = -1.0 / 6.0 * w;         // diagonal neighbors
        for (int i = 0; i < n_[0]; ++i)
            for (int j = 0; j < n_[1]; ++j)
                y(i, j) = cc * ext(i + 1, j + 1) +
                          ce * (ext(i, j + 1) + ext(i + 2, j + 1) + ext(i + 1, j) + ext(i + 1, j + 2)) +
                          cd * (ext(i, j) + ext(i, j + 2) + ext(i + 2, j) + ext(i + 2, j + 2));
    } else {
        // 19-point compact stencil: face, plane-diagonal and center weights
        const double cc = 4.0 * w + diag;
        const double cf = -1.0 / 3.0 * w;
        const double cd = -1.0 / 6.0 * w;
        for (int i = 0; i < n_[0]; ++i)
            for (int j = 0; j < n_[1]; ++j)
                for (int k = 0; k < n_[2]; ++k) {
                    const int a = i + 1, b = j + 1, c = k + 1;
                    const double faces = ext(a - 1, b, c) + ext(a + 1, b, c) + ext(a, b - 1, c) +
                                         ext(a, b + 1, c) + ext(a, b, c - 1) + ext(a, b, c + 1);
                    const double dxy = ext(a - 1, b - 1, c) + ext(a - 1, b + 1, c) +
                                       ext(a + 1, b - 1, c) + ext(a + 1, b + 1, c);
                    const double dyz = ext(a, b - 1, c - 1) + ext(a, b - 1, c + 1) +
                                       ext(a, b + 1, c - 1) + ext(a, b + 1, c + 1);
                    const double dzx = ext(a - 1, b, c - 1) + ext(a + 1, b, c - 1) +
                                       ext(a - 1, b, c + 1) + ext(a + 1, b, c + 1);
                    y(i, j, k) = cc * ext(a, b, c) + cf * faces + cd * (dxy + dyz + dzx);
                }
    }
}

void CompactHelmholtz::apply_p1(const Field& x, Field& y) const {
    Field ext(next_);
    embed(x, ext);
    apply_p1_ext(ext, y);
}

void CompactHelmholtz::apply_neg_p2(const Field& x, Field& y) const {
    Field ext(next_);
    embed(x, ext);
    Field lap(n_);
    laplacian_ext(ext, lap);
    if (y.extents() != n_) y = Field(n_);
    const double c1 = 1.0 + 2.0 / (r_ * r_);
    const double hh12 = h_ * h_ / 12.0;
    for (std::size_t q = 0; q < y.size(); ++q) y[q] = kappa2_ * (c1 * x[q] + hh12 * lap[q]);
}

Field CompactHelmholtz::boundary_contribution(const std::array<FaceData, 6>& fd) const {
    Field zero(n_), ext(next_), y(n_);
    embed(zero, ext, &fd);
    apply_p1_ext(ext, y);
    return y;
}

void CompactHelmholtz::embed_full(const Field& full, Field& ext,
                                  const std::array<FaceData, 6>* fd) const {
    std::array<int, 3> want{1, 1, 1};
    for (int a = 0; a < dim_; ++a) want[a] = dirichlet_axis_[a] ? n_[a] + 2 : n_[a];
    if (full.extents() != want) throw size_error("embed_full: full-mesh extents mismatch");
    if (ext.extents() != next_) ext = Field(next_);

    const std::array<int, 3> off{dim_ > 0 && !dirichlet_axis_[0] ? 1 : 0,
                                 dim_ > 1 && !dirichlet_axis_[1] ? 1 : 0,
                                 dim_ > 2 && !dirichlet_axis_[2] ? 1 : 0};
    for (int i = 0; i < want[0]; ++i)
        for (int j = 0; j < want[1]; ++j)
            for (int k = 0; k < want[2]; ++k) ext(i + off[0], j + off[1], k + off[2]) = full(i, j, k);

    for (int a = 0; a < dim_; ++a) {
        if (dirichlet_axis_[a]) continue;
        for (int s = 0; s < 2; ++s) {
            const auto& fn = fd ? (*fd)[2 * a + s].ghost_shift : nullptr;
            const int layer = s == 0 ? 0 : next_[a] - 1;
            const int inside = s == 0 ? 1 : next_[a] - 2;
            std::array<int, 3> lo{0, 0, 0}, hi{next_[0], next_[1], next_[2]};
            lo[a] = layer;
            hi[a] = layer + 1;
            for (int i = lo[0]; i < hi[0]; ++i)
                for (int j = lo[1]; j < hi[1]; ++j)
                    for (int k = lo[2]; k < hi[2]; ++k) {
                        std::array<int, 3> src{i, j, k};
                        src[a] = inside;
                        double v = ext(src[0], src[1], src[2]);
                        if (fn) {
                            std::array<int, 3> gi{i, j, k};
                            for (int b = 0; b < dim_; ++b)
                                if (!dirichlet_axis_[b]) gi[b] -= 1;
                            v += fn(gi);
                        }
                        ext(i, j, k) = v;
                    }
        }
    }
}

Field CompactHelmholtz::apply_p2(const EllipticRhs& rhs, const std::array<FaceData, 6>* fd) const {
    Field out(n_);
    const double c1 = 1.0 + 2.0 / (r_ * r_);
    if (rhs.mode == EllipticRhs::DiscreteLaplacian) {
        Field ext(next_);
        embed_full(rhs.f, ext, fd);
        Field lap(n_);
        laplacian_ext(ext, lap);
        const auto off = grid_offset();
        const double hh12 = h_ * h_ / 12.0;
        for (int i = 0; i < n_[0]; ++i)
            for (int j = 0; j < n_[1]; ++j)
                for (int k = 0; k < n_[2]; ++k)
                    out(i, j, k) = kappa2_ * (c1 * rhs.f(i + off[0], j + off[1], k + off[2]) +
                                              hh12 * lap(i, j, k));
    } else {
        if (rhs.f.extents() != n_) throw size_error("apply_p2: F extents mismatch");
        if (rhs.lap_f.extents() != n_)
            throw size_error("apply_p2: known-Laplacian mode needs the Laplacian field");
        for (std::size_t q = 0; q < out.size(); ++q)
            out[q] = kappa2_ * c1 * rhs.f[q] + kappa2_ * (h_ * h_ / 12.0) * rhs.lap_f[q];
    }
    return out;
}

CompactHelmholtz::SolveResult CompactHelmholtz::solve(const Field& b, double tol, int max_iter,
                                                      const Field* guess,
                                                      const CgObserver& observer) const {
    if (b.extents() != n_) throw size_error("solve: rhs extents mismatch");
    SolveResult res;
    res.u = Field(n_);
    const double nb = norm2(b.vec());
    if (nb == 0.0) return res;  // zero data, zero solution, zero iterations

    Field r = b, Ap(n_);
    if (guess) {
        if (guess->extents() != n_) throw size_error("solve: guess extents mismatch");
        res.u = *guess;
        apply_p1(res.u, Ap);
        for (std::size_t q = 0; q < r.size(); ++q) r[q] = b[q] - Ap[q];
    }
    double rr = dot(r.vec(), r.vec());
    res.residual = std::sqrt(rr) / nb;
    if (res.residual <= tol) return res;

    Field p = r;
    for (int it = 1; it <= max_iter; ++it) {
        apply_p1(p, Ap);
        const double pAp = dot(p.vec(), Ap.vec());
        const double alpha = rr / pAp;
        axpy(alpha, p, res.u);
        axpy(-alpha, Ap, r);
        const double rrn = dot(r.vec(), r.vec());
        res.iters = it;
        res.residual = std::sqrt(rrn) / nb;
        if (observer) observer(it, res.residual, res.u);
        if (res.residual <= tol) return res;
        const double beta = rrn / rr;
        for (std::size_t q = 0; q < p.size(); ++q) p[q] = r[q] + beta * p[q];
        rr = rrn;
    }
    throw convergence_error("conjugate gradients did not reach tol=" + std::to_string(tol) +
                                " in " + std::to_string(max_iter) + " iterations (residual " +
                                std::to_string(res.residual) + ")",
                            res.residual, res.iters);
}

}  // namespace cem
