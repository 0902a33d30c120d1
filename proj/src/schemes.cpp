#include "cem/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

namespace cem {

StencilParams StencilParams::k4(double a) { return {a, -a / 3.0, (16.0 * a - 1.0) / 24.0}; }

const char* scheme_name(SchemeId s) {
    switch (s) {
        case SchemeId::C4: return "c4";
        case SchemeId::Yee: return "yee";
        case SchemeId::NC: return "nc";
        case SchemeId::AI: return "ai";
    }
    return "?";
}

SchemeId scheme_from_name(const std::string& name) {
    if (name == "c4") return SchemeId::C4;
    if (name == "yee") return SchemeId::Yee;
    if (name == "nc") return SchemeId::NC;
    if (name == "ai") return SchemeId::AI;
    throw config_error("unknown scheme '" + name + "' (expected c4|yee|nc|ai)");
}

EMStateTM zero_state(const StaggeredGrid& g, bool carry_lap) {
    EMStateTM s;
    s.Ez = Field(g.mesh(Comp::Ez).ext);
    s.Hx = Field(g.mesh(Comp::Hx).ext);
    s.Hy = Field(g.mesh(Comp::Hy).ext);
    if (carry_lap) s.lapEz = Field(g.mesh(Comp::Ez).ext);
    return s;
}

std::pair<Field, Field> init_half_step_H(const std::array<FieldPairFn, 5>& h_derivs, double h_tau) {
    for (const auto& fn : h_derivs)
        if (!fn) throw config_error("init_half_step_H: missing temporal-derivative callback");
    auto [hx, hy] = h_derivs[0]();
    const double t = 0.5 * h_tau;
    double fac = 1.0;
    for (int order = 1; order <= 4; ++order) {
        fac *= t / order;
        if (fac == 0.0) break;
        auto [dx, dy] = h_derivs[order]();
        axpy(fac, dx, hx);
        axpy(fac, dy, hy);
    }
    return {std::move(hx), std::move(hy)};
}

std::array<FieldPairFn, 5> eigenmode_taylor_callbacks(const Eigenmode& m, const StaggeredGrid& g) {
    std::array<FieldPairFn, 5> fns;
    for (int order = 0; order <= 4; ++order) {
        fns[order] = [m, &g, order]() {
            Field hx(g.mesh(Comp::Hx).ext), hy(g.mesh(Comp::Hy).ext);
            const auto& mx = g.mesh(Comp::Hx);
            for (int i = 0; i < mx.ext[0]; ++i)
                for (int j = 0; j < mx.ext[1]; ++j)
                    hx(i, j) = m.Hx_dt(order, 0.0, g.coord(Comp::Hx, 0, i), g.coord(Comp::Hx, 1, j));
            const auto& my = g.mesh(Comp::Hy);
            for (int i = 0; i < my.ext[0]; ++i)
                for (int j = 0; j < my.ext[1]; ++j)
                    hy(i, j) = m.Hy_dt(order, 0.0, g.coord(Comp::Hy, 0, i), g.coord(Comp::Hy, 1, j));
            return std::pair<Field, Field>{std::move(hx), std::move(hy)};
        };
    }
    return fns;
}

EMStateTM eigenmode_state(const StaggeredGrid& g, const Eigenmode& m, double h_tau, bool carry_lap) {
    EMStateTM s = zero_state(g, carry_lap);
    const int N = g.N();
    const auto& me = g.mesh(Comp::Ez);
    for (int i = 0; i < me.ext[0]; ++i)
        for (int j = 0; j < me.ext[1]; ++j)
            s.Ez(i, j) = m.Ez(0.0, g.coord(Comp::Ez, 0, i), g.coord(Comp::Ez, 1, j));
    auto [hx, hy] = init_half_step_H(eigenmode_taylor_callbacks(m, g), h_tau);
    s.Hx = std::move(hx);
    s.Hy = std::move(hy);
    // pin the cavity conditions exactly: sampling sin(pi k) leaves ~1e-16
    // residue on the face layers
    for (int i = 0; i <= N; ++i) s.Ez(i, 0) = s.Ez(i, N) = s.Ez(0, i) = s.Ez(N, i) = 0.0;
    for (int j = 0; j < N; ++j) s.Hx(0, j) = s.Hx(N, j) = 0.0;
    for (int i = 0; i < N; ++i) s.Hy(i, 0) = s.Hy(i, N) = 0.0;
    if (carry_lap) {
        const double lf = m.laplacian_factor();
        for (std::size_t q = 0; q < s.Ez.size(); ++q) s.lapEz[q] = lf * s.Ez[q];
    }
    return s;
}

// ---------------------------------------------------------------- C4Stepper

C4Stepper::C4Stepper(const StaggeredGrid& g, const RunConfig& cfg)
    : g_(g),
      cfg_(cfg),
      derivs_(g),
      pe_(g, Comp::Ez, cfg.h_tau()),
      phx_(g, Comp::Hx, cfg.h_tau()),
      phy_(g, Comp::Hy, cfg.h_tau()) {}

void C4Stepper::reset_warm_start() {
    warm_e_.reset();
    warm_hx_.reset();
    warm_hy_.reset();
}

Field C4Stepper::minus_p2_of_full(const CompactHelmholtz& ph, const Field& full) const {
    Field ext, lap;
    ph.embed_full(full, ext);
    ph.laplacian_ext(ext, lap);
    const auto n = ph.unknown_extents();
    const auto off = ph.grid_offset();
    const double k2 = ph.kappa2();
    const double c1 = 1.0 + 2.0 / (ph.r() * ph.r());
    const double hh12 = g_.h() * g_.h() / 12.0;
    Field out(n);
    for (int i = 0; i < n[0]; ++i)
        for (int j = 0; j < n[1]; ++j)
            out(i, j) = k2 * (c1 * full(i + off[0], j + off[1]) + hh12 * lap(i, j));
    return out;
}

void C4Stepper::step(EMStateTM& s) {
    if (!s.has_lap()) throw config_error("C4 marching needs the carried Laplacian field");
    const int N = g_.N();
    const double ht = cfg_.h_tau();
    const double Z = cfg_.Z;
    cg_last_ = 0;

    auto run_solve = [&](const CompactHelmholtz& op, const Field& rhs,
                         const std::optional<Field>& warm) {
        try {
            return op.solve(rhs, cfg_.cg_tol, cfg_.cg_max_iter, warm ? &*warm : nullptr);
        } catch (const convergence_error& e) {
            throw convergence_error("step n=" + std::to_string(s.n) + ": " + e.what(), e.residual,
                                    e.iters);
        }
    };

    // Step 1: solve for E* = delta_tau Ez, from the curl of -P2 H.
    {
        const Field gx = minus_p2_of_full(phx_, s.Hx);  // (N-1, N)
        const Field gy = minus_p2_of_full(phy_, s.Hy);  // (N, N-1)
        const Field dgy = derivs_.dmid(0, gy);          // (N-1, N-1)
        const Field dgx = derivs_.dmid(1, gx);          // (N-1, N-1)
        Field rhs(N - 1, N - 1);
        for (std::size_t q = 0; q < rhs.size(); ++q) rhs[q] = Z * (dgy[q] - dgx[q]);

        auto sol = run_solve(pe_, rhs, warm_e_);
        cg_iters_ += sol.iters;
        cg_last_ += sol.iters;
        cg_max_ = std::max(cg_max_, sol.iters);
        ++cg_solves_;

        const Field curl = derivs_.curl_h(s.Hx, s.Hy);
        for (int i = 1; i < N; ++i)
            for (int j = 1; j < N; ++j) {
                const double estar = sol.u(i - 1, j - 1);
                s.Ez(i, j) += ht * estar;
                s.lapEz(i, j) += (24.0 / ht) * (estar - Z * curl(i, j));
            }
        warm_e_ = std::move(sol.u);
    }

    // Step 2: solve for H* on both components, Laplacian of the data known
    // through the carried field.
    {
        const Field dyE = derivs_.dmid(1, s.Ez);     // (N+1, N)
        const Field dyL = derivs_.dmid(1, s.lapEz);  // (N+1, N)
        const Field dxE = derivs_.dmid(0, s.Ez);     // (N, N+1)
        const Field dxL = derivs_.dmid(0, s.lapEz);  // (N, N+1)

        auto solve_hx = [&]() {
            EllipticRhs r;
            r.mode = EllipticRhs::KnownLaplacian;
            r.f = Field(N - 1, N);
            r.lap_f = Field(N - 1, N);
            for (int i = 0; i < N - 1; ++i)
                for (int j = 0; j < N; ++j) {
                    r.f(i, j) = -dyE(i + 1, j) / Z;
                    r.lap_f(i, j) = -dyL(i + 1, j) / Z;
                }
            return run_solve(phx_, phx_.apply_p2(r), warm_hx_);
        };
        auto solve_hy = [&]() {
            EllipticRhs r;
            r.mode = EllipticRhs::KnownLaplacian;
            r.f = Field(N, N - 1);
            r.lap_f = Field(N, N - 1);
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N - 1; ++j) {
                    r.f(i, j) = dxE(i, j + 1) / Z;
                    r.lap_f(i, j) = dxL(i, j + 1) / Z;
                }
            return run_solve(phy_, phy_.apply_p2(r), warm_hy_);
        };

        auto fut = std::async(std::launch::async, solve_hy);
        auto solx = solve_hx();
        auto soly = fut.get();
        cg_iters_ += solx.iters + soly.iters;
        cg_last_ += solx.iters + soly.iters;
        cg_max_ = std::max({cg_max_, solx.iters, soly.iters});
        cg_solves_ += 2;

        for (int i = 0; i < N - 1; ++i)
            for (int j = 0; j < N; ++j) s.Hx(i + 1, j) += ht * solx.u(i, j);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N - 1; ++j) s.Hy(i, j + 1) += ht * soly.u(i, j);
        warm_hx_ = std::move(solx.u);
        warm_hy_ = std::move(soly.u);
    }

    ++s.n;
    s.tau += ht;
}

// ------------------------------------------------------------ StencilStepper

StencilStepper::StencilStepper(const StaggeredGrid& g, const RunConfig& cfg, const StencilParams& p)
    : g_(g), cfg_(cfg), p_(p) {
    if (g_.dim() != 2) throw config_error("explicit TM stepper needs a 2D grid");
    if (p_.wide() && g_.N() < 6)
        throw config_error("wide stencil rows need N >= 6, got N=" + std::to_string(g_.N()));
    if (p_.wide()) {
        const double h = g_.h();
        const double lo[5] = {-0.5 * h, 0.5 * h, 1.5 * h, 2.5 * h, 3.5 * h};
        const double hi[5] = {-3.5 * h, -2.5 * h, -1.5 * h, -0.5 * h, 0.5 * h};
        auto wl = fd_weights(0.0, std::span<const double>(lo, 5), 1);
        auto wh = fd_weights(0.0, std::span<const double>(hi, 5), 1);
        for (int k = 0; k < 5; ++k) {
            w_lo_[k] = wl[k];
            w_hi_[k] = wh[k];
        }
    }
}

// Midpoint derivative of samples along `axis`; m samples -> m-1 outputs. The
// transverse rows are added wherever the neighbor lines exist; the update
// loops only consume values whose transverse neighbors are in range.
static Field d_mid_impl(const StencilParams& p, double invh, const std::array<double, 5>& wlo,
                        const std::array<double, 5>& whi, int axis, const Field& u) {
    const auto ie = u.extents();
    const int m = ie[axis];
    auto oe = ie;
    oe[axis] = m - 1;
    Field out(oe);

    const int tr = axis == 0 ? 1 : 0;
    const int nt = ie[tr];
    const std::size_t su = axis == 0 ? std::size_t(ie[1]) : 1;
    const std::size_t st = axis == 0 ? 1 : std::size_t(ie[1]);
    const std::size_t so = axis == 0 ? std::size_t(oe[1]) : 1;
    const std::size_t sot = axis == 0 ? 1 : std::size_t(oe[1]);

    const double c = p.c(), d = p.d, a = p.a, b = p.b;
    const bool wide = p.wide();
    const bool trans = p.transverse();
    const double* up = u.data();
    double* op = out.data();

    for (int t = 0; t < nt; ++t) {
        const double* ucol = up + t * st;
        double* ocol = op + t * sot;
        for (int r = 0; r < m - 1; ++r) {
            double v;
            if (wide && r == 0) {
                v = wlo[0] * ucol[0] + wlo[1] * ucol[su] + wlo[2] * ucol[2 * su] +
                    wlo[3] * ucol[3 * su] + wlo[4] * ucol[4 * su];
            } else if (wide && r == m - 2) {
                const double* e = ucol + std::size_t(m - 5) * su;
                v = whi[0] * e[0] + whi[1] * e[su] + whi[2] * e[2 * su] + whi[3] * e[3 * su] +
                    whi[4] * e[4 * su];
            } else {
                v = c * (ucol[(r + 1) * su] - ucol[r * su]);
                if (wide) v += d * (ucol[(r + 2) * su] - ucol[std::size_t(r - 1) * su]);
                if (trans && t > 0 && t < nt - 1) {
                    const double* um = ucol - st;
                    const double* upp = ucol + st;
                    v += a * ((upp[(r + 1) * su] - upp[r * su]) + (um[(r + 1) * su] - um[r * su]));
                    if (wide)
                        v += b * ((upp[(r + 2) * su] - upp[std::size_t(r - 1) * su]) +
                                  (um[(r + 2) * su] - um[std::size_t(r - 1) * su]));
                }
                v *= invh;
            }
            ocol[r * so] = v;
        }
    }
    return out;
}

Field StencilStepper::d_h2e(int axis, const Field& u) const {
    return d_mid_impl(p_, double(g_.N()), w_lo_, w_hi_, axis, u);
}

Field StencilStepper::d_e2h(int axis, const Field& u) const {
    return d_mid_impl(p_, double(g_.N()), w_lo_, w_hi_, axis, u);
}

std::vector<double> StencilStepper::derivative_1d(std::span<const double> samples) const {
    const int m = int(samples.size());
    // constant transverse extension so the a/b rows contribute as they do on
    // the 2D mesh
    Field u(m, 3);
    for (int i = 0; i < m; ++i)
        for (int t = 0; t < 3; ++t) u(i, t) = samples[i];
    const Field d = d_mid_impl(p_, double(g_.N()), w_lo_, w_hi_, 0, u);
    std::vector<double> res(m - 1);
    for (int i = 0; i < m - 1; ++i) res[i] = d(i, 1);
    return res;
}

void StencilStepper::step(EMStateTM& s) const {
    const int N = g_.N();
    const double hz = cfg_.h_tau() * cfg_.Z;
    const double hoZ = cfg_.h_tau() / cfg_.Z;

    const Field dxHy = d_h2e(0, s.Hy);  // (N-1, N+1)
    const Field dyHx = d_h2e(1, s.Hx);  // (N+1, N-1)
    for (int i = 1; i < N; ++i)
        for (int j = 1; j < N; ++j) s.Ez(i, j) += hz * (dxHy(i - 1, j) - dyHx(i, j - 1));

    const Field dyEz = d_e2h(1, s.Ez);  // (N+1, N)
    const Field dxEz = d_e2h(0, s.Ez);  // (N, N+1)
    for (int i = 1; i < N; ++i)
        for (int j = 0; j < N; ++j) s.Hx(i, j) -= hoZ * dyEz(i, j);
    for (int i = 0; i < N; ++i)
        for (int j = 1; j < N; ++j) s.Hy(i, j) += hoZ * dxEz(i, j);

    ++s.n;
    s.tau += cfg_.h_tau();
}

// ---------------------------------------------------------------- YeeStepper

void YeeStepper::step(EMStateTM& s) const {
    const int N = g_.N();
    const double invh = double(N);
    const double hz = cfg_.h_tau() * cfg_.Z;
    const double hoZ = cfg_.h_tau() / cfg_.Z;

    Field dxHy(N - 1, N + 1), dyHx(N + 1, N - 1);
    for (int i = 0; i < N - 1; ++i)
        for (int j = 0; j < N + 1; ++j) {
            double v = (s.Hy(i + 1, j) - s.Hy(i, j));
            v *= invh;
            dxHy(i, j) = v;
        }
    for (int i = 0; i < N + 1; ++i)
        for (int j = 0; j < N - 1; ++j) {
            double v = (s.Hx(i, j + 1) - s.Hx(i, j));
            v *= invh;
            dyHx(i, j) = v;
        }
    for (int i = 1; i < N; ++i)
        for (int j = 1; j < N; ++j) s.Ez(i, j) += hz * (dxHy(i - 1, j) - dyHx(i, j - 1));

    Field dyEz(N + 1, N), dxEz(N, N + 1);
    for (int i = 0; i < N + 1; ++i)
        for (int j = 0; j < N; ++j) {
            double v = (s.Ez(i, j + 1) - s.Ez(i, j));
            v *= invh;
            dyEz(i, j) = v;
        }
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N + 1; ++j) {
            double v = (s.Ez(i + 1, j) - s.Ez(i, j));
            v *= invh;
            dxEz(i, j) = v;
        }
    for (int i = 1; i < N; ++i)
        for (int j = 0; j < N; ++j) s.Hx(i, j) -= hoZ * dyEz(i, j);
    for (int i = 0; i < N; ++i)
        for (int j = 1; j < N; ++j) s.Hy(i, j) += hoZ * dxEz(i, j);

    ++s.n;
    s.tau += cfg_.h_tau();
}

// --------------------------------------------------------------------- march

MarchOutcome march(const StaggeredGrid& g, const RunConfig& cfg, EMStateTM state, int record_stride,
                   double blowup_factor, const std::function<void(const EMStateTM&)>& observer) {
    MarchOutcome out;
    std::optional<C4Stepper> c4;
    std::optional<StencilStepper> st;
    std::optional<YeeStepper> yee;
    switch (cfg.scheme) {
        case SchemeId::C4: c4.emplace(g, cfg); break;
        case SchemeId::Yee: yee.emplace(g, cfg); break;
        case SchemeId::NC: st.emplace(g, cfg, StencilParams::nc()); break;
        case SchemeId::AI: st.emplace(g, cfg, cfg.stencil); break;
    }

    const int steps = cfg.steps();
    const double scale0 = std::max({1.0, state.Ez.max_abs(), state.Hx.max_abs(), state.Hy.max_abs()});
    const double limit = blowup_factor * scale0;

    auto record = [&](const EMStateTM& s) {
        if (record_stride <= 0) return;
        if (s.n % record_stride != 0 && s.n != steps) return;
        out.history.push_back({s.tau, cfg.h_tau(), s.Ez, s.Hx, s.Hy});
    };

    record(state);
    if (observer) observer(state);
    for (int n = 0; n < steps; ++n) {
        if (c4)
            c4->step(state);
        else if (st)
            st->step(state);
        else
            yee->step(state);
        out.steps_done = n + 1;
        const double m = std::max({state.Ez.max_abs(), state.Hx.max_abs(), state.Hy.max_abs()});
        if (!std::isfinite(m) || m > limit) {
            out.blowup = true;
            break;
        }
        record(state);
        if (observer) observer(state);
    }
    if (c4 && c4->cg_solve_count() > 0)
        out.cg_iters_mean = double(c4->cg_iters_total()) / c4->cg_solve_count();
    out.final = std::move(state);
    return out;
}

}  // namespace cem
