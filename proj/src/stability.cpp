#include "cem/stability.hpp"

#include <cmath>
#include <future>
#include <random>

#include "cem/operators.hpp"

namespace cem {

AmplificationResult amplification_roots(double mu) {
    AmplificationResult res;
    res.mu = mu;
    const double p = 2.0 - mu * mu;  // sigma1 + sigma2
    const double disc = p * p - 4.0;
    if (disc <= 0.0) {
        const double im = std::sqrt(-disc) / 2.0;
        res.sigma1 = {p / 2.0, im};
        res.sigma2 = {p / 2.0, -im};
        res.stable = true;  // conjugate pair with product 1
    } else {
        const double root = std::sqrt(disc);
        res.sigma1 = {(p - root) / 2.0, 0.0};
        res.sigma2 = {(p + root) / 2.0, 0.0};
        res.stable = std::max(std::abs(res.sigma1), std::abs(res.sigma2)) <= 1.0;
    }
    return res;
}

double cfl_limit(int dim, double a_inv_norm) {
    if (a_inv_norm <= 0.0) throw std::invalid_argument("cfl_limit: norm must be positive");
    return 1.0 / (std::sqrt(double(dim)) * a_inv_norm);
}

double k2_symbol_radius(const StencilParams& p, int samples) {
    const double c = p.c();
    // h * derivative symbol at longitudinal angle tl with transverse angle tt
    const auto ghat = [&](double tl, double tt) {
        return 2.0 * ((c + 2.0 * p.a * std::cos(tt)) * std::sin(0.5 * tl) +
                      (p.d + 2.0 * p.b * std::cos(tt)) * std::sin(1.5 * tl));
    };
    constexpr double pi = 3.14159265358979323846;
    double worst = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double tx = pi * i / samples;
        for (int j = 0; j <= samples; ++j) {
            const double ty = pi * j / samples;
            const double gx = ghat(tx, ty);
            const double gy = ghat(ty, tx);
            worst = std::max(worst, std::sqrt(gx * gx + gy * gy));
        }
    }
    return worst;
}

SpectrumBounds p_spectrum_bounds(double r) {
    if (r <= 0.0) throw std::invalid_argument("p_spectrum_bounds: r must be positive");
    SpectrumBounds b;
    const double rr = r * r;
    b.p1_lo = 1.0 + 2.0 / rr - rr / 6.0;
    b.p1_hi = 1.0 + 2.0 / rr + rr / 2.0;
    b.np2_lo = 2.0 / rr;
    b.np2_hi = 1.0 + 2.0 / rr;
    b.positive = r < positivity_limit();
    return b;
}

bool run_is_unstable(const BisectSpec& spec, double r) {
    const StaggeredGrid g = StaggeredGrid::tm(spec.N);
    RunConfig cfg;
    cfg.scheme = spec.scheme;
    cfg.N = spec.N;
    cfg.r = r;
    cfg.T = spec.steps * r / spec.N;  // exactly `steps` updates
    cfg.Z = spec.Z;
    cfg.kx = spec.kx;
    cfg.ky = spec.ky;
    cfg.stencil = spec.stencil;

    Eigenmode mode{spec.kx, spec.ky, spec.Z};
    EMStateTM s = eigenmode_state(g, mode, cfg.h_tau(), spec.scheme == SchemeId::C4);

    if (spec.noise > 0.0) {
        std::mt19937 rng(spec.seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const double amp =
            spec.noise * std::max({1.0, s.Ez.max_abs(), s.Hx.max_abs(), s.Hy.max_abs()});
        const int N = spec.N;
        for (int i = 1; i < N; ++i)
            for (int j = 1; j < N; ++j) s.Ez(i, j) += amp * u(rng);
        for (int i = 1; i < N; ++i)
            for (int j = 0; j < N; ++j) s.Hx(i, j) += amp * u(rng);
        for (int i = 0; i < N; ++i)
            for (int j = 1; j < N; ++j) s.Hy(i, j) += amp * u(rng);
    }

    try {
        const MarchOutcome out = march(g, cfg, std::move(s), 0, spec.growth_threshold);
        return out.blowup;
    } catch (const convergence_error&) {
        return true;  // solver breakdown past the stability range counts as blowup
    }
}

CflReport empirical_blowup_bisect(const BisectSpec& spec) {
    if (spec.r_lo > spec.r_hi) throw bracket_error("empty r range");
    CflReport rep;
    rep.dim = 2;
    rep.sufficient_bound = cfl_limit(2, pade_inverse_norm(spec.N - 1));

    if (spec.r_lo == spec.r_hi) {
        if (run_is_unstable(spec, spec.r_lo))
            throw bracket_error("degenerate range is unstable; nothing to bracket");
        rep.bracket_lo = rep.bracket_hi = spec.r_lo;
        return rep;
    }

    auto lo_fut = std::async(std::launch::async, [&] { return run_is_unstable(spec, spec.r_lo); });
    const bool hi_unstable = run_is_unstable(spec, spec.r_hi);
    const bool lo_unstable = lo_fut.get();
    if (lo_unstable) throw bracket_error("low endpoint already unstable");
    if (!hi_unstable) throw bracket_error("high endpoint still stable");

    double lo = spec.r_lo, hi = spec.r_hi;
    while (hi - lo > spec.width) {
        const double mid = 0.5 * (lo + hi);
        if (run_is_unstable(spec, mid))
            hi = mid;
        else
            lo = mid;
    }
    rep.bracket_lo = lo;
    rep.bracket_hi = hi;
    return rep;
}

}  // namespace cem
