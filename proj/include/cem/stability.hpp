#ifndef CEM_STABILITY_HPP
#define CEM_STABILITY_HPP

#include <complex>
#include <stdexcept>

#include "cem/schemes.hpp"

namespace cem {

struct bracket_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Roots of the per-mode amplification polynomial
///   sigma^2 - sigma (2 - mu^2) + 1 = 0,   mu = lambda h_tau.
/// Their product is 1; |mu| <= 2 puts both on the unit circle.
struct AmplificationResult {
    double mu = 0.0;
    std::complex<double> sigma1, sigma2;
    bool stable = false;  // max |sigma| <= 1
};

AmplificationResult amplification_roots(double mu);

/// Sufficient CFL bound 1 / (sqrt(dim) * ||A^-1||).
double cfl_limit(int dim, double a_inv_norm);

/// Largest h-scaled symbol radius sqrt(gx^2 + gy^2) of the explicit TM
/// update built on the parameterized stencil; the leapfrog iteration stays
/// on the unit circle while r * radius <= 2.
double k2_symbol_radius(const StencilParams& p, int samples = 192);

/// Spectral enclosures of the scaled compact operators as functions of the
/// CFL ratio: (h_tau^2/24) P1 in [1+2/r^2-r^2/6, 1+2/r^2+r^2/2] and
/// (h_tau^2/24)(-P2) in [2/r^2, 1+2/r^2]; positive definite for
/// r < sqrt(3+sqrt(21)).
struct SpectrumBounds {
    double p1_lo = 0, p1_hi = 0;
    double np2_lo = 0, np2_hi = 0;
    bool positive = false;
};

SpectrumBounds p_spectrum_bounds(double r);

/// Empirical stability probe: march the eigenmode with a small seeded
/// perturbation and flag the run unstable when the max norm grows past the
/// threshold (or leaves the finite range) within the step budget.
struct BisectSpec {
    SchemeId scheme = SchemeId::C4;
    int N = 64;
    int kx = 2, ky = 2;
    double Z = 1.0;
    double r_lo = 0.4, r_hi = 0.75;
    int steps = 200;
    double growth_threshold = 1e3;
    double noise = 1e-8;
    unsigned seed = 1234;
    double width = 0.01;
    StencilParams stencil;  // for SchemeId::AI
};

bool run_is_unstable(const BisectSpec& spec, double r);

struct CflReport {
    int dim = 2;
    double sufficient_bound = 0.0;  // 1/(sqrt(2) ||A^-1||), measured norm
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

/// Bisect r between a stable low endpoint and an unstable high endpoint down
/// to the requested bracket width. A degenerate range with a stable run
/// returns a zero-width bracket; endpoints that agree otherwise raise
/// bracket_error.
CflReport empirical_blowup_bisect(const BisectSpec& spec);

}  // namespace cem

#endif
