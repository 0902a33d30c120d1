#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cem/operators.hpp"
#include "cem/stability.hpp"

using namespace cem;

namespace {
constexpr double kCfl5 = 5.0 / (6.0 * 1.4142135623730951);
}

TEST_CASE("amplification roots at landmark values") {
    const auto r0 = amplification_roots(0.0);
    CHECK(r0.sigma1 == std::complex<double>(1.0, 0.0));
    CHECK(r0.sigma2 == std::complex<double>(1.0, 0.0));
    CHECK(r0.stable);

    const auto r2 = amplification_roots(2.0);
    CHECK(r2.sigma1.real() == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(r2.sigma1.imag()) < 1e-14);
    CHECK(r2.stable);

    const auto r1 = amplification_roots(1.0);
    CHECK(std::abs(r1.sigma1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(r1.sigma2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r1.sigma1 == std::conj(r1.sigma2));
}

TEST_CASE("root product is one and the unit-modulus dichotomy holds") {
    for (int k = -3000; k <= 3000; ++k) {
        const double mu = k * 1e-3;
        const auto res = amplification_roots(mu);
        const auto prod = res.sigma1 * res.sigma2;
        CHECK(std::abs(prod - std::complex<double>(1.0, 0.0)) < 1e-12);
        const double mx = std::max(std::abs(res.sigma1), std::abs(res.sigma2));
        if (std::abs(mu) <= 2.0) {
            CHECK(std::abs(mx - 1.0) <= 1e-12);
            CHECK(res.stable);
        } else {
            CHECK(mx > 1.0 + 1e-12);
            CHECK(!res.stable);
        }
    }
}

TEST_CASE("sufficient CFL bounds") {
    CHECK(cfl_limit(3, 1.2) == doctest::Approx(5.0 / (6.0 * std::sqrt(3.0))).epsilon(1e-14));
    CHECK(cfl_limit(2, 1.2) == doctest::Approx(5.0 / (6.0 * std::sqrt(2.0))).epsilon(1e-14));
    CHECK(cfl_limit(3, 1.0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(cfl_limit(2, 1.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(cfl_limit(3, 1.2) == doctest::Approx(0.4811).epsilon(1e-3));
    CHECK(cfl_limit(2, 1.2) == doctest::Approx(0.5893).epsilon(1e-3));
}

TEST_CASE("spectral enclosures as functions of the CFL ratio") {
    const auto b1 = p_spectrum_bounds(1.0);
    CHECK(b1.p1_lo == doctest::Approx(17.0 / 6.0).epsilon(1e-14));
    CHECK(b1.p1_hi == doctest::Approx(3.5).epsilon(1e-14));
    CHECK(b1.np2_lo == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(b1.np2_hi == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(b1.positive);

    const double rc = positivity_limit();
    const auto bc = p_spectrum_bounds(rc);
    CHECK(std::abs(bc.p1_lo) < 1e-12);  // r^4 - 6r^2 - 12 = 0 at the boundary
    CHECK(!bc.positive);
    CHECK(p_spectrum_bounds(rc - 1e-6).positive);

    const auto b0 = p_spectrum_bounds(1e-3);
    CHECK(b0.np2_lo > 1e6 - 1.0);
    CHECK(b0.p1_lo > 1e6 - 1.0);
}

TEST_CASE("assembled operator extremes respect the enclosure (cross-module)") {
    const int N = 8;
    const auto g = StaggeredGrid::tm(N);
    for (double r : {0.25, 0.5, 1.0}) {
        const CompactHelmholtz op(g, Comp::Ez, r / N);
        const auto bounds = p_spectrum_bounds(r);
        std::vector<double> seed(op.unknowns());
        for (std::size_t i = 0; i < seed.size(); ++i) seed[i] = 1.0 + ((i * 131) % 17) * 0.1;
        const double scale = (r / N) * (r / N) / 24.0;
        const double hi = scale * power_iteration(
                                      seed,
                                      [&](const std::vector<double>& x, std::vector<double>& y) {
                                          Field u(op.unknown_extents()), out;
                                          for (std::size_t q = 0; q < x.size(); ++q) u[q] = x[q];
                                          op.apply_p1(u, out);
                                          y.assign(out.data(), out.data() + out.size());
                                      },
                                      300);
        CHECK(hi <= bounds.p1_hi * 1.01);
        CHECK(hi >= bounds.p1_lo);
    }
}

TEST_CASE("empirical stability of the compact scheme brackets above the sufficient bound") {
    BisectSpec spec;
    spec.scheme = SchemeId::C4;
    spec.N = 32;
    spec.r_lo = 0.55;
    spec.r_hi = 0.72;

    CHECK_FALSE(run_is_unstable(spec, kCfl5));
    CHECK(run_is_unstable(spec, 1.0 / std::sqrt(2.0)));

    const auto rep = empirical_blowup_bisect(spec);
    CHECK(rep.bracket_hi - rep.bracket_lo <= 0.01 + 1e-12);
    CHECK(rep.bracket_lo >= rep.sufficient_bound);
    CHECK(rep.sufficient_bound == doctest::Approx(kCfl5).epsilon(0.05));
}

TEST_CASE("the compact scheme at N=64 is stable at the working CFL and blows up at the Yee limit") {
    BisectSpec spec;
    spec.scheme = SchemeId::C4;
    spec.N = 64;
    CHECK_FALSE(run_is_unstable(spec, kCfl5));
    CHECK(run_is_unstable(spec, 1.0 / std::sqrt(2.0)));
}

TEST_CASE("Yee blowup threshold sits near the classical limit") {
    BisectSpec spec;
    spec.scheme = SchemeId::Yee;
    spec.N = 32;
    spec.r_lo = 0.6;
    spec.r_hi = 0.75;
    const auto rep = empirical_blowup_bisect(spec);
    const double mid = 0.5 * (rep.bracket_lo + rep.bracket_hi);
    CHECK(mid > kCfl5);
    CHECK(mid == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.04));
}

TEST_CASE("bisect range validation") {
    BisectSpec spec;
    spec.scheme = SchemeId::Yee;
    spec.N = 16;
    spec.steps = 100;

    SUBCASE("degenerate stable range gives a zero-width bracket") {
        spec.r_lo = spec.r_hi = 0.1;
        const auto rep = empirical_blowup_bisect(spec);
        CHECK(rep.bracket_lo == 0.1);
        CHECK(rep.bracket_hi == 0.1);
    }
    SUBCASE("both endpoints stable") {
        spec.r_lo = 0.1;
        spec.r_hi = 0.2;
        CHECK_THROWS_AS((void)empirical_blowup_bisect(spec), bracket_error);
    }
    SUBCASE("both endpoints unstable") {
        spec.r_lo = 0.74;
        spec.r_hi = 0.76;
        CHECK_THROWS_AS((void)empirical_blowup_bisect(spec), bracket_error);
    }
}
