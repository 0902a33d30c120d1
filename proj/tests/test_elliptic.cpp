#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cem/elliptic.hpp"
#include "cem/operators.hpp"
#include "testutil.hpp"

using namespace cem;
using namespace cemtest;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<double> seed_vec(std::size_t n) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = 1.0 + 0.21 * ((i * 2654435761u) % 23);
    return s;
}

double lambda_max(const CompactHelmholtz& op, int iters = 400) {
    const auto n = op.unknown_extents();
    return power_iteration(seed_vec(op.unknowns()),
                           [&](const std::vector<double>& x, std::vector<double>& y) {
                               Field u(n), out(n);
                               for (std::size_t q = 0; q < u.size(); ++q) u[q] = x[q];
                               op.apply_p1(u, out);
                               y.assign(out.data(), out.data() + out.size());
                           },
                           iters);
}

double lambda_min(const CompactHelmholtz& op, int iters = 400) {
    const double c = 1.0001 * lambda_max(op, iters);
    const auto n = op.unknown_extents();
    const double mu = power_iteration(seed_vec(op.unknowns()),
                                      [&](const std::vector<double>& x, std::vector<double>& y) {
                                          Field u(n), out(n);
                                          for (std::size_t q = 0; q < u.size(); ++q) u[q] = x[q];
                                          op.apply_p1(u, out);
                                          y.resize(x.size());
                                          for (std::size_t q = 0; q < x.size(); ++q)
                                              y[q] = c * x[q] - out[q];
                                      },
                                      iters);
    return c - mu;
}

// solve -Lap(phi) + k2 phi = k2 F for a separable manufactured phi on one
// component; returns the max-norm error at the unknowns
double manufactured_err(int dim, Comp comp, int N, double r,
                        const std::function<double(double, double, double)>& phi,
                        double lap_factor) {
    const StaggeredGrid g = dim == 2 ? StaggeredGrid::tm(N) : StaggeredGrid::cube(N);
    const double h_tau = r / N;
    const CompactHelmholtz op(g, comp, h_tau);
    const double k2 = op.kappa2();
    const double fscale = 1.0 - lap_factor / k2;  // F = (1 - lap/k2) phi

    const auto& mesh = g.mesh(comp);
    Field f_full(mesh.ext);
    for (int i = 0; i < mesh.ext[0]; ++i)
        for (int j = 0; j < mesh.ext[1]; ++j)
            for (int k = 0; k < (dim == 3 ? mesh.ext[2] : 1); ++k) {
                const double x = g.coord(comp, 0, i);
                const double y = g.coord(comp, 1, j);
                const double z = dim == 3 ? g.coord(comp, 2, k) : 0.0;
                f_full(i, j, k) = fscale * phi(x, y, z);
            }

    EllipticRhs rhs;
    rhs.mode = EllipticRhs::DiscreteLaplacian;
    rhs.f = f_full;
    const Field b = op.apply_p2(rhs);
    const auto sol = op.solve(b, 1e-12, 600);

    const auto off = op.grid_offset();
    const auto n = op.unknown_extents();
    double err = 0.0;
    for (int i = 0; i < n[0]; ++i)
        for (int j = 0; j < n[1]; ++j)
            for (int k = 0; k < n[2]; ++k) {
                const double x = g.coord(comp, 0, i + off[0]);
                const double y = g.coord(comp, 1, j + off[1]);
                const double z = dim == 3 ? g.coord(comp, 2, k + off[2]) : 0.0;
                err = std::max(err, std::abs(sol.u(i, j, k) - phi(x, y, z)));
            }
    return err;
}
}  // namespace

TEST_CASE("positivity refusal at the CFL-squared threshold") {
    const auto g = StaggeredGrid::tm(8);
    const double rc = positivity_limit();
    CHECK_THROWS_AS(CompactHelmholtz(g, Comp::Ez, (rc + 1e-6) / 8.0), positivity_error);
    CHECK_THROWS_AS(CompactHelmholtz(g, Comp::Ez, (rc + 10.0) / 8.0), positivity_error);
    CHECK_NOTHROW(CompactHelmholtz(g, Comp::Ez, (rc - 1e-6) / 8.0));
}

TEST_CASE("P1 is symmetric on every TM component and in 3D") {
    for (Comp c : {Comp::Ez, Comp::Hx, Comp::Hy}) {
        const auto g = StaggeredGrid::tm(8);
        const CompactHelmholtz op(g, c, 1.0 / 8.0);
        const Field u = random_field(op.unknown_extents(), 11);
        const Field v = random_field(op.unknown_extents(), 12);
        Field au, av;
        op.apply_p1(u, au);
        op.apply_p1(v, av);
        const double upv = dot(au.vec(), v.vec());
        const double uva = dot(u.vec(), av.vec());
        CHECK(rel_err(upv, uva) < 1e-12);
    }
    const auto g3 = StaggeredGrid::cube(6);
    for (Comp c : {Comp::Ez, Comp::Hx}) {
        const CompactHelmholtz op(g3, c, 0.7 / 6.0);
        const Field u = random_field(op.unknown_extents(), 21);
        const Field v = random_field(op.unknown_extents(), 22);
        Field au, av;
        op.apply_p1(u, au);
        op.apply_p1(v, av);
        CHECK(rel_err(dot(au.vec(), v.vec()), dot(u.vec(), av.vec())) < 1e-12);
    }
}

TEST_CASE("scaled P1 spectrum sits inside the closed-form interval") {
    for (double r : {0.25, 0.5, 1.0}) {
        const double lo = 1.0 + 2.0 / (r * r) - r * r / 6.0;
        const double hi = 1.0 + 2.0 / (r * r) + r * r / 2.0;
        for (int dim : {2, 3}) {
            const int N = dim == 2 ? 16 : 8;
            const auto g = dim == 2 ? StaggeredGrid::tm(N) : StaggeredGrid::cube(N);
            const CompactHelmholtz op(g, Comp::Ez, r / N);
            const double scale = (r / N) * (r / N) / 24.0;
            CHECK(scale * lambda_max(op) <= hi * 1.01);
            CHECK(scale * lambda_min(op) >= lo * 0.99);
        }
    }
    // r = 1 on the standard interval [17/6, 7/2]
    const auto g = StaggeredGrid::tm(16);
    const CompactHelmholtz op(g, Comp::Ez, 1.0 / 16.0);
    const double scale = 1.0 / (24.0 * 16.0 * 16.0);
    CHECK(scale * lambda_max(op) <= 3.5 * 1.01);
    CHECK(scale * lambda_min(op) >= (17.0 / 6.0) * 0.99);
}

TEST_CASE("P1 stays positive definite up to the threshold") {
    const auto g = StaggeredGrid::tm(8);
    for (double r : {0.5, 1.5, 2.5}) {
        const CompactHelmholtz op(g, Comp::Ez, r / 8.0);
        CHECK(lambda_min(op) > 0.0);
    }
}

TEST_CASE("-P2 norm lands in the closed-form interval") {
    const int N = 16;
    const double r = 1.0;
    const auto g = StaggeredGrid::tm(N);
    const CompactHelmholtz op(g, Comp::Ez, r / N);
    const auto n = op.unknown_extents();
    const double nrm = power_iteration(seed_vec(op.unknowns()),
                                       [&](const std::vector<double>& x, std::vector<double>& y) {
                                           Field u(n), out(n);
                                           for (std::size_t q = 0; q < u.size(); ++q) u[q] = x[q];
                                           op.apply_neg_p2(u, out);
                                           y.assign(out.data(), out.data() + out.size());
                                       },
                                       400);
    const double scaled = (r / N) * (r / N) / 24.0 * nrm;
    CHECK(scaled >= 2.0);        // 2/r^2
    CHECK(scaled <= 3.0 * 1.01); // 1 + 2/r^2
}

TEST_CASE("right-hand-side builder") {
    const auto g = StaggeredGrid::tm(6);
    const CompactHelmholtz op(g, Comp::Ez, 0.5 / 6.0);

    SUBCASE("zero F gives zero rhs") {
        EllipticRhs rhs;
        rhs.mode = EllipticRhs::DiscreteLaplacian;
        rhs.f = Field(g.mesh(Comp::Ez).ext);
        const Field b = op.apply_p2(rhs);
        CHECK(b.max_abs() == 0.0);
    }
    SUBCASE("constant F: the Laplacian correction vanishes") {
        EllipticRhs rhs;
        rhs.mode = EllipticRhs::DiscreteLaplacian;
        rhs.f = Field(g.mesh(Comp::Ez).ext);
        rhs.f.fill(1.0);
        const Field b = op.apply_p2(rhs);
        const double want = op.kappa2() * (1.0 + 2.0 / (op.r() * op.r()));
        for (std::size_t q = 0; q < b.size(); ++q)
            CHECK(b[q] == doctest::Approx(want).epsilon(1e-12));
    }
    SUBCASE("known-Laplacian mode requires the Laplacian field") {
        EllipticRhs rhs;
        rhs.mode = EllipticRhs::KnownLaplacian;
        rhs.f = Field(op.unknown_extents());
        CHECK_THROWS_AS((void)op.apply_p2(rhs), size_error);
    }
}

TEST_CASE("ghost closures") {
    const double h = 0.05;
    const double k2 = 37.0;

    SUBCASE("mirror: zero shift, exact for even data") {
        CHECK(neumann_ghost_closure(NeumannMethod::Mirror, false, h, k2, 0.0).shift == 0.0);
        // phi = cos(pi x) about x = 0: ghost equals the mirrored neighbor
        const double inside = std::cos(kPi * 0.5 * h);
        const double ghost = inside + 0.0;
        CHECK(ghost == doctest::Approx(std::cos(-kPi * 0.5 * h)).epsilon(1e-15));
    }

    SUBCASE("taylor-based formula and its exactness for cos(pi x) at x=0") {
        // g = 0 and phi_xxx = 0 there, so the ghost reproduces phi(-h/2)
        const auto gc = neumann_ghost_closure(NeumannMethod::TaylorBased, false, h, k2, 0.0, {}, {}, 0.0);
        const double ghost = std::cos(kPi * 0.5 * h) + gc.shift;
        CHECK(std::abs(ghost - std::cos(-kPi * 0.5 * h)) < 1e-15);
    }

    SUBCASE("taylor-based closure is high order with exact derivative data") {
        // shifted cosine: nonzero g and phi_xxx at the face
        const auto err_at = [&](double hh) {
            const auto phi = [](double x) { return std::cos(kPi * (x - 0.3)); };
            const double g = kPi * std::sin(kPi * 0.3);
            const double pxxx = -kPi * kPi * kPi * std::sin(kPi * 0.3);
            const auto gc =
                neumann_ghost_closure(NeumannMethod::TaylorBased, false, hh, k2, g, {}, {}, pxxx);
            return std::abs(phi(0.5 * hh) + gc.shift - phi(-0.5 * hh));
        };
        const double ratio = err_at(0.1) / err_at(0.05);
        CHECK(ratio > 16.0);  // fifth-order ghost with exact data
        CHECK(ratio < 44.0);
    }

    SUBCASE("equation-based closure at a face where F_n vanishes") {
        // phi = sinh(p x) cos(pi y), p^2 = k2 + pi^2 makes F_x(0, y) = 0
        const double p = std::sqrt(k2 + kPi * kPi);
        const double y = 0.3;
        const auto err_at = [&](double hh) {
            const auto phi = [&](double x) { return std::sinh(p * x) * std::cos(kPi * y); };
            const double g = p * std::cos(kPi * y);
            const double tang = -kPi * kPi * g;  // phi_xyy at x=0
            const auto gc =
                neumann_ghost_closure(NeumannMethod::EquationBased, false, hh, k2, g, tang, 0.0);
            return std::abs(phi(0.5 * hh) + gc.shift - phi(-0.5 * hh));
        };
        const double ratio = err_at(0.1) / err_at(0.05);
        CHECK(ratio > 20.0);
        CHECK(ratio < 44.0);
    }

    SUBCASE("high-face sign flip") {
        const auto lo = neumann_ghost_closure(NeumannMethod::TaylorBased, false, h, k2, 0.4, {}, {}, 2.0);
        const auto hi = neumann_ghost_closure(NeumannMethod::TaylorBased, true, h, k2, 0.4, {}, {}, 2.0);
        CHECK(lo.shift == doctest::Approx(-hi.shift));
        CHECK(lo.shift == doctest::Approx(-(h * 0.4 + h * h * h / 24.0 * 2.0)));
    }

    SUBCASE("missing correction data") {
        CHECK_THROWS_AS(
            (void)neumann_ghost_closure(NeumannMethod::EquationBased, false, h, k2, 1.0),
            std::invalid_argument);
        CHECK_THROWS_AS(
            (void)neumann_ghost_closure(NeumannMethod::TaylorBased, false, h, k2, 1.0),
            std::invalid_argument);
    }
}

TEST_CASE("zero right-hand side solves in zero iterations") {
    const auto g = StaggeredGrid::tm(8);
    const CompactHelmholtz op(g, Comp::Ez, 0.5 / 8.0);
    const Field b(op.unknown_extents());
    const auto res = op.solve(b);
    CHECK(res.iters == 0);
    CHECK(res.u.max_abs() == 0.0);
}

TEST_CASE("manufactured solutions recover fourth order") {
    SUBCASE("Dirichlet-only (Ez component)") {
        const auto phi = [](double x, double y, double) {
            return std::sin(kPi * x) * std::sin(kPi * y);
        };
        const double lf = -2.0 * kPi * kPi;
        const double e16 = manufactured_err(2, Comp::Ez, 16, 1.0, phi, lf);
        const double e32 = manufactured_err(2, Comp::Ez, 32, 1.0, phi, lf);
        const double e64 = manufactured_err(2, Comp::Ez, 64, 1.0, phi, lf);
        CHECK(std::log2(e16 / e32) == doctest::Approx(4.0).epsilon(0.12));
        CHECK(std::log2(e32 / e64) == doctest::Approx(4.0).epsilon(0.12));
    }
    SUBCASE("Dirichlet + mirror Neumann (Hx component)") {
        const auto phi = [](double x, double y, double) {
            return std::sin(kPi * x) * std::cos(kPi * y);
        };
        const double lf = -2.0 * kPi * kPi;
        const double e16 = manufactured_err(2, Comp::Hx, 16, 0.8, phi, lf);
        const double e32 = manufactured_err(2, Comp::Hx, 32, 0.8, phi, lf);
        CHECK(std::log2(e16 / e32) == doctest::Approx(4.0).epsilon(0.15));
    }
    SUBCASE("3D component with a mirror axis") {
        const auto phi = [](double x, double y, double z) {
            return std::sin(kPi * x) * std::sin(kPi * y) * std::cos(kPi * z);
        };
        const double lf = -3.0 * kPi * kPi;
        const double e8 = manufactured_err(3, Comp::Ez, 8, 0.8, phi, lf);
        const double e16 = manufactured_err(3, Comp::Ez, 16, 0.8, phi, lf);
        CHECK(std::log2(e8 / e16) == doctest::Approx(4.0).epsilon(0.2));
    }
    SUBCASE("3D component with two mirror axes") {
        // Hx-type closure pattern: pinned at the x faces, mirrored in y and z
        const auto phi = [](double x, double y, double z) {
            return std::sin(kPi * x) * std::cos(kPi * y) * std::cos(kPi * z);
        };
        const double lf = -3.0 * kPi * kPi;
        const double e8 = manufactured_err(3, Comp::Hx, 8, 0.8, phi, lf);
        const double e16 = manufactured_err(3, Comp::Hx, 16, 0.8, phi, lf);
        CHECK(std::log2(e8 / e16) == doctest::Approx(4.0).epsilon(0.2));
    }
}

TEST_CASE("inhomogeneous Dirichlet data enters through the boundary contribution") {
    // phi = sin(pi x) sin(pi y) + x has nonzero face values; the affine part
    // passes through the compact operator without truncation error
    const auto phi = [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y) + x; };
    const auto run = [&](int N) {
        const auto g = StaggeredGrid::tm(N);
        const CompactHelmholtz op(g, Comp::Ez, 1.0 / N);
        const double k2 = op.kappa2();
        const auto& mesh = g.mesh(Comp::Ez);
        Field f_full(mesh.ext);
        for (int i = 0; i <= N; ++i)
            for (int j = 0; j <= N; ++j) {
                const double x = double(i) / N, y = double(j) / N;
                f_full(i, j) = (1.0 + 2.0 * kPi * kPi / k2) * std::sin(kPi * x) * std::sin(kPi * y) + x;
            }
        EllipticRhs rhs;
        rhs.mode = EllipticRhs::DiscreteLaplacian;
        rhs.f = f_full;
        std::array<FaceData, 6> fd{};
        const auto dir = [&](const std::array<int, 3>& gi) {
            return phi(double(gi[0]) / N, double(gi[1]) / N);
        };
        for (int f = 0; f < 4; ++f) fd[f].dirichlet = dir;
        Field b = op.apply_p2(rhs);
        const Field bc = op.boundary_contribution(fd);
        for (std::size_t q = 0; q < b.size(); ++q) b[q] -= bc[q];
        const auto sol = op.solve(b, 1e-12, 600);
        double err = 0.0;
        for (int i = 0; i < N - 1; ++i)
            for (int j = 0; j < N - 1; ++j)
                err = std::max(err, std::abs(sol.u(i, j) - phi((i + 1.0) / N, (j + 1.0) / N)));
        return err;
    };
    const double e16 = run(16), e32 = run(32);
    CHECK(std::log2(e16 / e32) == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("inhomogeneous Neumann data through taylor-based ghost shifts") {
    // phi = sin(pi x) cos(pi (y - 0.3)) on the Hx component: nonzero normal
    // derivative at both y faces
    const double s = 0.3;
    const auto phi = [&](double x, double y) { return std::sin(kPi * x) * std::cos(kPi * (y - s)); };
    const auto run = [&](int N) {
        const auto g = StaggeredGrid::tm(N);
        const CompactHelmholtz op(g, Comp::Hx, 0.9 / N);
        const double k2 = op.kappa2();
        const double fs = 1.0 + 2.0 * kPi * kPi / k2;
        const double h = 1.0 / N;

        const auto& mesh = g.mesh(Comp::Hx);
        Field f_full(mesh.ext);
        for (int i = 0; i <= N; ++i)
            for (int j = 0; j < N; ++j)
                f_full(i, j) = fs * phi(double(i) / N, (j + 0.5) / N);

        // ghost shifts for phi and for F = fs * phi (order-2 axis = y)
        const auto shift_for = [&](double scale) {
            return [&, scale](bool high) {
                return [&, scale, high](const std::array<int, 3>& gi) {
                    const double x = double(gi[0]) / N;
                    const double y = high ? 1.0 : 0.0;
                    const double g1 = -kPi * std::sin(kPi * x) * std::sin(kPi * (y - s));
                    const double g3 = kPi * kPi * kPi * std::sin(kPi * x) * std::sin(kPi * (y - s));
                    const auto gc = neumann_ghost_closure(NeumannMethod::TaylorBased, high, h, k2,
                                                          scale * g1, {}, {}, scale * g3);
                    return gc.shift;
                };
            };
        };
        std::array<FaceData, 6> fd_phi{}, fd_f{};
        fd_phi[2].ghost_shift = shift_for(1.0)(false);
        fd_phi[3].ghost_shift = shift_for(1.0)(true);
        fd_f[2].ghost_shift = shift_for(fs)(false);
        fd_f[3].ghost_shift = shift_for(fs)(true);

        EllipticRhs rhs;
        rhs.mode = EllipticRhs::DiscreteLaplacian;
        rhs.f = f_full;
        Field b = op.apply_p2(rhs, &fd_f);
        const Field bc = op.boundary_contribution(fd_phi);
        for (std::size_t q = 0; q < b.size(); ++q) b[q] -= bc[q];
        const auto sol = op.solve(b, 1e-12, 600);
        double err = 0.0;
        for (int i = 0; i < N - 1; ++i)
            for (int j = 0; j < N; ++j)
                err = std::max(err, std::abs(sol.u(i, j) - phi((i + 1.0) / N, (j + 0.5) / N)));
        return err;
    };
    const double e16 = run(16), e32 = run(32);
    CHECK(std::log2(e16 / e32) == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("CG error decreases monotonically in the operator norm") {
    const int N = 6;
    const auto g = StaggeredGrid::tm(N);
    const CompactHelmholtz op(g, Comp::Ez, 1.2 / N);
    const int dim = int(op.unknowns());

    const Field b = random_field(op.unknown_extents(), 5);
    // dense reference solution
    const auto dense = to_dense(dim, dim, [&](const std::vector<double>& x) {
        Field u(op.unknown_extents()), y;
        for (int q = 0; q < dim; ++q) u[q] = x[q];
        op.apply_p1(u, y);
        return std::vector<double>(y.data(), y.data() + y.size());
    });
    // gaussian elimination
    auto a = dense;
    std::vector<double> xs(b.data(), b.data() + b.size());
    for (int k = 0; k < dim; ++k) {
        for (int i = k + 1; i < dim; ++i) {
            const double l = a[i][k] / a[k][k];
            for (int j = k; j < dim; ++j) a[i][j] -= l * a[k][j];
            xs[i] -= l * xs[k];
        }
    }
    for (int i = dim - 1; i >= 0; --i) {
        for (int j = i + 1; j < dim; ++j) xs[i] -= a[i][j] * xs[j];
        xs[i] /= a[i][i];
    }

    double prev = std::numeric_limits<double>::infinity();
    int seen = 0;
    const auto res = op.solve(b, 1e-13, 300, nullptr, [&](int, double, const Field& u) {
        Field e(op.unknown_extents()), ae;
        for (int q = 0; q < dim; ++q) e[q] = u[q] - xs[q];
        op.apply_p1(e, ae);
        const double anorm = dot(e.vec(), ae.vec());
        CHECK(anorm <= prev * (1.0 + 1e-12));
        prev = anorm;
        ++seen;
    });
    CHECK(seen == res.iters);
    CHECK(res.iters > 0);
}

TEST_CASE("CG reports non-convergence with the residual attached") {
    const auto g = StaggeredGrid::tm(16);
    const CompactHelmholtz op(g, Comp::Ez, 1.0 / 16.0);
    const Field b = random_field(op.unknown_extents(), 9);
    try {
        (void)op.solve(b, 1e-14, 1);
        FAIL("expected convergence_error");
    } catch (const convergence_error& e) {
        CHECK(e.iters == 1);
        CHECK(e.residual > 0.0);
        CHECK(std::isfinite(e.residual));
    }
}
