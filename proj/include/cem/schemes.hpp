#ifndef CEM_SCHEMES_HPP
#define CEM_SCHEMES_HPP

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <utility>

#include "cem/analytic.hpp"
#include "cem/array.hpp"
#include "cem/elliptic.hpp"
#include "cem/grid.hpp"
#include "cem/operators.hpp"

namespace cem {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Free parameters (a, b, d) of the 3x4 first-derivative stencil family; the
/// remaining coefficient is pinned by second-order consistency,
/// c = 1 - 3d - 2a - 6b.
struct StencilParams {
    double a = 0.0, b = 0.0, d = 0.0;

    double c() const { return 1.0 - 3.0 * d - 2.0 * a - 6.0 * b; }

    /// Fourth-order constraints c + 27d + 2a + 54b = 0 and a + 3b = 0.
    bool fourth_order(double eps = 1e-12) const {
        return std::abs(c() + 27.0 * d + 2.0 * a + 54.0 * b) <= eps && std::abs(a + 3.0 * b) <= eps;
    }

    bool wide() const { return d != 0.0 || b != 0.0; }
    bool transverse() const { return a != 0.0 || b != 0.0; }

    static StencilParams yee() { return {0.0, 0.0, 0.0}; }
    /// K4 family: b = -a/3, d = (16a-1)/24 (so c = (9-16a)/8).
    static StencilParams k4(double a);
    /// The non-compact fourth-order scheme: K4 with a = 0.
    static StencilParams nc() { return k4(0.0); }
};

enum class SchemeId { C4, Yee, NC, AI };

const char* scheme_name(SchemeId s);
SchemeId scheme_from_name(const std::string& name);

struct RunConfig {
    SchemeId scheme = SchemeId::C4;
    int N = 64;
    double r = 5.0 / (6.0 * std::sqrt(2.0));
    double T = 1.0 / std::sqrt(2.0);
    double Z = 1.0;
    int kx = 2, ky = 2;
    double cg_tol = 1e-10;
    int cg_max_iter = 200;
    StencilParams stencil;  // used by SchemeId::AI

    double h() const { return 1.0 / N; }
    double h_tau() const { return r / N; }
    int steps() const { return int(std::llround(T / h_tau())); }
};

/// Marching state: Ez at tau = n h_tau, Hx/Hy at tau + h_tau/2, and for the
/// compact scheme the carried discrete Laplacian of Ez.
struct EMStateTM {
    int n = 0;
    double tau = 0.0;
    Field Ez, Hx, Hy;
    Field lapEz;  // empty unless carried

    bool has_lap() const { return lapEz.size() > 0; }
};

EMStateTM zero_state(const StaggeredGrid& g, bool carry_lap);

/// Fourth-order Taylor start for H at tau = h_tau/2. The five callbacks
/// produce (Hx, Hy) temporal-derivative samples of order 0..4 at tau = 0;
/// order 1 is -(1/Z) curl E(0) and orders 2..4 come from the wave-equation
/// relations. A missing callback is a configuration error.
using FieldPairFn = std::function<std::pair<Field, Field>()>;
std::pair<Field, Field> init_half_step_H(const std::array<FieldPairFn, 5>& h_derivs, double h_tau);

/// Exact-mode callbacks for init_half_step_H.
std::array<FieldPairFn, 5> eigenmode_taylor_callbacks(const Eigenmode& m, const StaggeredGrid& g);

/// State at n = 0 for the exact mode: Ez sampled at tau 0, H from the Taylor
/// half step; the carried Laplacian is seeded analytically when requested.
EMStateTM eigenmode_state(const StaggeredGrid& g, const Eigenmode& m, double h_tau, bool carry_lap);

/// Two-step compact marcher: a modified-Helmholtz solve per field component
/// and half step, warm-started from the previous time derivative.
class C4Stepper {
public:
    C4Stepper(const StaggeredGrid& g, const RunConfig& cfg);

    void step(EMStateTM& s);

    long long cg_iters_total() const { return cg_iters_; }
    int cg_solve_count() const { return cg_solves_; }
    int cg_iters_last_step() const { return cg_last_; }
    int cg_iters_max() const { return cg_max_; }
    void reset_warm_start();

private:
    StaggeredGrid g_;
    RunConfig cfg_;
    TmDerivs derivs_;
    CompactHelmholtz pe_, phx_, phy_;
    std::optional<Field> warm_e_, warm_hx_, warm_hy_;
    long long cg_iters_ = 0;
    int cg_solves_ = 0;
    int cg_last_ = 0;
    int cg_max_ = 0;

    Field minus_p2_of_full(const CompactHelmholtz& ph, const Field& full) const;
};

/// Explicit leapfrog with the parameterized 3x4 derivative stencil; rows
/// whose wide offsets leave the mesh fall back to the one-sided fourth-order
/// rule.
class StencilStepper {
public:
    StencilStepper(const StaggeredGrid& g, const RunConfig& cfg, const StencilParams& p);

    void step(EMStateTM& s) const;

    /// Longitudinal derivative of samples at midpoints (exposed for the
    /// stencil-order tests): n samples spaced h -> n-1 midpoint values.
    std::vector<double> derivative_1d(std::span<const double> samples) const;

private:
    StaggeredGrid g_;
    RunConfig cfg_;
    StencilParams p_;
    std::array<double, 5> w_lo_{}, w_hi_{};  // one-sided rows

    Field d_h2e(int axis, const Field& u) const;
    Field d_e2h(int axis, const Field& u) const;
    friend class YeeStepper;
};

/// Plain Yee update with two-point staggered differences; kept separate so
/// the stencil engine can be checked against it bit for bit.
class YeeStepper {
public:
    YeeStepper(const StaggeredGrid& g, const RunConfig& cfg) : g_(g), cfg_(cfg) {}
    void step(EMStateTM& s) const;

private:
    StaggeredGrid g_;
    RunConfig cfg_;
};

/// March a state to round(T/h_tau) steps, recording every stride-th state.
/// Returns false (and stops early) when the run blows up, i.e. the max norm
/// exceeds blowup_factor * max(1, initial max norm) or goes non-finite.
struct MarchOutcome {
    std::vector<TmRecord> history;
    EMStateTM final;
    bool blowup = false;
    int steps_done = 0;
    double cg_iters_mean = 0.0;
};

MarchOutcome march(const StaggeredGrid& g, const RunConfig& cfg, EMStateTM state,
                   int record_stride = 1, double blowup_factor = 1e6,
                   const std::function<void(const EMStateTM&)>& observer = {});

}  // namespace cem

#endif
