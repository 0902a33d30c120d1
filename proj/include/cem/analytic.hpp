#ifndef CEM_ANALYTIC_HPP
#define CEM_ANALYTIC_HPP

#include <array>
#include <functional>
#include <vector>

#include "cem/array.hpp"
#include "cem/grid.hpp"

namespace cem {

/// Separable TM cavity eigenmode on the unit square,
///   Ez = cos(w t) sin(Z pi kx x) sin(Z pi ky y),
///   Hx = -(sin(w t)/w) pi ky sin(Z pi kx x) cos(Z pi ky y),
///   Hy =  (sin(w t)/w) pi kx cos(Z pi kx x) sin(Z pi ky y),
/// with w = Z pi sqrt(kx^2 + ky^2).
struct Eigenmode {
    int kx = 1, ky = 1;
    double Z = 1.0;

    double omega() const;

    double Ez(double tau, double x, double y) const;
    double Hx(double tau, double x, double y) const;
    double Hy(double tau, double x, double y) const;

    // Temporal derivatives of order 0..4, used by the half-step start.
    double Hx_dt(int order, double tau, double x, double y) const;
    double Hy_dt(int order, double tau, double x, double y) const;
    double Ez_dt(int order, double tau, double x, double y) const;

    /// Spatial Laplacian acts as multiplication by -(Z pi)^2 (kx^2+ky^2).
    double laplacian_factor() const;
};

/// Sample the three mode fields on their staggered meshes. E is taken at
/// tau_e; the H pair at tau_h (they live half a step apart while marching).
struct TmFields {
    Field Ez, Hx, Hy;
};
TmFields sample_mode(const Eigenmode& m, const StaggeredGrid& g, double tau_e, double tau_h);

/// One recorded marching state: Ez at tau, Hx/Hy at tau + h_tau/2.
struct TmRecord {
    double tau = 0.0;
    double h_tau = 0.0;
    Field Ez, Hx, Hy;
};

/// Mean absolute error against the exact mode over a run history, each field
/// normalized by its own node count and the number of records, H compared at
/// the half-integer times.
double mean_abs_error(const std::vector<TmRecord>& history, const Eigenmode& mode,
                      const StaggeredGrid& g);

/// Streaming variant of the error metric: the separable spatial profiles are
/// cached once, so accumulating a step costs one multiply per node.
class ModeSampler {
public:
    ModeSampler(const Eigenmode& m, const StaggeredGrid& g);

    /// Add one state: Ez compared at tau_e, the H pair at tau_e + h_tau/2.
    void accumulate(double tau_e, double h_tau, const Field& Ez, const Field& Hx, const Field& Hy);

    double mean() const;  // the assembled metric
    long records() const { return records_; }

private:
    Eigenmode mode_;
    int N_;
    std::vector<double> sxe_, sye_;  // sin profiles at integer coordinates
    std::vector<double> cyh_, cxh_;  // cos profiles at half-integer coordinates
    double se_ = 0, sx_ = 0, sy_ = 0;
    long records_ = 0;
};

/// Vector current density callbacks; each entry maps (tau, x, y, z) to one
/// Cartesian component. grad_div is grad(div J).
struct SourceCallbacks {
    using Fn = std::function<double(double, double, double, double)>;
    std::array<Fn, 3> J;
    std::array<Fn, 3> d2t_J;
    std::array<Fn, 3> grad_div_J;
    Fn rho;  // optional, only used for the conservation check
};

/// P(J) = Z (-J - grad(div J) + d^2 J / dtau^2) sampled on the E-component
/// meshes of a 3D grid.
std::array<Field, 3> eval_source_P(const SourceCallbacks& s, double tau, const StaggeredGrid& g,
                                   double Z);

/// Sampled residual of the charge-conservation identity
/// (1/c) drho/dtau + div J = 0 via centered differences; returns the max
/// residual over a fixed probe set. c enters through the rescaled time.
double charge_conservation_residual(const SourceCallbacks& s, double tau);

}  // namespace cem

#endif
