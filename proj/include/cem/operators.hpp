#ifndef CEM_OPERATORS_HPP
#define CEM_OPERATORS_HPP

#include <array>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "cem/array.hpp"
#include "cem/banded.hpp"
#include "cem/grid.hpp"

namespace cem {

/// Apply a 1D factor along one axis of a field: out has the same extents as
/// 'in' except ext[axis] == B.rows(). With accumulate, adds scale * result.
void apply_band(const Band1D& B, int axis, const Field& in, Field& out,
                double scale = 1.0, bool accumulate = false);

/// Restrict a field to the box [lo, lo+n).
Field crop(const Field& u, const std::array<int, 3>& lo, const std::array<int, 3>& n);

/// Linear operator given as a sum of Kronecker products of per-axis 1D
/// factors (empty optional = identity on that axis). All terms must map the
/// input shape to one common output shape.
class TensorOperator {
public:
    struct Term {
        double coeff = 1.0;
        std::array<std::optional<Band1D>, 3> factor{};
    };

    void add_term(Term t) { terms_.push_back(std::move(t)); }
    const std::vector<Term>& terms() const { return terms_; }

    std::array<int, 3> out_extents(const std::array<int, 3>& in) const;

    /// out = sum of terms applied to u (out is resized/zeroed internally).
    void apply(const Field& u, Field& out) const;

private:
    std::vector<Term> terms_;
};

/// Second-order discrete Laplacian D_xx + D_yy (+ D_zz) with homogeneous
/// Dirichlet closure on each axis, acting on interior-shaped fields.
TensorOperator laplacian_dirichlet(const std::array<int, 3>& ext, int dim, double h);

/// Cross-derivative sum D_zz D_xx + D_yy D_zz + D_xx D_yy (2D: D_xx D_yy)
/// with homogeneous Dirichlet closures.
TensorOperator upsilon_dirichlet(const std::array<int, 3>& ext, int dim, double h);

/// Fourth-order staggered first derivative: solves A d = D1 f for the
/// derivative at the m-1 midpoints of m samples spaced h apart.
class PadeDerivative {
public:
    PadeDerivative() = default;
    PadeDerivative(int m, double h);

    int samples() const { return m_; }

    /// Derivative of a plain vector of m samples.
    std::vector<double> apply(std::span<const double> f) const;

    /// Derivative along one axis of a field (in.ext[axis] == m).
    void apply(int axis, const Field& in, Field& out) const;

private:
    int m_ = 0;
    double h_ = 0.0;
    Band1D d1_;
    BandedLU lu_;
};

/// The (A, D1) pair of the fourth-order staggered derivative.
std::pair<Band1D, Band1D> assemble_pade_pair(int m, double h);

/// 2-norm of A^{-1} for the n x n Pade matrix, via power iteration on
/// (A^T A)^{-1}.
double pade_inverse_norm(int n, int iters = 200);

/// Pade first-derivative operators between the 2D TM staggered meshes.
class TmDerivs {
public:
    explicit TmDerivs(const StaggeredGrid& g);

    // Derivatives from half-integer samples onto integer interior lines.
    Field dx_h2e(const Field& hy) const;  // (N,N+1) -> (N-1,N+1)
    Field dy_h2e(const Field& hx) const;  // (N+1,N) -> (N+1,N-1)
    // Derivatives from integer samples onto the half-integer lines.
    Field dx_e2h(const Field& ez) const;  // (N+1,N+1) -> (N,N+1)
    Field dy_e2h(const Field& ez) const;  // (N+1,N+1) -> (N+1,N)

    /// delta_x Hy - delta_y Hx on the full Ez mesh (zero on the boundary).
    Field curl_h(const Field& hx, const Field& hy) const;

    /// Midpoint derivative along an axis, picking the operator by the axis
    /// extent (N or N+1 samples).
    Field dmid(int axis, const Field& u) const;

    /// (-delta_y Ez / Z, +delta_x Ez / Z) on the Hx and Hy meshes.
    std::pair<Field, Field> grad_perp(const Field& ez, double Z) const;

private:
    int N_;
    PadeDerivative half_to_int_;  // m = N samples
    PadeDerivative int_to_half_;  // m = N+1 samples
};

/// 3D curl of an H triple, sampled on the interior E meshes.
class Curl3D {
public:
    explicit Curl3D(const StaggeredGrid& g);
    std::array<Field, 3> apply_h(const std::array<Field, 3>& H) const;
    std::array<std::array<int, 3>, 3> out_extents() const;

private:
    int N_;
    PadeDerivative half_to_int_;  // m = N
    double h_;
};

/// Largest |eigenvalue| of a symmetric operator by power iteration.
double power_iteration(const std::vector<double>& seed,
                       const std::function<void(const std::vector<double>&, std::vector<double>&)>& matvec,
                       int iters);

}  // namespace cem

#endif
