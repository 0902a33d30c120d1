#ifndef CEM_ELLIPTIC_HPP
#define CEM_ELLIPTIC_HPP

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "cem/array.hpp"
#include "cem/banded.hpp"
#include "cem/grid.hpp"

namespace cem {

struct positivity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct convergence_error : std::runtime_error {
    convergence_error(const std::string& msg, double residual_, int iters_)
        : std::runtime_error(msg), residual(residual_), iters(iters_) {}
    double residual;
    int iters;
};

/// CFL bound below which the compact operators stay positive definite.
inline double positivity_limit() { return std::sqrt(3.0 + std::sqrt(21.0)); }

enum class NeumannMethod { Mirror, EquationBased, TaylorBased };

/// Ghost value phi(face -/+ h/2) expressed as (mirror of the first inside
/// value) + shift. The shift collects the known data: the Neumann value g
/// and, depending on the method, tangential/forcing corrections or the third
/// normal derivative.
struct GhostClosure {
    double shift = 0.0;  // ghost = inside + shift
};

/// Compute the ghost shift for one face node.
///   g          Neumann data (normal derivative, outward axis direction)
///   tangential phi_t1t1n + phi_t2t2n at the face (equation-based only)
///   f_n        normal derivative of the right-hand side F (equation-based)
///   phi_nnn    third normal derivative at the face (Taylor-based only)
/// high = true for the face at coordinate 1.
GhostClosure neumann_ghost_closure(NeumannMethod method, bool high, double h, double kappa2,
                                   double g, std::optional<double> tangential = {},
                                   std::optional<double> f_n = {},
                                   std::optional<double> phi_nnn = {});

/// Per-face data for one elliptic solve. Fields are sampled on the face
/// layers of the extended box; null entries mean homogeneous data.
struct FaceData {
    // Dirichlet value at (face, tangential node); evaluated lazily per node.
    std::function<double(const std::array<int, 3>&)> dirichlet;
    // Ghost shift per tangential node (already reduced via
    // neumann_ghost_closure); homogeneous mirror when absent.
    std::function<double(const std::array<int, 3>&)> ghost_shift;
};

/// Right-hand side of the compact scheme, either built from F with its own
/// boundary closure (the discrete-Laplacian form) or from F plus a known
/// Laplacian field (both restricted to the unknowns).
struct EllipticRhs {
    enum Mode { DiscreteLaplacian, KnownLaplacian } mode = DiscreteLaplacian;
    // DiscreteLaplacian: F on the full component mesh (face values included).
    // KnownLaplacian:    F and lap_f on the unknown box.
    Field f;
    Field lap_f;
};

/// Compact fourth-order modified-Helmholtz operator
///   P1 = -(Delta_h + h^2/6 Upsilon_h) + kappa^2 (1 + 2/r^2)
/// restricted to the unknown nodes of one grid component, with per-axis
/// Dirichlet elimination / mirror ghosts, solved by conjugate gradients.
class CompactHelmholtz {
public:
    CompactHelmholtz(const StaggeredGrid& g, Comp c, double h_tau);

    const std::array<int, 3>& unknown_extents() const { return n_; }
    std::size_t unknowns() const { return std::size_t(n_[0]) * n_[1] * n_[2]; }
    double kappa2() const { return kappa2_; }
    double r() const { return r_; }
    int dim() const { return dim_; }

    /// Map between grid-component indexing and the unknown box.
    std::array<int, 3> grid_offset() const;  // unknown (0,0,0) in grid indices

    /// y = P1 x on unknown vectors (homogeneous boundary fold).
    void apply_p1(const Field& x, Field& y) const;

    /// y = -P2 x = kappa^2 ((1+2/r^2) x + h^2/12 Delta_h x) on unknown
    /// vectors, with the same homogeneous closures as P1.
    void apply_neg_p2(const Field& x, Field& y) const;

    /// Right-hand side kappa^2(1+2/r^2) F + kappa^2 h^2/12 * Lap F per the
    /// chosen mode, on the unknown box.
    Field apply_p2(const EllipticRhs& rhs, const std::array<FaceData, 6>* face_data = nullptr) const;

    /// Contribution of inhomogeneous boundary data to the system right-hand
    /// side (to subtract): P1_affine(data).
    Field boundary_contribution(const std::array<FaceData, 6>& face_data) const;

    struct SolveResult {
        Field u;
        int iters = 0;
        double residual = 0.0;
    };

    /// CG on P1 u = b down to a relative residual; throws convergence_error
    /// past max_iter. The optional observer sees (iter, residual, iterate)
    /// per step.
    using CgObserver = std::function<void(int, double, const Field&)>;
    SolveResult solve(const Field& b, double tol = 1e-10, int max_iter = 200,
                      const Field* initial_guess = nullptr,
                      const CgObserver& observer = {}) const;

    /// Embed an unknown-box field into the extended box, filling Dirichlet
    /// face layers and mirror ghosts (homogeneous unless data given).
    void embed(const Field& u, Field& ext, const std::array<FaceData, 6>* face_data = nullptr) const;

    /// Embed a full component-mesh field (face values stored in the field
    /// itself) into the extended box, adding mirror ghosts on the
    /// half-staggered axes. face_data, when given, supplies ghost shifts for
    /// the embedded field.
    void embed_full(const Field& full, Field& ext, const std::array<FaceData, 6>* face_data = nullptr) const;

    /// -(Delta_h + h^2/6 Upsilon_h) + kappa^2(1+2/r^2) evaluated from an
    /// extended-box field onto the unknown box.
    void apply_p1_ext(const Field& ext, Field& y) const;

    /// Delta_h from the extended box onto the unknown box.
    void laplacian_ext(const Field& ext, Field& y) const;

private:
    int dim_;
    double h_, h_tau_, kappa2_, r_;
    std::array<int, 3> n_{1, 1, 1};      // unknown extents
    std::array<int, 3> next_{1, 1, 1};   // extended extents
    std::array<bool, 3> dirichlet_axis_{true, true, true};
};

}  // namespace cem

#endif
