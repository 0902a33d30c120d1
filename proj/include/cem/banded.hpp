#ifndef CEM_BANDED_HPP
#define CEM_BANDED_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace cem {

struct size_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sparse banded 1D factor with per-row coefficient windows. General enough
/// for the bidiagonal difference D1, the tridiagonal D2 with its boundary
/// closures, the Pade matrix A with one-sided first/last rows, and the
/// one-sided boundary rows of the explicit stencils.
class Band1D {
public:
    Band1D() = default;
    Band1D(int rows, int cols) : rows_(rows), cols_(cols), first_(rows, 0), count_(rows, 0), offset_(rows, 0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    void set_row(int r, int first_col, std::span<const double> c);
    void set_row(int r, int first_col, std::initializer_list<double> c) {
        set_row(r, first_col, std::span<const double>(c.begin(), c.size()));
    }

    int row_first(int r) const { return first_[r]; }
    int row_count(int r) const { return count_[r]; }
    const double* row_coef(int r) const { return coef_.data() + offset_[r]; }

    double entry(int r, int c) const;

    /// y = A x (plain dense vectors)
    void matvec(std::span<const double> x, std::span<double> y) const;
    /// y = A^T x
    void matvec_t(std::span<const double> x, std::span<double> y) const;

    Band1D transposed() const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<int> first_, count_;
    std::vector<std::size_t> offset_;
    std::vector<double> coef_;
};

/// LU factorization (no pivoting) of a square banded matrix. The matrices
/// factored here are strictly diagonally dominant, so skipping pivoting is
/// sound; a vanishing pivot raises.
class BandedLU {
public:
    BandedLU() = default;
    explicit BandedLU(const Band1D& a);

    int n() const { return n_; }
    /// In-place solve A x = b.
    void solve(std::span<double> b) const;

private:
    int n_ = 0, kl_ = 0, ku_ = 0;
    std::vector<double> band_;  // row i holds columns i-kl .. i+ku
    double& at(int i, int j) { return band_[std::size_t(i) * (kl_ + ku_ + 1) + (j - i + kl_)]; }
    double at(int i, int j) const { return band_[std::size_t(i) * (kl_ + ku_ + 1) + (j - i + kl_)]; }
};

/// Finite-difference weights for the m-th derivative at z from arbitrary
/// nodes xs (Fornberg's recursion). Exact in rational arithmetic; used for
/// the one-sided boundary rows.
std::vector<double> fd_weights(double z, std::span<const double> xs, int m);

// 1D factor builders ---------------------------------------------------------

/// (m-1) x m forward difference with rows (-1, 1)/h.
Band1D d1_forward(int m, double h);

/// m x m second difference (1,-2,1)/h^2; rows at the ends drop the outside
/// neighbor, which is the homogeneous-Dirichlet closure.
Band1D d2_dirichlet(int m, double h);

/// m x m second difference whose end rows use the mirror ghost (ghost equals
/// the first inside value), i.e. rows (-1,1)/h^2 and (1,-1)/h^2.
Band1D d2_mirror(int m, double h);

/// m x (m+2) second difference acting on an array extended by one layer at
/// each end; row r reads extended columns r, r+1, r+2.
Band1D d2_extended(int m, double h);

/// The Pade left-hand matrix A of size n x n (requires n >= 4): interior rows
/// (1, 22, 1)/24, first row (26, -5, 4, -1)/24, last row its reversal.
Band1D pade_lhs(int n);

}  // namespace cem

#endif
