#ifndef CEM_TESTUTIL_HPP
#define CEM_TESTUTIL_HPP

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "cem/array.hpp"

namespace cemtest {

inline cem::Field random_field(const std::array<int, 3>& ext, unsigned seed) {
    cem::Field f(ext);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t q = 0; q < f.size(); ++q) f[q] = u(rng);
    return f;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

inline double max_abs_diff(const cem::Field& a, const cem::Field& b) {
    double m = 0.0;
    for (std::size_t q = 0; q < a.size(); ++q) m = std::max(m, std::abs(a[q] - b[q]));
    return m;
}

/// Dense matrix of a linear map via basis probing (columns of the map).
inline std::vector<std::vector<double>> to_dense(
    int in_dim, int out_dim,
    const std::function<std::vector<double>(const std::vector<double>&)>& op) {
    std::vector<std::vector<double>> a(out_dim, std::vector<double>(in_dim, 0.0));
    std::vector<double> e(in_dim, 0.0);
    for (int j = 0; j < in_dim; ++j) {
        e[j] = 1.0;
        const auto col = op(e);
        for (int i = 0; i < out_dim; ++i) a[i][j] = col[i];
        e[j] = 0.0;
    }
    return a;
}

/// 2-norm of a dense rectangular matrix by power iteration on A^T A.
inline double dense_norm2(const std::vector<std::vector<double>>& a, int iters = 300) {
    const int rows = int(a.size()), cols = int(a[0].size());
    std::vector<double> v(cols, 1.0), av(rows), atav(cols);
    for (int j = 0; j < cols; ++j) v[j] = 1.0 + 0.1 * ((j * 7919) % 13);
    double lam = 0.0;
    for (int it = 0; it < iters; ++it) {
        for (int i = 0; i < rows; ++i) {
            double s = 0.0;
            for (int j = 0; j < cols; ++j) s += a[i][j] * v[j];
            av[i] = s;
        }
        for (int j = 0; j < cols; ++j) {
            double s = 0.0;
            for (int i = 0; i < rows; ++i) s += a[i][j] * av[i];
            atav[j] = s;
        }
        lam = 0.0;
        for (double x : atav) lam += x * x;
        lam = std::sqrt(lam);
        if (lam == 0.0) return 0.0;
        for (int j = 0; j < cols; ++j) v[j] = atav[j] / lam;
    }
    return std::sqrt(lam);
}

}  // namespace cemtest

#endif
