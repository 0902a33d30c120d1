#ifndef CEM_ARRAY_HPP
#define CEM_ARRAY_HPP

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace cem {

/// Dense rank-3 field container, lexicographic layout with the last axis
/// fastest. 2D fields use nz = 1 so the same loops serve both dimensions.
class Field {
public:
    Field() = default;
    Field(int nx, int ny) : Field(nx, ny, 1) {}
    Field(int nx, int ny, int nz) : ext_{nx, ny, nz}, v_(std::size_t(nx) * ny * nz, 0.0) {
        assert(nx >= 1 && ny >= 1 && nz >= 1);
    }
    explicit Field(const std::array<int, 3>& ext) : Field(ext[0], ext[1], ext[2]) {}

    int nx() const { return ext_[0]; }
    int ny() const { return ext_[1]; }
    int nz() const { return ext_[2]; }
    const std::array<int, 3>& extents() const { return ext_; }
    std::size_t size() const { return v_.size(); }

    double& operator()(int i, int j) { return v_[std::size_t(i) * ext_[1] * ext_[2] + std::size_t(j) * ext_[2]]; }
    double operator()(int i, int j) const { return v_[std::size_t(i) * ext_[1] * ext_[2] + std::size_t(j) * ext_[2]]; }
    double& operator()(int i, int j, int k) { return v_[(std::size_t(i) * ext_[1] + j) * ext_[2] + k]; }
    double operator()(int i, int j, int k) const { return v_[(std::size_t(i) * ext_[1] + j) * ext_[2] + k]; }
    double& operator[](std::size_t n) { return v_[n]; }
    double operator[](std::size_t n) const { return v_[n]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::vector<double>& vec() { return v_; }
    const std::vector<double>& vec() const { return v_; }

    void fill(double c) { std::fill(v_.begin(), v_.end(), c); }

    bool same_shape(const Field& o) const { return ext_ == o.ext_; }

    double max_abs() const {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }

private:
    std::array<int, 3> ext_{0, 0, 0};
    std::vector<double> v_;
};

inline void axpy(double a, const Field& x, Field& y) {
    assert(x.same_shape(y));
    const double* xp = x.data();
    double* yp = y.data();
    for (std::size_t n = 0; n < x.size(); ++n) yp[n] += a * xp[n];
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace cem

#endif
