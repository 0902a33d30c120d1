#include "cem/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace cem {

namespace {
constexpr double kPi = 3.14159265358979323846;

// d^order/dtau^order of cos(w tau)
double dcos(int order, double w, double tau) {
    switch (order & 3) {
        case 0: return std::cos(w * tau) * std::pow(w, order);
        case 1: return -std::sin(w * tau) * std::pow(w, order);
        case 2: return -std::cos(w * tau) * std::pow(w, order);
        default: return std::sin(w * tau) * std::pow(w, order);
    }
}

// d^order/dtau^order of sin(w tau)/w
double dsin_over_w(int order, double w, double tau) {
    switch (order & 3) {
        case 0: return std::sin(w * tau) * std::pow(w, order) / w;
        case 1: return std::cos(w * tau) * std::pow(w, order) / w;
        case 2: return -std::sin(w * tau) * std::pow(w, order) / w;
        default: return -std::cos(w * tau) * std::pow(w, order) / w;
    }
}
}  // namespace

double Eigenmode::omega() const { return Z * kPi * std::sqrt(double(kx) * kx + double(ky) * ky); }

double Eigenmode::laplacian_factor() const {
    const double w = omega();
    return -w * w;
}

double Eigenmode::Ez(double tau, double x, double y) const { return Ez_dt(0, tau, x, y); }
double Eigenmode::Hx(double tau, double x, double y) const { return Hx_dt(0, tau, x, y); }
double Eigenmode::Hy(double tau, double x, double y) const { return Hy_dt(0, tau, x, y); }

double Eigenmode::Ez_dt(int order, double tau, double x, double y) const {
    return dcos(order, omega(), tau) * std::sin(Z * kPi * kx * x) * std::sin(Z * kPi * ky * y);
}

double Eigenmode::Hx_dt(int order, double tau, double x, double y) const {
    return -dsin_over_w(order, omega(), tau) * kPi * ky * std::sin(Z * kPi * kx * x) *
           std::cos(Z * kPi * ky * y);
}

double Eigenmode::Hy_dt(int order, double tau, double x, double y) const {
    return dsin_over_w(order, omega(), tau) * kPi * kx * std::cos(Z * kPi * kx * x) *
           std::sin(Z * kPi * ky * y);
}

TmFields sample_mode(const Eigenmode& m, const StaggeredGrid& g, double tau_e, double tau_h) {
    TmFields f{Field(g.mesh(Comp::Ez).ext), Field(g.mesh(Comp::Hx).ext), Field(g.mesh(Comp::Hy).ext)};
    const auto sample = [&](Comp c, Field& out, auto&& fn) {
        const auto& mesh = g.mesh(c);
        for (int i = 0; i < mesh.ext[0]; ++i)
            for (int j = 0; j < mesh.ext[1]; ++j)
                out(i, j) = fn(g.coord(c, 0, i), g.coord(c, 1, j));
    };
    sample(Comp::Ez, f.Ez, [&](double x, double y) { return m.Ez(tau_e, x, y); });
    sample(Comp::Hx, f.Hx, [&](double x, double y) { return m.Hx(tau_h, x, y); });
    sample(Comp::Hy, f.Hy, [&](double x, double y) { return m.Hy(tau_h, x, y); });
    return f;
}

double mean_abs_error(const std::vector<TmRecord>& history, const Eigenmode& mode,
                      const StaggeredGrid& g) {
    if (history.empty()) throw std::invalid_argument("mean_abs_error: empty history");
    double se = 0.0, sx = 0.0, sy = 0.0;
    for (const TmRecord& rec : history) {
        const TmFields ex = sample_mode(mode, g, rec.tau, rec.tau + 0.5 * rec.h_tau);
        for (std::size_t q = 0; q < rec.Ez.size(); ++q) se += std::abs(rec.Ez[q] - ex.Ez[q]);
        for (std::size_t q = 0; q < rec.Hx.size(); ++q) sx += std::abs(rec.Hx[q] - ex.Hx[q]);
        for (std::size_t q = 0; q < rec.Hy.size(); ++q) sy += std::abs(rec.Hy[q] - ex.Hy[q]);
    }
    const double n = double(history.size());
    const double ez_nodes = double(history.front().Ez.size());
    const double hx_nodes = double(history.front().Hx.size());
    const double hy_nodes = double(history.front().Hy.size());
    return (se / (n * ez_nodes) + sx / (n * hx_nodes) + sy / (n * hy_nodes)) / 3.0;
}

ModeSampler::ModeSampler(const Eigenmode& m, const StaggeredGrid& g) : mode_(m), N_(g.N()) {
    const double ax = m.Z * kPi * m.kx, ay = m.Z * kPi * m.ky;
    sxe_.resize(N_ + 1);
    sye_.resize(N_ + 1);
    for (int i = 0; i <= N_; ++i) {
        const double x = double(i) / N_;
        sxe_[i] = std::sin(ax * x);
        sye_[i] = std::sin(ay * x);
    }
    cxh_.resize(N_);
    cyh_.resize(N_);
    for (int i = 0; i < N_; ++i) {
        const double x = (2.0 * i + 1.0) / (2.0 * N_);
        cxh_[i] = std::cos(ax * x);
        cyh_[i] = std::cos(ay * x);
    }
}

void ModeSampler::accumulate(double tau_e, double h_tau, const Field& Ez, const Field& Hx,
                             const Field& Hy) {
    const double w = mode_.omega();
    const double tau_h = tau_e + 0.5 * h_tau;
    const double te = std::cos(w * tau_e);
    const double th = std::sin(w * tau_h) / w;
    const double fx = -th * kPi * mode_.ky;
    const double fy = th * kPi * mode_.kx;
    for (int i = 0; i <= N_; ++i)
        for (int j = 0; j <= N_; ++j) se_ += std::abs(Ez(i, j) - te * sxe_[i] * sye_[j]);
    for (int i = 0; i <= N_; ++i)
        for (int j = 0; j < N_; ++j) sx_ += std::abs(Hx(i, j) - fx * sxe_[i] * cyh_[j]);
    for (int i = 0; i < N_; ++i)
        for (int j = 0; j <= N_; ++j) sy_ += std::abs(Hy(i, j) - fy * cxh_[i] * sye_[j]);
    ++records_;
}

double ModeSampler::mean() const {
    if (records_ == 0) throw std::invalid_argument("ModeSampler: no records accumulated");
    const double ne = double((N_ + 1) * (N_ + 1));
    const double nh = double((N_ + 1) * N_);
    return (se_ / (records_ * ne) + sx_ / (records_ * nh) + sy_ / (records_ * nh)) / 3.0;
}

std::array<Field, 3> eval_source_P(const SourceCallbacks& s, double tau, const StaggeredGrid& g,
                                   double Z) {
    for (int c = 0; c < 3; ++c)
        if (!s.J[c] || !s.d2t_J[c] || !s.grad_div_J[c])
            throw std::invalid_argument("eval_source_P: missing source derivative callbacks");
    const Comp comps[3] = {Comp::Ex, Comp::Ey, Comp::Ez};
    std::array<Field, 3> out;
    for (int c = 0; c < 3; ++c) {
        const auto& mesh = g.mesh(comps[c]);
        Field f(mesh.ext);
        for (int i = 0; i < mesh.ext[0]; ++i)
            for (int j = 0; j < mesh.ext[1]; ++j)
                for (int k = 0; k < mesh.ext[2]; ++k) {
                    const double x = g.coord(comps[c], 0, i);
                    const double y = g.coord(comps[c], 1, j);
                    const double z = g.dim() > 2 ? g.coord(comps[c], 2, k) : 0.0;
                    f(i, j, k) = Z * (-s.J[c](tau, x, y, z) - s.grad_div_J[c](tau, x, y, z) +
                                      s.d2t_J[c](tau, x, y, z));
                }
        out[c] = std::move(f);
    }
    return out;
}

double charge_conservation_residual(const SourceCallbacks& s, double tau) {
    if (!s.rho || !s.J[0] || !s.J[1] || !s.J[2])
        throw std::invalid_argument("charge_conservation_residual: needs rho and all J components");
    const double d = 1e-5;
    double worst = 0.0;
    for (int ix = 1; ix <= 3; ++ix)
        for (int iy = 1; iy <= 3; ++iy)
            for (int iz = 1; iz <= 3; ++iz) {
                const double x = ix * 0.25, y = iy * 0.25, z = iz * 0.25;
                const double drho = (s.rho(tau + d, x, y, z) - s.rho(tau - d, x, y, z)) / (2 * d);
                const double div = (s.J[0](tau, x + d, y, z) - s.J[0](tau, x - d, y, z)) / (2 * d) +
                                   (s.J[1](tau, x, y + d, z) - s.J[1](tau, x, y - d, z)) / (2 * d) +
                                   (s.J[2](tau, x, y, z + d) - s.J[2](tau, x, y, z - d)) / (2 * d);
                worst = std::max(worst, std::abs(drho + div));
            }
    return worst;
}

}  // namespace cem
