#include "cem/datadriven.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

#include "cem/stability.hpp"
#include "cem/util.hpp"

namespace cem {

TrainingSet generate_training_set(double r, double T, double Z) {
    if (r <= 0.0 || T <= 0.0) throw config_error("training set needs positive r and T");
    TrainingSet set;
    set.N = 16;
    set.r = r;
    set.T = T;
    set.Z = Z;
    const double h_tau = r / set.N;
    set.n_tau = int(std::llround(T / h_tau));
    if (set.n_tau < 3) throw config_error("final time too small: need at least three steps of targets");

    const StaggeredGrid g = StaggeredGrid::tm(set.N);
    for (int kx = 12; kx <= 15; ++kx) {
        for (int ky = 12; ky <= 15; ++ky) {
            const Eigenmode mode{kx, ky, Z};
            // exact states at integer steps, reused across start indices
            std::vector<TmFields> states(set.n_tau + 1);
            for (int n = 0; n <= set.n_tau; ++n) {
                const double tau = n * h_tau;
                states[n] = sample_mode(mode, g, tau, tau);
            }
            for (int n = 0; n + 3 <= set.n_tau; ++n) {
                TrainingSample s;
                s.kx = kx;
                s.ky = ky;
                s.n = n;
                s.x0 = states[n];
                s.t1 = states[n + 1];
                s.t2 = states[n + 2];
                s.t3 = states[n + 3];
                set.samples.push_back(std::move(s));
            }
        }
    }
    return set;
}

namespace {

double triple_mae(const EMStateTM& s, const TmFields& t) {
    double sum = 0.0;
    for (std::size_t q = 0; q < s.Ez.size(); ++q) sum += std::abs(s.Ez[q] - t.Ez[q]);
    for (std::size_t q = 0; q < s.Hx.size(); ++q) sum += std::abs(s.Hx[q] - t.Hx[q]);
    for (std::size_t q = 0; q < s.Hy.size(); ++q) sum += std::abs(s.Hy[q] - t.Hy[q]);
    return sum / double(s.Ez.size() + s.Hx.size() + s.Hy.size());
}

}  // namespace

double rollout_loss(const StencilParams& p, const TrainingSet& data, std::span<const int> subset) {
    const StaggeredGrid g = StaggeredGrid::tm(data.N);
    RunConfig cfg;
    cfg.scheme = SchemeId::AI;
    cfg.N = data.N;
    cfg.r = data.r;
    cfg.T = data.T;
    cfg.Z = data.Z;
    const StencilStepper stepper(g, cfg, p);

    std::vector<double> per(subset.size(), 0.0);
    parallel_for(int(subset.size()), [&](int i) {
        const TrainingSample& smp = data.samples[subset[i]];
        EMStateTM st;
        st.Ez = smp.x0.Ez;
        st.Hx = smp.x0.Hx;
        st.Hy = smp.x0.Hy;
        stepper.step(st);
        double l = triple_mae(st, smp.t1);
        stepper.step(st);
        l += triple_mae(st, smp.t2);
        stepper.step(st);
        l += triple_mae(st, smp.t3);
        per[i] = l;
    });
    // sequential reduction keeps the value independent of the worker count
    double sum = 0.0;
    for (double v : per) sum += v;
    return sum;
}

double rollout_loss(const StencilParams& p, const TrainingSet& data) {
    std::vector<int> all(data.samples.size());
    std::iota(all.begin(), all.end(), 0);
    return rollout_loss(p, data, all);
}

TrainResult optimize_stencil(const TrainingSet& data, StencilParams init,
                             const OptimizerSettings& opt) {
    std::vector<int> idx(data.samples.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937 rng(opt.seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    const int S = int(idx.size());
    const int n_train = std::max(1, int(std::lround(S * opt.train_frac)));
    const int n_val = std::min(S - n_train, int(std::lround(S * opt.val_frac)));
    const std::vector<int> train(idx.begin(), idx.begin() + n_train);
    const std::vector<int> val(idx.begin() + n_train, idx.begin() + n_train + n_val);
    const std::vector<int> test(idx.begin() + n_train + n_val, idx.end());

    auto L = [&](const StencilParams& q) { return rollout_loss(q, data, train); };
    // Reject iterates the marcher cannot actually run: the von Neumann bound
    // screens interior growth, the probe run catches boundary-row growth that
    // the three-step loss never sees.
    const auto admissible = [&](const StencilParams& q) {
        if (!opt.stability_guard) return true;
        if (data.r * k2_symbol_radius(q) > 2.0) return false;
        BisectSpec probe;
        probe.scheme = SchemeId::AI;
        probe.stencil = q;
        probe.N = 32;
        probe.kx = probe.ky = 13;
        probe.Z = data.Z;
        probe.steps = 300;
        probe.noise = 1e-7;
        return !run_is_unstable(probe, data.r);
    };

    TrainResult res;
    res.settings = opt;
    res.data_r = data.r;
    res.data_T = data.T;
    res.data_Z = data.Z;
    res.data_N = data.N;

    StencilParams x = init;
    double fx = L(x);
    res.loss_trace.push_back(fx);
    if (!std::isfinite(fx)) throw training_error("initial loss is not finite", res.loss_trace);
    if (!admissible(x))
        throw training_error("initial stencil violates the stability bound at the training CFL",
                             res.loss_trace);

    double step = opt.step;
    for (int it = 0; it < opt.iterations; ++it) {
        // finite-difference gradient on (a, b, d)
        double grad[3];
        double* comps[3] = {&x.a, &x.b, &x.d};
        for (int c = 0; c < 3; ++c) {
            const double eps = opt.fd_eps * std::max(1.0, std::abs(*comps[c]));
            const double saved = *comps[c];
            *comps[c] = saved + eps;
            const double fp = L(x);
            double fm = fx;
            if (opt.grad == OptimizerSettings::Central) {
                *comps[c] = saved - eps;
                fm = L(x);
            }
            *comps[c] = saved;
            grad[c] = (fp - fm) / (opt.grad == OptimizerSettings::Central ? 2.0 * eps : eps);
            if (!std::isfinite(grad[c]))
                throw training_error("gradient is not finite", res.loss_trace);
        }
        const double g2 = grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2];
        if (g2 == 0.0) break;

        bool accepted = false;
        double t = step;
        for (int bt = 0; bt < 40 && !accepted; ++bt, t *= 0.5) {
            StencilParams cand{x.a - t * grad[0], x.b - t * grad[1], x.d - t * grad[2]};
            if (!admissible(cand)) continue;
            const double fc = L(cand);
            if (std::isfinite(fc) && fc <= fx - 1e-4 * t * g2) {
                x = cand;
                fx = fc;
                step = 2.0 * t;  // let the next search start a bit larger
                accepted = true;
            }
        }
        res.loss_trace.push_back(fx);
        if (!accepted) break;  // no descent direction left at this resolution
    }

    res.params = x;
    res.train_loss = fx;
    res.val_loss = val.empty() ? 0.0 : rollout_loss(x, data, val);
    res.test_loss = test.empty() ? 0.0 : rollout_loss(x, data, test);
    return res;
}

std::string train_result_json(const TrainResult& res) {
    nlohmann::json j;
    j["a"] = res.params.a;
    j["b"] = res.params.b;
    j["d"] = res.params.d;
    j["c"] = res.params.c();
    j["loss_trace"] = res.loss_trace;
    j["config"] = {{"r", res.data_r},
                   {"T", res.data_T},
                   {"Z", res.data_Z},
                   {"N", res.data_N},
                   {"step", res.settings.step},
                   {"iterations", res.settings.iterations},
                   {"grad", res.settings.grad == OptimizerSettings::Central ? "central" : "forward"},
                   {"fd_eps", res.settings.fd_eps},
                   {"seed", res.settings.seed},
                   {"train_frac", res.settings.train_frac},
                   {"val_frac", res.settings.val_frac},
                   {"stability_guard", res.settings.stability_guard},
                   {"train_loss", res.train_loss},
                   {"val_loss", res.val_loss},
                   {"test_loss", res.test_loss}};
    return j.dump(2);
}

TrainResult train_result_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    TrainResult res;
    res.params.a = j.at("a").get<double>();
    res.params.b = j.at("b").get<double>();
    res.params.d = j.at("d").get<double>();
    if (j.contains("loss_trace")) res.loss_trace = j["loss_trace"].get<std::vector<double>>();
    if (j.contains("config")) {
        const auto& c = j["config"];
        if (c.contains("r")) res.data_r = c["r"].get<double>();
        if (c.contains("T")) res.data_T = c["T"].get<double>();
        if (c.contains("Z")) res.data_Z = c["Z"].get<double>();
        if (c.contains("N")) res.data_N = c["N"].get<int>();
    }
    return res;
}

}  // namespace cem
