#ifndef CEM_DATADRIVEN_HPP
#define CEM_DATADRIVEN_HPP

#include <span>
#include <string>
#include <vector>

#include "cem/analytic.hpp"
#include "cem/schemes.hpp"

namespace cem {

struct training_error : std::runtime_error {
    training_error(const std::string& msg, std::vector<double> trace_)
        : std::runtime_error(msg), trace(std::move(trace_)) {}
    std::vector<double> trace;
};

/// One training sample: the field triple at step n and the next three exact
/// states, all sampled from the analytic mode at integer multiples of h_tau.
struct TrainingSample {
    int kx = 0, ky = 0;
    int n = 0;
    TmFields x0, t1, t2, t3;
};

struct TrainingSet {
    int N = 16;
    double r = 0.0, T = 0.0, Z = 1.0;
    int n_tau = 0;
    std::vector<TrainingSample> samples;
};

/// Exact-mode rollout data on the h = 1/16 mesh for all wave-number pairs in
/// {12,...,15}^2, one sample per admissible start index.
TrainingSet generate_training_set(double r, double T, double Z);

/// Sum over samples of the mean absolute error of one, two and three
/// stencil-scheme updates against the exact targets.
double rollout_loss(const StencilParams& p, const TrainingSet& data);
double rollout_loss(const StencilParams& p, const TrainingSet& data, std::span<const int> subset);

struct OptimizerSettings {
    double step = 0.5;   // initial line-search step
    int iterations = 120;
    enum GradMode { Central, Forward } grad = Central;
    double fd_eps = 1e-6;
    unsigned seed = 2024;  // split shuffle seed
    double train_frac = 0.8, val_frac = 0.1;
    // keep iterates inside the leapfrog stability region at the training
    // CFL; the three-step loss cannot see long-horizon blowup on its own
    bool stability_guard = true;
};

struct TrainResult {
    StencilParams params;
    std::vector<double> loss_trace;  // train loss, initial value first
    double train_loss = 0.0, val_loss = 0.0, test_loss = 0.0;
    OptimizerSettings settings;
    double data_r = 0.0, data_T = 0.0, data_Z = 1.0;
    int data_N = 16;
};

/// Gradient descent with backtracking line search on (a, b, d); finite
/// difference gradients, train split only. Deterministic for a fixed seed
/// and iteration budget; non-finite loss aborts with the trace attached.
TrainResult optimize_stencil(const TrainingSet& data, StencilParams init,
                             const OptimizerSettings& opt);

std::string train_result_json(const TrainResult& res);
TrainResult train_result_from_json(const std::string& text);

}  // namespace cem

#endif
