// Experiment driver: convergence studies, CFL and wavenumber sweeps, stencil
// training and single runs with field dumps.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cem/datadriven.hpp"
#include "cem/harness.hpp"

namespace {

struct CommonArgs {
    cem::RunConfig cfg;
    std::string schemes = "c4";
    std::string out;
    std::string params_file;  // trained stencil parameters for the ai scheme
    std::string config_file;
};

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

// JSON config file supplies defaults; explicit flags override them.
void apply_config_file(CommonArgs& args) {
    if (args.config_file.empty()) return;
    std::ifstream in(args.config_file);
    if (!in) throw std::runtime_error("cannot open config file " + args.config_file);
    nlohmann::json j;
    in >> j;
    auto& c = args.cfg;
    if (j.contains("N")) c.N = j["N"].get<int>();
    if (j.contains("r")) c.r = j["r"].get<double>();
    if (j.contains("T")) c.T = j["T"].get<double>();
    if (j.contains("Z")) c.Z = j["Z"].get<double>();
    if (j.contains("kx")) c.kx = j["kx"].get<int>();
    if (j.contains("ky")) c.ky = j["ky"].get<int>();
    if (j.contains("cg_tol")) c.cg_tol = j["cg_tol"].get<double>();
    if (j.contains("cg_max_iter")) c.cg_max_iter = j["cg_max_iter"].get<int>();
    if (j.contains("scheme")) args.schemes = j["scheme"].get<std::string>();
    if (j.contains("schemes")) args.schemes = j["schemes"].get<std::string>();
    if (j.contains("params")) args.params_file = j["params"].get<std::string>();
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_file, "JSON config file (flags override it)");
    cmd->add_option("-N,--N", args.cfg.N, "cells per axis");
    cmd->add_option("-r,--r", args.cfg.r, "CFL ratio h_tau/h");
    cmd->add_option("-T,--T", args.cfg.T, "final time");
    cmd->add_option("-Z,--Z", args.cfg.Z, "impedance");
    cmd->add_option("--kx", args.cfg.kx, "mode number in x");
    cmd->add_option("--ky", args.cfg.ky, "mode number in y");
    cmd->add_option("--cg-tol", args.cfg.cg_tol, "CG relative tolerance");
    cmd->add_option("--cg-max-iter", args.cfg.cg_max_iter, "CG iteration cap");
    cmd->add_option("--params", args.params_file, "trained stencil JSON for scheme ai");
    cmd->add_option("-o,--out", args.out, "output path (file for sweeps, directory for run)");
}

std::vector<cem::SchemeId> parse_schemes(const std::string& csv) {
    std::vector<cem::SchemeId> out;
    for (const auto& tok : split_csv(csv)) out.push_back(cem::scheme_from_name(tok));
    return out;
}

void load_stencil(CommonArgs& args) {
    if (args.params_file.empty()) return;
    std::ifstream in(args.params_file);
    if (!in) throw std::runtime_error("cannot open params file " + args.params_file);
    std::stringstream buf;
    buf << in.rdbuf();
    args.cfg.stencil = cem::train_result_from_json(buf.str()).params;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot write " + out_path);
    f << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Staggered-grid TM Maxwell solver bench: compact fourth-order scheme and references"};
    app.require_subcommand(1);

    CommonArgs args;
    // config file first, then flags on top
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") args.config_file = argv[i + 1];
    try {
        apply_config_file(args);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }

    std::string n_list = "16,32,64,128,256";
    std::string r_list;
    std::string k_list;
    bool zero_init = false;

    auto* conv = app.add_subcommand("converge", "grid convergence study over a dyadic N list");
    add_common(conv, args);
    conv->add_option("--schemes", args.schemes, "comma list of schemes (c4,yee,nc,ai)");
    conv->add_option("--n-list", n_list, "comma list of dyadic N values");

    auto* cfl = app.add_subcommand("cfl-sweep", "mean error against the CFL ratio");
    add_common(cfl, args);
    cfl->add_option("--schemes", args.schemes, "comma list of schemes");
    cfl->add_option("--r-list", r_list, "comma list of CFL ratios");

    auto* ksw = app.add_subcommand("k-sweep", "mean error against the wavenumber (kx = ky)");
    add_common(ksw, args);
    ksw->add_option("--schemes", args.schemes, "comma list of schemes");
    ksw->add_option("--k-list", k_list, "comma list of wavenumbers");

    auto* run = app.add_subcommand("run", "single run with field dumps and a manifest");
    add_common(run, args);
    run->add_option("--scheme", args.schemes, "scheme (c4|yee|nc|ai)");
    run->add_flag("--zero-init", zero_init, "start from the zero state");

    auto* train = app.add_subcommand("train-stencil", "fit the free stencil parameters");
    cem::OptimizerSettings opt;
    double train_r = 5.0 / (6.0 * std::sqrt(2.0));
    double train_T = 1.0;
    double train_Z = 1.0;
    std::string train_out = "stencil.json";
    std::string grad_mode = "central";
    train->add_option("-r,--r", train_r, "training CFL ratio");
    train->add_option("-T,--T", train_T, "training final time");
    train->add_option("-Z,--Z", train_Z, "impedance");
    train->add_option("--iterations", opt.iterations, "descent iterations");
    train->add_option("--step", opt.step, "initial line-search step");
    train->add_option("--grad", grad_mode, "gradient mode: central|forward");
    train->add_option("--seed", opt.seed, "split shuffle seed");
    train->add_option("-o,--out", train_out, "output JSON path");

    CLI11_PARSE(app, argc, argv);

    try {
        load_stencil(args);

        if (conv->parsed()) {
            cem::SweepSpec spec;
            spec.base = args.cfg;
            spec.schemes = parse_schemes(args.schemes);
            for (const auto& tok : split_csv(n_list)) spec.n_values.push_back(std::stoi(tok));
            emit(args.out, cem::to_csv(cem::run_convergence_study(spec)));
        } else if (cfl->parsed()) {
            cem::SweepSpec spec;
            spec.base = args.cfg;
            spec.schemes = parse_schemes(args.schemes);
            if (r_list.empty()) {
                for (int k = 1; k <= 5; ++k) spec.r_values.push_back(k / (6.0 * std::sqrt(2.0)));
                spec.r_values.push_back(1.0 / std::sqrt(2.0));
            } else {
                for (const auto& tok : split_csv(r_list)) spec.r_values.push_back(std::stod(tok));
            }
            emit(args.out, cem::to_csv(cem::run_cfl_sweep(spec)));
        } else if (ksw->parsed()) {
            cem::SweepSpec spec;
            spec.base = args.cfg;
            spec.schemes = parse_schemes(args.schemes);
            if (k_list.empty()) k_list = "2,5,8,11,15,21,29,36,50";
            for (const auto& tok : split_csv(k_list)) spec.k_values.push_back(std::stoi(tok));
            emit(args.out, cem::to_csv(cem::run_wavenumber_sweep(spec)));
        } else if (run->parsed()) {
            args.cfg.scheme = cem::scheme_from_name(args.schemes);
            return cem::run_single(args.cfg, args.out.empty() ? "out" : args.out, zero_init);
        } else if (train->parsed()) {
            opt.grad = grad_mode == "forward" ? cem::OptimizerSettings::Forward
                                              : cem::OptimizerSettings::Central;
            const auto data = cem::generate_training_set(train_r, train_T, train_Z);
            const auto result = cem::optimize_stencil(data, cem::StencilParams::nc(), opt);
            emit(train_out, cem::train_result_json(result) + "\n");
            std::fprintf(stderr, "trained a=%.8g b=%.8g d=%.8g (train loss %.6g -> %.6g)\n",
                         result.params.a, result.params.b, result.params.d,
                         result.loss_trace.front(), result.loss_trace.back());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
