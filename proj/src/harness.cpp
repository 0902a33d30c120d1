#include "cem/harness.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "cem/util.hpp"

namespace cem {

static_assert(std::endian::native == std::endian::little,
              "field dumps are written as little-endian doubles");

RunOutcome run_error(const RunConfig& cfg) {
    const StaggeredGrid g = StaggeredGrid::tm(cfg.N);
    const Eigenmode mode{cfg.kx, cfg.ky, cfg.Z};
    EMStateTM state = eigenmode_state(g, mode, cfg.h_tau(), cfg.scheme == SchemeId::C4);
    ModeSampler sampler(mode, g);
    const auto observe = [&](const EMStateTM& s) {
        sampler.accumulate(s.tau, cfg.h_tau(), s.Ez, s.Hx, s.Hy);
    };
    const MarchOutcome out = march(g, cfg, std::move(state), 0, 1e6, observe);
    RunOutcome res;
    res.blowup = out.blowup;
    res.cg_iters_mean = out.cg_iters_mean;
    res.steps = out.steps_done;
    res.error = out.blowup ? std::numeric_limits<double>::infinity() : sampler.mean();
    return res;
}

namespace {

std::string fmt_g(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

SweepRow run_cell(RunConfig cfg) {
    SweepRow row;
    row.scheme = cfg.scheme;
    row.N = cfg.N;
    row.r = cfg.r;
    row.kx = cfg.kx;
    row.ky = cfg.ky;
    row.T = cfg.T;
    row.Z = cfg.Z;
    try {
        const RunOutcome out = run_error(cfg);
        row.error = out.error;
        row.cg_iters_mean = out.cg_iters_mean;
        row.status = out.blowup ? "blowup" : "ok";
    } catch (const std::exception&) {
        row.error = std::numeric_limits<double>::infinity();
        row.status = "error";
    }
    return row;
}

SweepTable run_cells(const std::vector<RunConfig>& cells) {
    SweepTable table;
    table.rows.resize(cells.size());
    parallel_for(int(cells.size()), [&](int i) { table.rows[i] = run_cell(cells[i]); });
    return table;
}

}  // namespace

std::string to_csv(const SweepTable& table) {
    std::string out = "scheme,N,r,kx,ky,T,Z,error,order,cg_iters_mean,status\n";
    for (const SweepRow& row : table.rows) {
        out += scheme_name(row.scheme);
        out += ',' + std::to_string(row.N);
        out += ',' + fmt_g(row.r);
        out += ',' + std::to_string(row.kx);
        out += ',' + std::to_string(row.ky);
        out += ',' + fmt_g(row.T);
        out += ',' + fmt_g(row.Z);
        out += ',' + fmt_g(row.error);
        out += ',';
        if (row.order) out += fmt_g(*row.order);
        out += ',' + fmt_g(row.cg_iters_mean);
        out += ',' + row.status + '\n';
    }
    return out;
}

SweepTable run_convergence_study(const SweepSpec& spec) {
    if (spec.n_values.empty()) throw config_error("convergence study needs an N list");
    for (std::size_t i = 0; i < spec.n_values.size(); ++i) {
        if (spec.n_values[i] < 2) throw config_error("N values must be >= 2");
        if (i > 0 && spec.n_values[i] != 2 * spec.n_values[i - 1])
            throw config_error("convergence N list must be dyadic ascending");
    }
    std::vector<RunConfig> cells;
    for (SchemeId s : spec.schemes)
        for (int n : spec.n_values) {
            RunConfig c = spec.base;
            c.scheme = s;
            c.N = n;
            cells.push_back(c);
        }
    SweepTable table = run_cells(cells);
    // observed order against the previous refinement of the same scheme
    const int nn = int(spec.n_values.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (int(i) % nn == 0) continue;
        const double prev = table.rows[i - 1].error;
        const double cur = table.rows[i].error;
        if (std::isfinite(prev) && std::isfinite(cur) && prev > 0 && cur > 0)
            table.rows[i].order = std::log2(prev / cur);
    }
    return table;
}

SweepTable run_cfl_sweep(const SweepSpec& spec) {
    if (spec.r_values.empty()) throw config_error("CFL sweep needs an r list");
    for (double r : spec.r_values)
        if (r <= 0.0 || r > 1.0 / std::sqrt(2.0) + 1e-12)
            throw config_error("CFL sweep r values must lie in (0, 1/sqrt(2)]");
    std::vector<RunConfig> cells;
    for (SchemeId s : spec.schemes)
        for (double r : spec.r_values) {
            RunConfig c = spec.base;
            c.scheme = s;
            c.r = r;
            cells.push_back(c);
        }
    return run_cells(cells);
}

SweepTable run_wavenumber_sweep(const SweepSpec& spec) {
    SweepTable table;
    if (spec.schemes.empty()) return table;
    if (spec.k_values.empty()) throw config_error("wavenumber sweep needs a k list");
    for (int k : spec.k_values)
        if (k < 1) throw config_error("wavenumbers must be positive");
    std::vector<RunConfig> cells;
    for (SchemeId s : spec.schemes)
        for (int k : spec.k_values) {
            RunConfig c = spec.base;
            c.scheme = s;
            c.kx = c.ky = k;
            cells.push_back(c);
        }
    return run_cells(cells);
}

namespace {

void write_dump(const std::string& dir, const std::string& name, const Field& f, int n, double tau) {
    namespace fs = std::filesystem;
    const fs::path raw = fs::path(dir) / (name + ".f64");
    const fs::path side = fs::path(dir) / (name + ".json");
    std::ofstream out(raw, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + raw.string());
    out.write(reinterpret_cast<const char*>(f.data()), std::streamsize(f.size() * sizeof(double)));
    if (!out) throw std::runtime_error("incomplete write to " + raw.string());

    nlohmann::json j;
    j["component"] = name;
    j["shape"] = {f.nx(), f.ny()};
    j["n"] = n;
    j["tau"] = tau;
    std::ofstream sj(side);
    if (!sj) throw std::runtime_error("cannot write " + side.string());
    sj << j.dump(2) << '\n';
}

}  // namespace

std::vector<double> read_dump(const std::string& base_path, std::array<int, 3>& shape) {
    std::ifstream sj(base_path + ".json");
    if (!sj) throw std::runtime_error("cannot read sidecar " + base_path + ".json");
    nlohmann::json j;
    sj >> j;
    shape = {1, 1, 1};
    const auto& sh = j.at("shape");
    for (std::size_t i = 0; i < sh.size() && i < 3; ++i) shape[i] = sh[i].get<int>();
    std::ifstream raw(base_path + ".f64", std::ios::binary);
    if (!raw) throw std::runtime_error("cannot read dump " + base_path + ".f64");
    std::vector<double> data(std::size_t(shape[0]) * shape[1] * shape[2]);
    raw.read(reinterpret_cast<char*>(data.data()), std::streamsize(data.size() * sizeof(double)));
    if (raw.gcount() != std::streamsize(data.size() * sizeof(double)))
        throw std::runtime_error("dump shorter than sidecar shape: " + base_path);
    return data;
}

int run_single(const RunConfig& cfg, const std::string& out_dir, bool zero_init) {
    namespace fs = std::filesystem;
    try {
        fs::create_directories(out_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "cannot create output directory %s: %s\n", out_dir.c_str(), e.what());
        return 1;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const StaggeredGrid g = StaggeredGrid::tm(cfg.N);
    const Eigenmode mode{cfg.kx, cfg.ky, cfg.Z};
    const bool carry = cfg.scheme == SchemeId::C4;
    EMStateTM state = zero_init ? zero_state(g, carry) : eigenmode_state(g, mode, cfg.h_tau(), carry);

    ModeSampler sampler(mode, g);
    const auto observe = [&](const EMStateTM& s) {
        sampler.accumulate(s.tau, cfg.h_tau(), s.Ez, s.Hx, s.Hy);
    };

    MarchOutcome out;
    std::string status = "ok";
    try {
        out = march(g, cfg, std::move(state), 0, 1e6,
                    zero_init ? std::function<void(const EMStateTM&)>{} : observe);
        if (out.blowup) status = "blowup";
    } catch (const std::exception& e) {
        std::fprintf(stderr, "run failed: %s\n", e.what());
        return 1;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    try {
        write_dump(out_dir, "ez", out.final.Ez, out.final.n, out.final.tau);
        write_dump(out_dir, "hx", out.final.Hx, out.final.n, out.final.tau + 0.5 * cfg.h_tau());
        write_dump(out_dir, "hy", out.final.Hy, out.final.n, out.final.tau + 0.5 * cfg.h_tau());

        nlohmann::json man;
        man["scheme"] = scheme_name(cfg.scheme);
        man["N"] = cfg.N;
        man["r"] = cfg.r;
        man["T"] = cfg.T;
        man["Z"] = cfg.Z;
        man["kx"] = cfg.kx;
        man["ky"] = cfg.ky;
        man["steps"] = out.steps_done;
        man["status"] = status;
        man["cg_iters_mean"] = out.cg_iters_mean;
        man["cg_tol"] = cfg.cg_tol;
        man["wall_time_s"] = wall;
        man["zero_init"] = zero_init;
        if (!zero_init)
            man["error"] = out.blowup ? "inf" : fmt_g(sampler.mean());
        man["dumps"] = {"ez", "hx", "hy"};
        std::ofstream mf(fs::path(out_dir) / "manifest.json");
        if (!mf) throw std::runtime_error("cannot write manifest.json");
        mf << man.dump(2) << '\n';
    } catch (const std::exception& e) {
        std::fprintf(stderr, "dump failed in %s: %s\n", out_dir.c_str(), e.what());
        return 1;
    }
    return status == "ok" ? 0 : 2;
}

}  // namespace cem
