#ifndef CEM_HARNESS_HPP
#define CEM_HARNESS_HPP

#include <optional>
#include <string>
#include <vector>

#include "cem/schemes.hpp"

namespace cem {

struct RunOutcome {
    double error = 0.0;
    double cg_iters_mean = 0.0;
    bool blowup = false;
    int steps = 0;
};

/// March the exact-mode initial data to T and return the mean absolute error
/// accumulated over every step; blowup reports an infinite error.
RunOutcome run_error(const RunConfig& cfg);

struct SweepRow {
    SchemeId scheme = SchemeId::C4;
    int N = 0;
    double r = 0.0;
    int kx = 0, ky = 0;
    double T = 0.0, Z = 1.0;
    double error = 0.0;
    std::optional<double> order;  // vs the previous refinement row
    double cg_iters_mean = 0.0;
    std::string status = "ok";  // ok | blowup | error
};

struct SweepTable {
    std::vector<SweepRow> rows;
};

/// scheme,N,r,kx,ky,T,Z,error,order,cg_iters_mean,status with `inf` spelled
/// out and an empty order cell where undefined.
std::string to_csv(const SweepTable& table);

struct SweepSpec {
    RunConfig base;
    std::vector<SchemeId> schemes;
    std::vector<int> n_values;      // convergence axis (dyadic ascending)
    std::vector<double> r_values;   // CFL axis
    std::vector<int> k_values;      // wavenumber axis (kx = ky = k)
};

/// Errors and observed orders log2(e_N / e_2N) over a dyadic N list.
SweepTable run_convergence_study(const SweepSpec& spec);

/// Mean error per scheme per CFL ratio; unstable cells keep `inf`.
SweepTable run_cfl_sweep(const SweepSpec& spec);

/// Mean error per scheme per wavenumber at fixed N.
SweepTable run_wavenumber_sweep(const SweepSpec& spec);

/// March one configuration, write raw field dumps (little-endian f64 plus a
/// JSON sidecar each) and a run manifest into out_dir. Returns the process
/// exit status (0 on success).
int run_single(const RunConfig& cfg, const std::string& out_dir, bool zero_init = false);

/// Raw dump reader for the round-trip checks: returns the payload and fills
/// the sidecar-described shape.
std::vector<double> read_dump(const std::string& base_path, std::array<int, 3>& shape);

}  // namespace cem

#endif
