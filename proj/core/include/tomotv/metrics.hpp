#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tomotv/geometry.hpp"
#include "tomotv/grid.hpp"
#include "tomotv/solver.hpp"

namespace tomotv {

/// SNR = 20*log10(||truth||_2 / ||truth - rec||_2) in dB. Rejects an all-zero
/// truth; an exact match returns +infinity.
double snr(const ImageGrid& u_true, const ImageGrid& u_rec);

struct ExperimentRecord {
    std::string phantom;
    std::uint64_t seed = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double snr_db = 0.0;
    int iterations = 0;
    double wall_time_s = 0.0;
    bool best = false;
    bool failed = false;
    std::string error;
};

/// Runs reconstruct_joint over the (alpha, beta) cross product against the
/// given noisy sinogram. Per-cell failures are recorded without aborting the
/// sweep; records come back sorted by (alpha, beta) with the argmax-SNR cell
/// flagged.
std::vector<ExperimentRecord> parameter_sweep(
    const Sinogram& g, const ImageGrid& truth, const ScanGeometry& geom,
    const SystemMatrix& R, const std::vector<double>& alphas,
    const std::vector<double>& betas, const SolverConfig& base_cfg,
    const std::string& phantom_id = "", std::uint64_t seed = 0);

/// CSV with the fixed header phantom,seed,alpha,beta,snr_db,iters,wall_time_s;
/// the best cell is flagged in a trailing comment line.
void write_sweep_csv(const std::string& path,
                     const std::vector<ExperimentRecord>& records);

} // namespace tomotv
