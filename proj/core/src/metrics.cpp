#include "tomotv/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace tomotv {

double snr(const ImageGrid& u_true, const ImageGrid& u_rec) {
    require_same_shape(u_true, u_rec, "snr");
    const double ref = norm2(u_true);
    if (ref == 0.0) throw std::invalid_argument("snr: all-zero reference image");
    double diff = 0.0;
    for (std::size_t q = 0; q < u_true.size(); ++q) {
        const double d = u_true[q] - u_rec[q];
        diff += d * d;
    }
    if (diff == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(ref / std::sqrt(diff));
}

std::vector<ExperimentRecord> parameter_sweep(
    const Sinogram& g, const ImageGrid& truth, const ScanGeometry& geom,
    const SystemMatrix& R, const std::vector<double>& alphas,
    const std::vector<double>& betas, const SolverConfig& base_cfg,
    const std::string& phantom_id, std::uint64_t seed) {
    if (alphas.empty() || betas.empty())
        throw std::invalid_argument("parameter_sweep: empty parameter grid");

    std::vector<double> as = alphas;
    std::vector<double> bs = betas;
    std::sort(as.begin(), as.end());
    std::sort(bs.begin(), bs.end());

    std::vector<ExperimentRecord> records;
    records.reserve(as.size() * bs.size());
    for (double alpha : as) {
        for (double beta : bs) {
            ExperimentRecord rec;
            rec.phantom = phantom_id;
            rec.seed = seed;
            rec.alpha = alpha;
            rec.beta = beta;
            SolverConfig cfg = base_cfg;
            cfg.alpha = alpha;
            cfg.beta = beta;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                JointResult result = reconstruct_joint(g, geom, R, cfg);
                rec.snr_db = snr(truth, result.image);
                rec.iterations = result.diag.iterations;
            } catch (const std::exception& e) {
                rec.failed = true;
                rec.error = e.what();
                rec.snr_db = std::numeric_limits<double>::quiet_NaN();
            }
            const auto t1 = std::chrono::steady_clock::now();
            rec.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
            records.push_back(std::move(rec));
        }
    }

    std::size_t best = records.size();
    for (std::size_t q = 0; q < records.size(); ++q) {
        if (records[q].failed) continue;
        if (best == records.size() || records[q].snr_db > records[best].snr_db)
            best = q;
    }
    if (best < records.size()) records[best].best = true;
    return records;
}

void write_sweep_csv(const std::string& path,
                     const std::vector<ExperimentRecord>& records) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("write_sweep_csv: cannot open " + path);
    f << "phantom,seed,alpha,beta,snr_db,iters,wall_time_s\n";
    f.precision(10);
    const ExperimentRecord* best = nullptr;
    for (const auto& r : records) {
        f << r.phantom << ',' << r.seed << ',' << r.alpha << ',' << r.beta << ','
          << r.snr_db << ',' << r.iterations << ',' << r.wall_time_s << '\n';
        if (r.best) best = &r;
    }
    if (best)
        f << "# best alpha=" << best->alpha << " beta=" << best->beta
          << " snr_db=" << best->snr_db << '\n';
}

} // namespace tomotv
