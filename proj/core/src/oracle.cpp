#include "tomotv/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace tomotv {

double oracle_objective(double kappa, double r, double beta) {
    if (!(r > 0.0)) throw std::invalid_argument("oracle_objective: r must be positive");
    if (beta < 0.0) throw std::invalid_argument("oracle_objective: negative beta");
    if (kappa < 0.0 || kappa >= r)
        throw std::invalid_argument("oracle_objective: kappa outside [0, r)");
    const double root = std::sqrt(r * r - kappa * kappa);
    return (4.0 * beta - 3.0 * kappa) * root +
           (3.0 * r * r - 2.0 * kappa * kappa) * std::asin(kappa / r);
}

OracleResult solve_kappa(double r, double beta, double tol) {
    if (!(r > 0.0)) throw std::invalid_argument("solve_kappa: r must be positive");
    if (beta < 0.0) throw std::invalid_argument("solve_kappa: negative beta");
    if (tol <= 0.0) tol = 1e-10 * r;

    const double hi = r * (1.0 - 1e-12);
    auto objective = [&](double kappa) { return oracle_objective(kappa, r, beta); };

    auto golden = [&](double a, double b) {
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = b - inv_phi * (b - a);
        double x2 = a + inv_phi * (b - a);
        double f1 = objective(x1);
        double f2 = objective(x2);
        while (b - a > tol) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = objective(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = objective(x2);
            }
        }
        return 0.5 * (a + b);
    };

    double kappa = golden(0.0, hi);
    double best = objective(kappa);

    // Coarse scan guard: the objective is expected unimodal; if the scan finds
    // a better basin, refine there instead.
    const int scan_points = 1000;
    int scan_best = 0;
    double scan_val = objective(0.0);
    for (int q = 1; q < scan_points; ++q) {
        const double x = hi * q / (scan_points - 1);
        const double f = objective(x);
        if (f < scan_val) {
            scan_val = f;
            scan_best = q;
        }
    }
    if (scan_val < best - 1e-9 * (1.0 + std::abs(best))) {
        const double lo = hi * std::max(scan_best - 1, 0) / (scan_points - 1);
        const double up = hi * std::min(scan_best + 1, scan_points - 1) / (scan_points - 1);
        const double kappa2 = golden(lo, up);
        const double f2 = objective(kappa2);
        if (f2 < best) {
            kappa = kappa2;
            best = f2;
        }
    }

    OracleResult res;
    res.r = r;
    res.beta = beta;
    res.kappa = kappa;
    res.delta = 2.0 * std::sqrt(r * r - kappa * kappa);
    res.objective_value = best;
    return res;
}

Sinogram candidate_sinogram(const OracleResult& res, const ScanGeometry& geom) {
    geom.validate();
    if (!(res.r > 0.0) || res.kappa < 0.0 || res.kappa >= res.r)
        throw std::invalid_argument("candidate_sinogram: invalid oracle result");
    Sinogram v(geom.num_bins, geom.num_angles);
    for (int b = 0; b < geom.num_bins; ++b) {
        const double s = std::abs(geom.bin_center(b));
        double val = 0.0;
        if (s <= res.kappa)
            val = res.delta;
        else if (s < res.r)
            val = 2.0 * std::sqrt(res.r * res.r - s * s);
        for (int a = 0; a < geom.num_angles; ++a) v(b, a) = val;
    }
    return v;
}

double abel_image_profile(const OracleResult& res, double r_tilde) {
    if (std::abs(r_tilde) > res.kappa)
        throw std::invalid_argument(
            "abel_image_profile: |r_tilde| exceeds kappa, outside the derivation");
    return res.delta / (std::numbers::pi * std::sqrt(res.r * res.r - r_tilde * r_tilde));
}

double flat_top_value(const Sinogram& v) {
    // The clipped minimiser attains its maximum on the flat plateau, so the
    // plateau height is the sinogram maximum. This also reads sensibly at
    // vanishing regularisation, where the plateau degenerates to the
    // projected peak.
    return max_value(v);
}

} // namespace tomotv
