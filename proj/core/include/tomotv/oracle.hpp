#pragma once

#include "tomotv/geometry.hpp"
#include "tomotv/grid.hpp"

namespace tomotv {

/// Closed-form characterisation of the weighted ROF minimiser for a disc
/// sinogram: the solution clips g(s) = 2*sqrt(r^2 - s^2) to the constant
/// height delta = 2*sqrt(r^2 - kappa^2) on |s| <= kappa.
struct OracleResult {
    double r = 0.0;
    double beta = 0.0;
    double kappa = 0.0;
    double delta = 0.0;
    double objective_value = 0.0;
};

/// The reduced 1-D objective
///   (4*beta - 3*kappa) * sqrt(r^2 - kappa^2) + (3*r^2 - 2*kappa^2) * asin(kappa/r).
double oracle_objective(double kappa, double r, double beta);

/// Golden-section search for the minimising kappa on [0, r), bracket width
/// tol (default 1e-10 * r), guarded by a coarse 1000-point scan against
/// non-unimodal surprises.
OracleResult solve_kappa(double r, double beta, double tol = -1.0);

/// Samples the clipped profile: delta on |s| <= kappa, g(s) on kappa < |s| < r,
/// zero outside, replicated over all angles.
Sinogram candidate_sinogram(const OracleResult& res, const ScanGeometry& geom);

/// Image-space profile of the clipped sinogram's constant part,
/// u(rt) = delta / (pi * sqrt(r^2 - rt^2)); only derived for |rt| <= kappa.
double abel_image_profile(const OracleResult& res, double r_tilde);

/// Flat-top height of a regularised disc sinogram, read as the sinogram
/// maximum (the clipped minimiser peaks on its plateau).
double flat_top_value(const Sinogram& v);

} // namespace tomotv
