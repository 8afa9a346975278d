#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tomotv/geometry.hpp"
#include "tomotv/grid.hpp"
#include "tomotv/operators.hpp"

namespace tomotv {

struct SolverConfig {
    double alpha = 0.0;   // TV weight on the image
    double beta = 0.0;    // TV weight on the sinogram
    double lambda1 = 0.001;
    double lambda2 = 1.0;
    double lambda3 = 100.0;
    double lambda4 = 100.0;
    int outer_max_iters = 400;
    double outer_rel_tol = 1e-4;
    int cg_max_iters = 200;
    double cg_rel_tol = 1e-3;
    /// Fidelity weights use max(g, g_floor_rel * max(g)); Poisson data has
    /// zero bins, which would make the weighted fidelity undefined.
    double g_floor_rel = 1e-6;
    /// When nonempty, per-iteration diagnostics are appended as CSV.
    std::string log_path;
};

struct CgResult {
    int iters = 0;
    double rel_residual = 0.0;
    bool converged = false;
    bool breakdown = false;
};

struct IterationStats {
    int iter = 0;
    double energy = 0.0;
    double res_data = 0.0;       // ||Ru - v||
    double res_sino_grad = 0.0;  // ||grad v - w||
    double res_img_grad = 0.0;   // ||grad u - z||
    double res_pos = 0.0;        // ||u - u_tilde||
    double rel_change = 0.0;
    double min_u_tilde = 0.0;
    int cg_iters_v = 0;
    int cg_iters_u = 0;
};

struct Diagnostics {
    std::vector<IterationStats> history;
    int iterations = 0;
    bool converged = false;
    bool cg_trouble = false;  // some inner solve missed its tolerance
};

/// All split Bregman unknowns and multipliers for the joint model.
struct SolverState {
    ImageGrid u;
    ImageGrid u_tilde;
    Sinogram v;
    VectorField2 z;   // tracks grad u
    VectorField2 w;   // tracks grad v
    Sinogram b1;
    VectorField2 b2;
    VectorField2 b3;
    ImageGrid b4;
    int iter = 0;
};

struct JointResult {
    ImageGrid image;          // u_tilde at termination
    Sinogram regularised;     // v at termination
    Diagnostics diag;
};

struct RofResult {
    Sinogram sinogram;        // v_tilde at termination
    Diagnostics diag;
};

/// Floored fidelity weights: max(g, g_floor_rel * max(g)).
Sinogram floor_weights(const Sinogram& g, double g_floor_rel);

/// Discrete objective
///   alpha*||grad u||_1 + beta*||grad Ru||_1 + 0.5*sum (g - Ru)^2 / g
/// with isotropic TV terms and floored weights.
double energy(const ImageGrid& u, const Sinogram& g, const SolverConfig& cfg,
              const SystemMatrix& R);

/// Conjugate gradient for SPD operators, warm-started from x. Stops when
/// ||rhs - A x|| <= rel_tol * ||rhs|| or after max_iters; a non-positive
/// curvature direction terminates with the breakdown flag set.
template <class Op>
CgResult cg_solve(Op&& apply_A, const Grid2D& rhs, Grid2D& x, int max_iters,
                  double rel_tol) {
    CgResult res;
    const double rhs_norm = norm2(rhs);
    if (rhs_norm == 0.0) {
        x.fill(0.0);
        res.converged = true;
        return res;
    }
    Grid2D Ax(rhs.rows(), rhs.cols());
    apply_A(x, Ax);
    Grid2D r(rhs.rows(), rhs.cols());
    for (std::size_t t = 0; t < r.size(); ++t) r[t] = rhs[t] - Ax[t];
    double rr = dot(r, r);
    double rel = std::sqrt(rr) / rhs_norm;
    if (rel <= rel_tol) {
        res.converged = true;
        res.rel_residual = rel;
        return res;
    }
    Grid2D p = r;
    Grid2D Ap(rhs.rows(), rhs.cols());
    for (int it = 0; it < max_iters; ++it) {
        apply_A(p, Ap);
        const double curvature = dot(p, Ap);
        if (curvature <= 0.0) {
            res.breakdown = true;
            break;
        }
        const double step = rr / curvature;
        for (std::size_t t = 0; t < x.size(); ++t) {
            x[t] += step * p[t];
            r[t] -= step * Ap[t];
        }
        const double rr_next = dot(r, r);
        res.iters = it + 1;
        rel = std::sqrt(rr_next) / rhs_norm;
        if (rel <= rel_tol) {
            res.converged = true;
            break;
        }
        const double ratio = rr_next / rr;
        rr = rr_next;
        for (std::size_t t = 0; t < p.size(); ++t) p[t] = r[t] + ratio * p[t];
    }
    res.rel_residual = rel;
    return res;
}

/// Elementwise max(b4 + u, 0).
ImageGrid positivity_project(const ImageGrid& u, const ImageGrid& b4);

/// Isotropic per-pixel shrinkage: y_p = max(|x_p| - t, 0) * x_p / |x_p|,
/// with y_p = 0 where |x_p| = 0.
VectorField2 soft_shrink(const VectorField2& x, double threshold);

/// v-update of the joint scheme: solves the Euler-Lagrange system
///   (1 + lambda1*g) v - lambda2 * g .* div grad v
///     = g + lambda1*g.*(b1 + Ru) + lambda2*g.*div(b2 - w)
/// by CG on the equivalent SPD form obtained after dividing by g (valid since
/// g is floored). v is the warm start and receives the solution.
CgResult solve_sinogram_subproblem(Sinogram& v, const Sinogram& g_weights,
                                   const Sinogram& ru, const Sinogram& b1,
                                   const VectorField2& b2, const VectorField2& w,
                                   const SolverConfig& cfg);

/// u-update of the joint scheme: solves
///   (lambda1 R*R - lambda3 div grad + lambda4) u
///     = lambda1 R*(v - b1) + lambda3 div(b3 - z) - lambda4 (b4 - u_tilde)
/// matrix-free (one forward and one back projection per CG iteration).
CgResult solve_image_subproblem(ImageGrid& u, const SystemMatrix& R,
                                const Sinogram& v, const Sinogram& b1,
                                const VectorField2& b3, const VectorField2& z,
                                const ImageGrid& b4, const ImageGrid& u_tilde,
                                const SolverConfig& cfg);

/// Split Bregman solver for the joint model. Update order per outer
/// iteration: v, u, u_tilde, z (threshold alpha/lambda3), w (threshold
/// beta/lambda2), then the four multiplier updates. Runs until the relative
/// change of u_tilde drops below outer_rel_tol or outer_max_iters is reached.
/// If final_state is nonnull it receives the terminal unknowns.
JointResult reconstruct_joint(const Sinogram& g, const ScanGeometry& geom,
                              const SystemMatrix& R, const SolverConfig& cfg,
                              SolverState* final_state = nullptr);

/// Split Bregman solver for the sinogram-only weighted ROF model
///   min_{v >= 0} beta*||grad v||_1 + 0.5*sum (g - v)^2 / g
/// with unknowns (v, v_tilde, w) and lambda1 = lambda2 = 1 by default.
RofResult sinogram_rof(const Sinogram& g, double beta, const SolverConfig& cfg);

/// Multiplicative EM iteration u <- (u / R*1) .* R*(g / Ru) for the stated
/// number of iterations, starting from a constant one image (masked to the
/// pixels seen by at least one ray). Projection values are floored at a
/// machine-scale epsilon before division.
ImageGrid em_reconstruct(const Sinogram& g, const SystemMatrix& R, int iters);
ImageGrid em_reconstruct(const Sinogram& g, const SystemMatrix& R, int iters,
                         const ImageGrid& u0);

/// Poisson log-likelihood sum(g .* log(Ru) - Ru) with floored logs, a
/// monotonicity diagnostic for the EM iteration.
double poisson_log_likelihood(const Sinogram& g, const Sinogram& projection);

} // namespace tomotv
