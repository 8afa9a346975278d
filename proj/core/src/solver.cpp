#include "tomotv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace tomotv {

namespace {

void forward_project_into(const SystemMatrix& R, const Grid2D& u, Grid2D& out) {
    const double* x = u.data();
    double* y = out.data();
    const std::size_t rows = R.rows();
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::uint64_t q = R.row_offsets[r]; q < R.row_offsets[r + 1]; ++q)
            acc += R.values[q] * x[R.col_indices[q]];
        y[r] = acc;
    }
}

void back_project_into(const SystemMatrix& R, const Grid2D& v, Grid2D& out) {
    out.fill(0.0);
    double* x = out.data();
    const double* y = v.data();
    const std::size_t rows = R.rows();
    for (std::size_t r = 0; r < rows; ++r) {
        const double yr = y[r];
        if (yr == 0.0) continue;
        for (std::uint64_t q = R.row_offsets[r]; q < R.row_offsets[r + 1]; ++q)
            x[R.col_indices[q]] += R.values[q] * yr;
    }
}

void soft_shrink_into(const VectorField2& x, double threshold, VectorField2& out) {
    if (threshold < 0.0)
        throw std::invalid_argument("soft_shrink: negative threshold");
    const std::size_t sz = x.c1.size();
    if (!out.same_shape(x)) out = VectorField2(x.c1.rows(), x.c1.cols());
    for (std::size_t q = 0; q < sz; ++q) {
        const double a = x.c1[q];
        const double b = x.c2[q];
        const double mag = std::sqrt(a * a + b * b);
        if (mag <= threshold) {
            out.c1[q] = 0.0;
            out.c2[q] = 0.0;
        } else {
            const double f = (mag - threshold) / mag;
            out.c1[q] = f * a;
            out.c2[q] = f * b;
        }
    }
}

struct CsvLogger {
    std::ofstream file;
    explicit CsvLogger(const std::string& path) {
        if (path.empty()) return;
        file.open(path, std::ios::trunc);
        if (!file) throw std::runtime_error("cannot open log file " + path);
        file << "iter,energy,res_data,res_sino_grad,res_img_grad,res_pos,"
                "rel_change,cg_iters_v,cg_iters_u\n";
    }
    void log(const IterationStats& s) {
        if (!file.is_open()) return;
        file.precision(12);
        file << s.iter << ',' << s.energy << ',' << s.res_data << ','
             << s.res_sino_grad << ',' << s.res_img_grad << ',' << s.res_pos << ','
             << s.rel_change << ',' << s.cg_iters_v << ',' << s.cg_iters_u << '\n';
    }
};

double norm_of_difference(const Grid2D& a, const Grid2D& b) {
    double s = 0.0;
    for (std::size_t q = 0; q < a.size(); ++q) {
        const double d = a[q] - b[q];
        s += d * d;
    }
    return std::sqrt(s);
}

double field_residual(const VectorField2& a, const VectorField2& b) {
    double s = 0.0;
    for (std::size_t q = 0; q < a.c1.size(); ++q) {
        const double d1 = a.c1[q] - b.c1[q];
        const double d2 = a.c2[q] - b.c2[q];
        s += d1 * d1 + d2 * d2;
    }
    return std::sqrt(s);
}

} // namespace

Sinogram floor_weights(const Sinogram& g, double g_floor_rel) {
    double gmax = max_value(g);
    if (gmax <= 0.0)
        throw std::invalid_argument("floor_weights: sinogram has no positive entries");
    const double floor_val = g_floor_rel * gmax;
    Sinogram out = g;
    for (std::size_t q = 0; q < out.size(); ++q)
        out[q] = std::max(out[q], floor_val);
    return out;
}

double energy(const ImageGrid& u, const Sinogram& g, const SolverConfig& cfg,
              const SystemMatrix& R) {
    Sinogram gw = floor_weights(g, cfg.g_floor_rel);
    Sinogram ru = forward_project(R, u);
    require_same_shape(ru, g, "energy");
    double fidelity = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) {
        const double d = g[q] - ru[q];
        fidelity += d * d / gw[q];
    }
    return cfg.alpha * tv_seminorm(u) + cfg.beta * tv_seminorm(ru) + 0.5 * fidelity;
}

ImageGrid positivity_project(const ImageGrid& u, const ImageGrid& b4) {
    require_same_shape(u, b4, "positivity_project");
    ImageGrid out(u.rows(), u.cols());
    for (std::size_t q = 0; q < u.size(); ++q)
        out[q] = std::max(b4[q] + u[q], 0.0);
    return out;
}

VectorField2 soft_shrink(const VectorField2& x, double threshold) {
    VectorField2 out(x.c1.rows(), x.c1.cols());
    soft_shrink_into(x, threshold, out);
    return out;
}

CgResult solve_sinogram_subproblem(Sinogram& v, const Sinogram& g_weights,
                                   const Sinogram& ru, const Sinogram& b1,
                                   const VectorField2& b2, const VectorField2& w,
                                   const SolverConfig& cfg) {
    const int k = v.rows();
    const int l = v.cols();
    // Right side of the Euler-Lagrange system divided by g:
    //   (1/g + lambda1) v - lambda2 div grad v
    //     = 1 + lambda1 (b1 + Ru) + lambda2 div(b2 - w)
    // which is the SPD form of the stated g-weighted system.
    VectorField2 diff(k, l);
    for (std::size_t q = 0; q < diff.c1.size(); ++q) {
        diff.c1[q] = b2.c1[q] - w.c1[q];
        diff.c2[q] = b2.c2[q] - w.c2[q];
    }
    Grid2D rhs(k, l);
    divergence_into(diff, rhs);
    for (std::size_t q = 0; q < rhs.size(); ++q)
        rhs[q] = 1.0 + cfg.lambda1 * (b1[q] + ru[q]) + cfg.lambda2 * rhs[q];

    VectorField2 grad_buf(k, l);
    Grid2D div_buf(k, l);
    auto apply = [&](const Grid2D& x, Grid2D& out) {
        gradient_into(x, grad_buf);
        divergence_into(grad_buf, div_buf);
        for (std::size_t q = 0; q < out.size(); ++q)
            out[q] = (1.0 / g_weights[q] + cfg.lambda1) * x[q] -
                     cfg.lambda2 * div_buf[q];
    };
    return cg_solve(apply, rhs, v, cfg.cg_max_iters, cfg.cg_rel_tol);
}

CgResult solve_image_subproblem(ImageGrid& u, const SystemMatrix& R,
                                const Sinogram& v, const Sinogram& b1,
                                const VectorField2& b3, const VectorField2& z,
                                const ImageGrid& b4, const ImageGrid& u_tilde,
                                const SolverConfig& cfg) {
    const int m = u.rows();
    const int n = u.cols();
    VectorField2 diff(m, n);
    for (std::size_t q = 0; q < diff.c1.size(); ++q) {
        diff.c1[q] = b3.c1[q] - z.c1[q];
        diff.c2[q] = b3.c2[q] - z.c2[q];
    }
    Grid2D rhs(m, n);
    divergence_into(diff, rhs);
    Sinogram sino_buf(v.rows(), v.cols());
    for (std::size_t q = 0; q < sino_buf.size(); ++q) sino_buf[q] = v[q] - b1[q];
    Grid2D bp(m, n);
    back_project_into(R, sino_buf, bp);
    for (std::size_t q = 0; q < rhs.size(); ++q)
        rhs[q] = cfg.lambda1 * bp[q] + cfg.lambda3 * rhs[q] -
                 cfg.lambda4 * (b4[q] - u_tilde[q]);

    VectorField2 grad_buf(m, n);
    Grid2D div_buf(m, n);
    auto apply = [&](const Grid2D& x, Grid2D& out) {
        forward_project_into(R, x, sino_buf);
        back_project_into(R, sino_buf, bp);
        gradient_into(x, grad_buf);
        divergence_into(grad_buf, div_buf);
        for (std::size_t q = 0; q < out.size(); ++q)
            out[q] = cfg.lambda1 * bp[q] - cfg.lambda3 * div_buf[q] +
                     cfg.lambda4 * x[q];
    };
    return cg_solve(apply, rhs, u, cfg.cg_max_iters, cfg.cg_rel_tol);
}

JointResult reconstruct_joint(const Sinogram& g, const ScanGeometry& geom,
                              const SystemMatrix& R, const SolverConfig& cfg,
                              SolverState* final_state) {
    geom.validate();
    if (g.rows() != geom.num_bins || g.cols() != geom.num_angles)
        throw std::invalid_argument("reconstruct_joint: sinogram does not match geometry");
    if (!R.geom.same_grid(geom))
        throw std::invalid_argument("reconstruct_joint: matrix does not match geometry");
    for (std::size_t q = 0; q < g.size(); ++q)
        if (!(g[q] >= 0.0))
            throw std::invalid_argument("reconstruct_joint: negative sinogram entry");

    const Sinogram gw = floor_weights(g, cfg.g_floor_rel);  // rejects all-zero g
    const int m = geom.image_rows;
    const int n = geom.image_cols;
    const int k = geom.num_bins;
    const int l = geom.num_angles;

    SolverState st;
    st.u = back_project(R, g);
    Sinogram ru = forward_project(R, st.u);
    const double mass = sum(ru);
    const double scale = mass > 0.0 ? sum(g) / mass : 1.0;
    for (std::size_t q = 0; q < st.u.size(); ++q) st.u[q] *= scale;
    for (std::size_t q = 0; q < ru.size(); ++q) ru[q] *= scale;
    st.u_tilde = st.u;
    st.v = g;
    st.z = VectorField2(m, n);
    st.w = VectorField2(k, l);
    st.b1 = Sinogram(k, l);
    st.b2 = VectorField2(k, l);
    st.b3 = VectorField2(m, n);
    st.b4 = ImageGrid(m, n);

    VectorField2 gu(m, n), gv(k, l), arg_img(m, n), arg_sino(k, l);
    ImageGrid u_tilde_prev(m, n);

    CsvLogger logger(cfg.log_path);
    Diagnostics diag;
    diag.history.reserve(cfg.outer_max_iters);

    for (int it = 1; it <= cfg.outer_max_iters; ++it) {
        IterationStats stats;
        stats.iter = it;

        CgResult cgv = solve_sinogram_subproblem(st.v, gw, ru, st.b1, st.b2, st.w, cfg);
        stats.cg_iters_v = cgv.iters;
        if (!cgv.converged) diag.cg_trouble = true;

        CgResult cgu = solve_image_subproblem(st.u, R, st.v, st.b1, st.b3, st.z,
                                              st.b4, st.u_tilde, cfg);
        stats.cg_iters_u = cgu.iters;
        if (!cgu.converged) diag.cg_trouble = true;

        forward_project_into(R, st.u, ru);

        u_tilde_prev = st.u_tilde;
        for (std::size_t q = 0; q < st.u_tilde.size(); ++q)
            st.u_tilde[q] = std::max(st.b4[q] + st.u[q], 0.0);

        gradient_into(st.u, gu);
        for (std::size_t q = 0; q < arg_img.c1.size(); ++q) {
            arg_img.c1[q] = st.b3.c1[q] + gu.c1[q];
            arg_img.c2[q] = st.b3.c2[q] + gu.c2[q];
        }
        soft_shrink_into(arg_img, cfg.alpha / cfg.lambda3, st.z);

        gradient_into(st.v, gv);
        for (std::size_t q = 0; q < arg_sino.c1.size(); ++q) {
            arg_sino.c1[q] = st.b2.c1[q] + gv.c1[q];
            arg_sino.c2[q] = st.b2.c2[q] + gv.c2[q];
        }
        soft_shrink_into(arg_sino, cfg.beta / cfg.lambda2, st.w);

        for (std::size_t q = 0; q < st.b1.size(); ++q) st.b1[q] += ru[q] - st.v[q];
        for (std::size_t q = 0; q < st.b2.c1.size(); ++q) {
            st.b2.c1[q] += gv.c1[q] - st.w.c1[q];
            st.b2.c2[q] += gv.c2[q] - st.w.c2[q];
        }
        for (std::size_t q = 0; q < st.b3.c1.size(); ++q) {
            st.b3.c1[q] += gu.c1[q] - st.z.c1[q];
            st.b3.c2[q] += gu.c2[q] - st.z.c2[q];
        }
        for (std::size_t q = 0; q < st.b4.size(); ++q)
            st.b4[q] += st.u[q] - st.u_tilde[q];

        const double denom = norm2(st.u_tilde);
        stats.rel_change =
            denom > 0.0 ? norm_of_difference(st.u_tilde, u_tilde_prev) / denom : 0.0;
        stats.res_data = norm_of_difference(ru, st.v);
        stats.res_sino_grad = field_residual(gv, st.w);
        stats.res_img_grad = field_residual(gu, st.z);
        stats.res_pos = norm_of_difference(st.u, st.u_tilde);
        stats.min_u_tilde = min_value(st.u_tilde);

        // Objective of the current u iterate, using the projection at hand.
        double fidelity = 0.0;
        for (std::size_t q = 0; q < g.size(); ++q) {
            const double d = g[q] - ru[q];
            fidelity += d * d / gw[q];
        }
        stats.energy = cfg.alpha * tv_seminorm(st.u) + cfg.beta * tv_seminorm(ru) +
                       0.5 * fidelity;

        diag.history.push_back(stats);
        logger.log(stats);
        diag.iterations = it;
        st.iter = it;

        if (stats.rel_change < cfg.outer_rel_tol) {
            diag.converged = true;
            break;
        }
    }

    JointResult result;
    result.image = st.u_tilde;
    result.regularised = st.v;
    result.diag = std::move(diag);
    if (final_state) *final_state = std::move(st);
    return result;
}

RofResult sinogram_rof(const Sinogram& g, double beta, const SolverConfig& cfg) {
    for (std::size_t q = 0; q < g.size(); ++q)
        if (!(g[q] >= 0.0))
            throw std::invalid_argument("sinogram_rof: negative sinogram entry");
    const Sinogram gw = floor_weights(g, cfg.g_floor_rel);
    const int k = g.rows();
    const int l = g.cols();

    // The sinogram-only scheme fixes both penalty weights at one.
    const double lambda1 = 1.0;
    const double lambda2 = 1.0;

    Sinogram v = g;
    Sinogram vt = g;
    VectorField2 w(k, l);
    VectorField2 b1(k, l);
    Sinogram b2(k, l);

    VectorField2 gv(k, l), diff(k, l), arg(k, l), grad_buf(k, l);
    Grid2D rhs(k, l), div_buf(k, l);
    Sinogram vt_prev(k, l);

    CsvLogger logger(cfg.log_path);
    Diagnostics diag;
    diag.history.reserve(cfg.outer_max_iters);

    auto apply = [&](const Grid2D& x, Grid2D& out) {
        gradient_into(x, grad_buf);
        divergence_into(grad_buf, div_buf);
        for (std::size_t q = 0; q < out.size(); ++q)
            out[q] = -lambda1 * div_buf[q] + lambda2 * x[q];
    };

    for (int it = 1; it <= cfg.outer_max_iters; ++it) {
        IterationStats stats;
        stats.iter = it;

        // v-update: (-lambda1 div grad + lambda2) v = lambda1 div(b1 - w)
        //                                            + lambda2 (vt - b2)
        for (std::size_t q = 0; q < diff.c1.size(); ++q) {
            diff.c1[q] = b1.c1[q] - w.c1[q];
            diff.c2[q] = b1.c2[q] - w.c2[q];
        }
        divergence_into(diff, rhs);
        for (std::size_t q = 0; q < rhs.size(); ++q)
            rhs[q] = lambda1 * rhs[q] + lambda2 * (vt[q] - b2[q]);
        CgResult cgv = cg_solve(apply, rhs, v, cfg.cg_max_iters, cfg.cg_rel_tol);
        stats.cg_iters_v = cgv.iters;
        if (!cgv.converged) diag.cg_trouble = true;

        // vt-update: exact weighted proximal point, projected to >= 0.
        vt_prev = vt;
        for (std::size_t q = 0; q < vt.size(); ++q)
            vt[q] = std::max(
                (g[q] + lambda2 * gw[q] * (b2[q] + v[q])) / (1.0 + lambda2 * gw[q]),
                0.0);

        gradient_into(v, gv);
        for (std::size_t q = 0; q < arg.c1.size(); ++q) {
            arg.c1[q] = b1.c1[q] + gv.c1[q];
            arg.c2[q] = b1.c2[q] + gv.c2[q];
        }
        soft_shrink_into(arg, beta / lambda1, w);

        for (std::size_t q = 0; q < b1.c1.size(); ++q) {
            b1.c1[q] += gv.c1[q] - w.c1[q];
            b1.c2[q] += gv.c2[q] - w.c2[q];
        }
        for (std::size_t q = 0; q < b2.size(); ++q) b2[q] += v[q] - vt[q];

        const double denom = norm2(vt);
        stats.rel_change =
            denom > 0.0 ? norm_of_difference(vt, vt_prev) / denom : 0.0;
        stats.res_data = norm_of_difference(v, vt);
        stats.res_sino_grad = field_residual(gv, w);
        double fidelity = 0.0;
        for (std::size_t q = 0; q < g.size(); ++q) {
            const double d = g[q] - vt[q];
            fidelity += d * d / gw[q];
        }
        stats.energy = beta * tv_seminorm(vt) + 0.5 * fidelity;

        diag.history.push_back(stats);
        logger.log(stats);
        diag.iterations = it;

        if (stats.rel_change < cfg.outer_rel_tol) {
            diag.converged = true;
            break;
        }
    }

    RofResult result;
    result.sinogram = std::move(vt);
    result.diag = std::move(diag);
    return result;
}

ImageGrid em_reconstruct(const Sinogram& g, const SystemMatrix& R, int iters) {
    return em_reconstruct(g, R, iters,
                          ImageGrid(R.geom.image_rows, R.geom.image_cols, 1.0));
}

ImageGrid em_reconstruct(const Sinogram& g, const SystemMatrix& R, int iters,
                         const ImageGrid& u0) {
    if (g.rows() != R.geom.num_bins || g.cols() != R.geom.num_angles)
        throw std::invalid_argument("em_reconstruct: sinogram does not match matrix");
    if (u0.rows() != R.geom.image_rows || u0.cols() != R.geom.image_cols)
        throw std::invalid_argument("em_reconstruct: bad initial image");
    for (std::size_t q = 0; q < g.size(); ++q)
        if (!(g[q] >= 0.0))
            throw std::invalid_argument("em_reconstruct: negative sinogram entry");

    Sinogram ones(g.rows(), g.cols(), 1.0);
    ImageGrid sens = back_project(R, ones);
    ImageGrid u = u0;
    for (std::size_t q = 0; q < u.size(); ++q)
        if (sens[q] == 0.0) u[q] = 0.0;  // pixels no ray ever sees

    Sinogram fp(g.rows(), g.cols());
    Sinogram ratio(g.rows(), g.cols());
    ImageGrid bp(u.rows(), u.cols());
    for (int it = 0; it < iters; ++it) {
        forward_project_into(R, u, fp);
        const double fmax = max_value(fp);
        if (fmax <= 0.0) break;  // image vanished, nothing to update
        const double eps = 1e-15 * fmax;
        for (std::size_t q = 0; q < ratio.size(); ++q)
            ratio[q] = g[q] / std::max(fp[q], eps);
        back_project_into(R, ratio, bp);
        for (std::size_t q = 0; q < u.size(); ++q)
            if (sens[q] > 0.0) u[q] *= bp[q] / sens[q];
    }
    return u;
}

double poisson_log_likelihood(const Sinogram& g, const Sinogram& projection) {
    require_same_shape(g, projection, "poisson_log_likelihood");
    const double pmax = max_value(projection);
    if (pmax <= 0.0) return 0.0;
    const double eps = 1e-12 * pmax;
    double ll = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) {
        const double p = std::max(projection[q], eps);
        ll += g[q] * std::log(p) - projection[q];
    }
    return ll;
}

} // namespace tomotv
