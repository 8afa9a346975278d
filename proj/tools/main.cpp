// tomotv command line tool: reproducible phantom simulation, joint TV
// reconstruction, sinogram scale-space studies, the analytic disc oracle
// table, and (alpha, beta) parameter sweeps.
//
// Exit codes: 0 success, 2 bad configuration, 3 I/O failure,
//             4 solver non-convergence (outputs still written).

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tomotv/geometry.hpp"
#include "tomotv/io.hpp"
#include "tomotv/metrics.hpp"
#include "tomotv/noise.hpp"
#include "tomotv/operators.hpp"
#include "tomotv/oracle.hpp"
#include "tomotv/phantoms.hpp"
#include "tomotv/solver.hpp"
#include "tomotv/version.hpp"

namespace fs = std::filesystem;
using namespace tomotv;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNoConvergence = 4;

struct RunConfig {
    std::string command;

    // geometry
    std::string geometry_preset = "reference";
    std::vector<double> geometry;  // m n k l angle-step
    double pixel_size = 1.0;
    double bin_spacing = 1.0;
    double angle_start = 0.0;

    // phantom
    std::string phantom = "two_discs";
    double intensity = 1.0;
    bool smooth = false;
    double disc_radius = 50.5;
    std::vector<double> disc_center{0.0, 0.0};
    double r1 = 26.0, r2 = 11.0;
    std::vector<double> c1{-30.0, 30.0};
    std::vector<double> c2{35.0, -15.0};
    double ring_outer = 25.5, ring_inner1 = 21.0, ring_inner2 = 11.0;
    double star_outer = 45.0, star_inner = 18.0;
    int star_points = 5;
    double rect_width = 50.0, rect_length = 100.0, rect_border = 2.0;
    double cross_width = 3.0, cross_hlen = 121.0, cross_vlen = 100.0;

    // noise
    std::string noise_preset = "low";
    double noise_counts = 0.0;  // >0 overrides the preset
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;

    // solver
    double alpha = 6.0, beta = 0.0;
    std::vector<double> alphas;
    std::vector<double> betas;
    double lambda1 = 0.001, lambda2 = 1.0, lambda3 = 100.0, lambda4 = 100.0;
    int outer_iters = 400;
    double outer_tol = 1e-4;
    int cg_iters = 200;
    double cg_tol = 1e-3;
    double g_floor = 1e-6;

    // reconstruct
    std::string input;
    std::string truth;
    std::string method = "joint";
    int em_iters = 50;

    // oracle table
    std::vector<double> radii;
    double oracle_radius = 0.0;
    double oracle_beta = -1.0;
    bool skip_numeric = false;

    // io / misc
    std::string out;
    std::string log_path;
    std::string matrix_cache;
    std::string config_path;
    bool pgm = false;
    int threads = 1;
};

ScanGeometry make_geometry(const RunConfig& rc) {
    ScanGeometry g = rc.geometry_preset == "smoke" ? ScanGeometry::smoke()
                                                   : ScanGeometry::reference();
    if (!rc.geometry.empty()) {
        if (rc.geometry.size() != 5)
            throw CLI::ValidationError("--geometry expects m n k l angle-step");
        g.image_rows = static_cast<int>(rc.geometry[0]);
        g.image_cols = static_cast<int>(rc.geometry[1]);
        g.num_bins = static_cast<int>(rc.geometry[2]);
        g.num_angles = static_cast<int>(rc.geometry[3]);
        g.angle_step_deg = rc.geometry[4];
        g.field_of_view_radius = 0.5 * (g.num_bins - 1) * rc.bin_spacing;
    }
    g.pixel_size = rc.pixel_size;
    g.bin_spacing = rc.bin_spacing;
    g.angle_start_deg = rc.angle_start;
    g.validate();
    return g;
}

PhantomSpec make_phantom(const RunConfig& rc) {
    PhantomSpec s = PhantomSpec::make(phantom_kind_from_string(rc.phantom));
    s.intensity = rc.intensity;
    s.smooth = rc.smooth;
    s.disc_radius = rc.disc_radius;
    s.disc_cx = rc.disc_center.at(0);
    s.disc_cy = rc.disc_center.at(1);
    s.r1 = rc.r1;
    s.r2 = rc.r2;
    s.c1x = rc.c1.at(0);
    s.c1y = rc.c1.at(1);
    s.c2x = rc.c2.at(0);
    s.c2y = rc.c2.at(1);
    s.ring_outer = rc.ring_outer;
    s.ring_inner1 = rc.ring_inner1;
    s.ring_inner2 = rc.ring_inner2;
    s.star_outer = rc.star_outer;
    s.star_inner = rc.star_inner;
    s.star_points = rc.star_points;
    s.rect_width = rc.rect_width;
    s.rect_length = rc.rect_length;
    s.rect_border = rc.rect_border;
    s.cross_arm_width = rc.cross_width;
    s.cross_horizontal_len = rc.cross_hlen;
    s.cross_vertical_len = rc.cross_vlen;
    return s;
}

SolverConfig make_solver_config(const RunConfig& rc) {
    SolverConfig cfg;
    cfg.alpha = rc.alpha;
    cfg.beta = rc.beta;
    cfg.lambda1 = rc.lambda1;
    cfg.lambda2 = rc.lambda2;
    cfg.lambda3 = rc.lambda3;
    cfg.lambda4 = rc.lambda4;
    cfg.outer_max_iters = rc.outer_iters;
    cfg.outer_rel_tol = rc.outer_tol;
    cfg.cg_max_iters = rc.cg_iters;
    cfg.cg_rel_tol = rc.cg_tol;
    cfg.g_floor_rel = rc.g_floor;
    cfg.log_path = rc.log_path;
    return cfg;
}

NoiseModel make_noise(const RunConfig& rc, std::uint64_t seed) {
    if (rc.noise_counts > 0.0) return NoiseModel{rc.noise_counts, seed};
    return make_noise_model(noise_preset_from_string(rc.noise_preset), seed);
}

std::string join_values(const std::vector<double>& v) {
    std::ostringstream ss;
    for (std::size_t q = 0; q < v.size(); ++q) {
        if (q) ss << ' ';
        ss << format_double(v[q]);
    }
    return ss.str();
}

std::string join_seeds(const std::vector<std::uint64_t>& v) {
    std::ostringstream ss;
    for (std::size_t q = 0; q < v.size(); ++q) {
        if (q) ss << ' ';
        ss << v[q];
    }
    return ss.str();
}

KeyValueMap to_key_values(const RunConfig& rc) {
    KeyValueMap kv;
    kv["command"] = rc.command;
    kv["version"] = kVersion;
    kv["geometry_preset"] = rc.geometry_preset;
    if (!rc.geometry.empty()) kv["geometry"] = join_values(rc.geometry);
    kv["pixel_size"] = format_double(rc.pixel_size);
    kv["bin_spacing"] = format_double(rc.bin_spacing);
    kv["angle_start"] = format_double(rc.angle_start);
    kv["phantom"] = rc.phantom;
    kv["intensity"] = format_double(rc.intensity);
    kv["smooth"] = rc.smooth ? "1" : "0";
    kv["disc_radius"] = format_double(rc.disc_radius);
    kv["disc_center"] = join_values(rc.disc_center);
    kv["r1"] = format_double(rc.r1);
    kv["r2"] = format_double(rc.r2);
    kv["c1"] = join_values(rc.c1);
    kv["c2"] = join_values(rc.c2);
    kv["ring_outer"] = format_double(rc.ring_outer);
    kv["ring_inner1"] = format_double(rc.ring_inner1);
    kv["ring_inner2"] = format_double(rc.ring_inner2);
    kv["star_outer"] = format_double(rc.star_outer);
    kv["star_inner"] = format_double(rc.star_inner);
    kv["star_points"] = std::to_string(rc.star_points);
    kv["rect_width"] = format_double(rc.rect_width);
    kv["rect_length"] = format_double(rc.rect_length);
    kv["rect_border"] = format_double(rc.rect_border);
    kv["cross_width"] = format_double(rc.cross_width);
    kv["cross_hlen"] = format_double(rc.cross_hlen);
    kv["cross_vlen"] = format_double(rc.cross_vlen);
    kv["noise_preset"] = rc.noise_preset;
    kv["noise_counts"] = format_double(rc.noise_counts);
    kv["seed"] = std::to_string(rc.seed);
    if (!rc.seeds.empty()) kv["seeds"] = join_seeds(rc.seeds);
    kv["alpha"] = format_double(rc.alpha);
    kv["beta"] = format_double(rc.beta);
    if (!rc.alphas.empty()) kv["alphas"] = join_values(rc.alphas);
    if (!rc.betas.empty()) kv["betas"] = join_values(rc.betas);
    kv["lambda1"] = format_double(rc.lambda1);
    kv["lambda2"] = format_double(rc.lambda2);
    kv["lambda3"] = format_double(rc.lambda3);
    kv["lambda4"] = format_double(rc.lambda4);
    kv["outer_iters"] = std::to_string(rc.outer_iters);
    kv["outer_tol"] = format_double(rc.outer_tol);
    kv["cg_iters"] = std::to_string(rc.cg_iters);
    kv["cg_tol"] = format_double(rc.cg_tol);
    kv["g_floor"] = format_double(rc.g_floor);
    if (!rc.input.empty()) kv["input"] = rc.input;
    if (!rc.truth.empty()) kv["truth"] = rc.truth;
    kv["method"] = rc.method;
    kv["em_iters"] = std::to_string(rc.em_iters);
    if (!rc.radii.empty()) kv["radii"] = join_values(rc.radii);
    if (rc.oracle_radius > 0.0) kv["oracle_radius"] = format_double(rc.oracle_radius);
    if (rc.oracle_beta >= 0.0) kv["oracle_beta"] = format_double(rc.oracle_beta);
    kv["skip_numeric"] = rc.skip_numeric ? "1" : "0";
    kv["out"] = rc.out;
    if (!rc.log_path.empty()) kv["log"] = rc.log_path;
    if (!rc.matrix_cache.empty()) kv["matrix_cache"] = rc.matrix_cache;
    kv["pgm"] = rc.pgm ? "1" : "0";
    kv["threads"] = std::to_string(rc.threads);
    return kv;
}

template <class T>
void from_string(const std::string& s, T& out) {
    std::istringstream ss(s);
    ss >> out;
    if (ss.fail()) throw std::runtime_error("bad config value '" + s + "'");
}

void from_string(const std::string& s, std::string& out) { out = s; }
void from_string(const std::string& s, bool& out) { out = (s == "1" || s == "true"); }

template <class T>
void from_string(const std::string& s, std::vector<T>& out) {
    out.clear();
    std::istringstream ss(s);
    T v;
    while (ss >> v) out.push_back(v);
}

void apply_config_file(RunConfig& rc, const std::string& path) {
    const KeyValueMap kv = read_key_value_file(path);
    auto get = [&](const char* key, auto& target) {
        auto it = kv.find(key);
        if (it != kv.end()) from_string(it->second, target);
    };
    get("geometry_preset", rc.geometry_preset);
    get("geometry", rc.geometry);
    get("pixel_size", rc.pixel_size);
    get("bin_spacing", rc.bin_spacing);
    get("angle_start", rc.angle_start);
    get("phantom", rc.phantom);
    get("intensity", rc.intensity);
    get("smooth", rc.smooth);
    get("disc_radius", rc.disc_radius);
    get("disc_center", rc.disc_center);
    get("r1", rc.r1);
    get("r2", rc.r2);
    get("c1", rc.c1);
    get("c2", rc.c2);
    get("ring_outer", rc.ring_outer);
    get("ring_inner1", rc.ring_inner1);
    get("ring_inner2", rc.ring_inner2);
    get("star_outer", rc.star_outer);
    get("star_inner", rc.star_inner);
    get("star_points", rc.star_points);
    get("rect_width", rc.rect_width);
    get("rect_length", rc.rect_length);
    get("rect_border", rc.rect_border);
    get("cross_width", rc.cross_width);
    get("cross_hlen", rc.cross_hlen);
    get("cross_vlen", rc.cross_vlen);
    get("noise_preset", rc.noise_preset);
    get("noise_counts", rc.noise_counts);
    get("seed", rc.seed);
    get("seeds", rc.seeds);
    get("alpha", rc.alpha);
    get("beta", rc.beta);
    get("alphas", rc.alphas);
    get("betas", rc.betas);
    get("lambda1", rc.lambda1);
    get("lambda2", rc.lambda2);
    get("lambda3", rc.lambda3);
    get("lambda4", rc.lambda4);
    get("outer_iters", rc.outer_iters);
    get("outer_tol", rc.outer_tol);
    get("cg_iters", rc.cg_iters);
    get("cg_tol", rc.cg_tol);
    get("g_floor", rc.g_floor);
    get("input", rc.input);
    get("truth", rc.truth);
    get("method", rc.method);
    get("em_iters", rc.em_iters);
    get("radii", rc.radii);
    get("oracle_radius", rc.oracle_radius);
    get("oracle_beta", rc.oracle_beta);
    get("skip_numeric", rc.skip_numeric);
    get("out", rc.out);
    get("log", rc.log_path);
    get("matrix_cache", rc.matrix_cache);
    get("pgm", rc.pgm);
    get("threads", rc.threads);
}

fs::path prepare_out_dir(const RunConfig& rc) {
    if (rc.out.empty()) throw std::runtime_error("--out directory is required");
    fs::path dir(rc.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + rc.out);
    return dir;
}

void write_manifest(const fs::path& dir, const RunConfig& rc,
                    const KeyValueMap& extra = {}) {
    KeyValueMap kv = to_key_values(rc);
    for (const auto& [k, v] : extra) kv[k] = v;
    write_key_value_file((dir / "manifest.cfg").string(), kv,
                         "tomotv run manifest; rerun with --config");
}

void save_image(const fs::path& path, const ImageGrid& img, const ScanGeometry& g,
                bool pgm) {
    GridFile gf;
    gf.kind = "image";
    gf.spacing1 = g.pixel_size;
    gf.spacing2 = g.pixel_size;
    gf.grid = img;
    save_grid(path.string(), gf);
    if (pgm) save_pgm16(path.string() + ".pgm", img);
}

void save_sino(const fs::path& path, const Sinogram& s, const ScanGeometry& g,
               bool pgm) {
    GridFile gf;
    gf.kind = "sinogram";
    gf.spacing1 = g.bin_spacing;
    gf.spacing2 = g.angle_step_deg;
    gf.grid = s;
    save_grid(path.string(), gf);
    if (pgm) save_pgm16(path.string() + ".pgm", s);
}

void write_profile_csv(const fs::path& path, const std::vector<double>& profile,
                       const char* index_name) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    f << index_name << ",value\n";
    f.precision(12);
    for (std::size_t q = 0; q < profile.size(); ++q)
        f << q << ',' << profile[q] << '\n';
}

double sinogram_snr(const Sinogram& clean, const Sinogram& noisy) {
    double num = 0.0, den = 0.0;
    for (std::size_t q = 0; q < clean.size(); ++q) {
        num += clean[q] * clean[q];
        const double d = clean[q] - noisy[q];
        den += d * d;
    }
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(num / den);
}

std::string beta_tag(double beta) {
    std::ostringstream ss;
    ss << beta;
    std::string s = ss.str();
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

int cmd_simulate(RunConfig& rc) {
    const ScanGeometry geom = make_geometry(rc);
    const PhantomSpec spec = make_phantom(rc);
    const fs::path dir = prepare_out_dir(rc);

    const ImageGrid phantom = render(spec, geom);
    if (max_value(phantom) <= 0.0) {
        std::cerr << "simulate: phantom is identically zero; its sinogram "
                     "cannot be noise-weighted\n";
        return kExitBadConfig;
    }
    const SystemMatrix R = load_or_build_system_matrix(geom, rc.matrix_cache);
    const Sinogram clean = forward_project(R, phantom);
    Sinogram noisy = clean;
    if (rc.noise_preset != "none" || rc.noise_counts > 0.0)
        noisy = apply_poisson(clean, make_noise(rc, rc.seed));

    save_image(dir / "phantom.pfg", phantom, geom, rc.pgm);
    save_sino(dir / "sinogram.pfg", clean, geom, rc.pgm);
    save_sino(dir / "sinogram_noisy.pfg", noisy, geom, rc.pgm);

    KeyValueMap extra;
    const double data_snr = sinogram_snr(clean, noisy);
    extra["sinogram_snr_db"] = format_double(data_snr);
    write_manifest(dir, rc, extra);
    std::cout << "simulate: wrote " << dir.string()
              << " (sinogram SNR = " << data_snr << " dB)\n";
    return kExitOk;
}

int cmd_reconstruct(RunConfig& rc) {
    const fs::path dir = prepare_out_dir(rc);
    if (rc.input.empty()) throw std::runtime_error("--input sinogram is required");
    const GridFile in = load_grid(rc.input);
    const ScanGeometry geom = make_geometry(rc);
    if (in.grid.rows() != geom.num_bins || in.grid.cols() != geom.num_angles)
        throw std::runtime_error("input sinogram does not match the geometry");

    const SystemMatrix R = load_or_build_system_matrix(geom, rc.matrix_cache);
    SolverConfig cfg = make_solver_config(rc);
    if (!rc.log_path.empty())
        cfg.log_path = rc.log_path;
    else
        cfg.log_path = (dir / "diagnostics.csv").string();

    ImageGrid image(geom.image_rows, geom.image_cols);
    bool converged = true;
    if (rc.method == "joint") {
        JointResult res = reconstruct_joint(in.grid, geom, R, cfg);
        image = res.image;
        converged = res.diag.converged && !res.diag.cg_trouble;
        save_sino(dir / "sinogram_regularised.pfg", res.regularised, geom, rc.pgm);
        std::cout << "reconstruct: " << res.diag.iterations << " iterations"
                  << (res.diag.converged ? "" : " (iteration cap reached)") << '\n';
    } else if (rc.method == "em") {
        image = em_reconstruct(in.grid, R, rc.em_iters);
    } else {
        throw std::runtime_error("unknown method '" + rc.method + "'");
    }

    save_image(dir / "image.pfg", image, geom, rc.pgm);
    write_profile_csv(dir / "profile_row.csv", middle_line_profile(image, Axis::row),
                      "col");
    write_profile_csv(dir / "profile_col.csv", middle_line_profile(image, Axis::col),
                      "row");

    KeyValueMap extra;
    if (!rc.truth.empty()) {
        const GridFile truth = load_grid(rc.truth);
        const double val = snr(truth.grid, image);
        extra["snr_db"] = format_double(val);
        std::cout << "reconstruct: SNR = " << val << " dB\n";
    }
    write_manifest(dir, rc, extra);
    return converged ? kExitOk : kExitNoConvergence;
}

int cmd_scale_space(RunConfig& rc) {
    if (rc.betas.empty()) throw CLI::ValidationError("--betas must be nonempty");
    const fs::path dir = prepare_out_dir(rc);
    const ScanGeometry geom = make_geometry(rc);
    const SystemMatrix R = load_or_build_system_matrix(geom, rc.matrix_cache);

    Sinogram g(geom.num_bins, geom.num_angles);
    if (!rc.input.empty()) {
        const GridFile in = load_grid(rc.input);
        if (in.grid.rows() != geom.num_bins || in.grid.cols() != geom.num_angles)
            throw std::runtime_error("input sinogram does not match the geometry");
        g = in.grid;
    } else {
        g = forward_project(R, render(make_phantom(rc), geom));
    }

    SolverConfig cfg = make_solver_config(rc);
    bool all_converged = true;
    for (double beta : rc.betas) {
        RofResult res = sinogram_rof(g, beta, cfg);
        all_converged = all_converged && res.diag.converged;
        const std::string tag = beta_tag(beta);
        save_sino(dir / ("sinogram_beta_" + tag + ".pfg"), res.sinogram, geom, rc.pgm);
        const ImageGrid image = fbp(res.sinogram, geom, Interp::linear);
        save_image(dir / ("image_beta_" + tag + ".pfg"), image, geom, rc.pgm);

        // 45-degree sinogram slice (nearest angle in the set)
        int a45 = 0;
        double best = 1e300;
        for (int a = 0; a < geom.num_angles; ++a) {
            const double d = std::abs(geom.angle_start_deg + a * geom.angle_step_deg - 45.0);
            if (d < best) {
                best = d;
                a45 = a;
            }
        }
        std::vector<double> slice(geom.num_bins);
        for (int b = 0; b < geom.num_bins; ++b) slice[b] = res.sinogram(b, a45);
        write_profile_csv(dir / ("slice45_beta_" + tag + ".csv"), slice, "bin");
        write_profile_csv(dir / ("profile_beta_" + tag + ".csv"),
                          middle_line_profile(image, Axis::row), "col");
        std::cout << "scale-space: beta=" << beta
                  << " flat_top=" << flat_top_value(res.sinogram) << '\n';
    }
    write_manifest(dir, rc);
    return all_converged ? kExitOk : kExitNoConvergence;
}

int cmd_oracle_table(RunConfig& rc) {
    const fs::path dir = prepare_out_dir(rc);
    const ScanGeometry geom = make_geometry(rc);

    // Default layout: the three disc radii with their seven beta values each.
    std::vector<std::pair<double, std::vector<double>>> table;
    if (rc.oracle_radius > 0.0 && rc.oracle_beta >= 0.0) {
        table.push_back({rc.oracle_radius, {rc.oracle_beta}});
    } else {
        std::vector<double> radii = rc.radii;
        if (radii.empty()) radii = {15.5, 30.5, 50.5};
        for (double r : radii) {
            std::vector<double> betas = rc.betas;
            if (betas.empty()) {
                if (r == 15.5) betas = {1e-3, 0.1, 1, 5, 10, 15, 15.5};
                else if (r == 30.5) betas = {1e-3, 1, 10, 15, 20, 25, 30.5};
                else if (r == 50.5) betas = {1e-3, 1, 10, 20, 30, 45, 50.5};
                else betas = {1e-3, 0.1 * r, 0.25 * r, 0.5 * r, 0.75 * r, 0.9 * r, r};
            }
            table.push_back({r, betas});
        }
    }

    const SystemMatrix R =
        rc.skip_numeric ? SystemMatrix{} : load_or_build_system_matrix(geom, rc.matrix_cache);

    std::ofstream csv(dir / "oracle_table.csv");
    if (!csv) return kExitIo;
    csv << "r,beta,delta_an,delta_num,abs_diff\n";
    csv.precision(10);

    SolverConfig cfg = make_solver_config(rc);
    for (const auto& [r, betas] : table) {
        Sinogram g(geom.num_bins, geom.num_angles);
        if (!rc.skip_numeric) {
            PhantomSpec spec = PhantomSpec::make(PhantomKind::disc);
            spec.disc_radius = r;
            g = forward_project(R, render(spec, geom));
        }
        for (double beta : betas) {
            const OracleResult oracle = solve_kappa(r, beta);
            double dnum = std::numeric_limits<double>::quiet_NaN();
            double diff = std::numeric_limits<double>::quiet_NaN();
            if (!rc.skip_numeric) {
                RofResult res = sinogram_rof(g, beta, cfg);
                dnum = flat_top_value(res.sinogram);
                diff = std::abs(dnum - oracle.delta);
            }
            csv << r << ',' << beta << ',' << oracle.delta << ',' << dnum << ','
                << diff << '\n';
            std::cout << "oracle-table: r=" << r << " beta=" << beta
                      << " delta_an=" << oracle.delta << " delta_num=" << dnum << '\n';
        }
    }
    write_manifest(dir, rc);
    return kExitOk;
}

int cmd_sweep(RunConfig& rc) {
    if (rc.alphas.empty()) throw CLI::ValidationError("--alphas must be nonempty");
    if (rc.betas.empty()) throw CLI::ValidationError("--betas must be nonempty");
    const fs::path dir = prepare_out_dir(rc);
    const ScanGeometry geom = make_geometry(rc);
    const SystemMatrix R = load_or_build_system_matrix(geom, rc.matrix_cache);
    const PhantomSpec spec = make_phantom(rc);
    const ImageGrid truth = render(spec, geom);
    const Sinogram clean = forward_project(R, truth);

    std::vector<std::uint64_t> seeds = rc.seeds;
    if (seeds.empty()) seeds.push_back(rc.seed);

    const SolverConfig cfg = make_solver_config(rc);
    std::vector<ExperimentRecord> all;
    for (std::uint64_t seed : seeds) {
        Sinogram noisy = clean;
        if (rc.noise_preset != "none" || rc.noise_counts > 0.0)
            noisy = apply_poisson(clean, make_noise(rc, seed));
        std::vector<ExperimentRecord> records = parameter_sweep(
            noisy, truth, geom, R, rc.alphas, rc.betas, cfg, rc.phantom, seed);
        all.insert(all.end(), records.begin(), records.end());
    }
    write_sweep_csv((dir / "sweep.csv").string(), all);
    write_manifest(dir, rc);

    bool any_failed = false;
    for (const auto& r : all) any_failed = any_failed || r.failed;
    std::cout << "sweep: " << all.size() << " cells written to "
              << (dir / "sweep.csv").string() << '\n';
    return any_failed ? kExitNoConvergence : kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    RunConfig rc;

    // Config file values load first; explicit flags then override them.
    for (int q = 1; q + 1 < argc; ++q) {
        if (std::string(argv[q]) == "--config") rc.config_path = argv[q + 1];
    }
    if (!rc.config_path.empty()) {
        try {
            apply_config_file(rc, rc.config_path);
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return kExitBadConfig;
        }
    }

    CLI::App app{"tomotv: joint TV regularisation for PET in image and sinogram space"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", rc.config_path, "key = value config file");
        cmd->add_option("--geometry", rc.geometry,
                        "m n k l angle-step (rows cols bins angles step-deg)")
            ->expected(5);
        cmd->add_option("--geometry-preset", rc.geometry_preset)
            ->check(CLI::IsMember({"reference", "smoke"}));
        cmd->add_option("--pixel-size", rc.pixel_size);
        cmd->add_option("--bin-spacing", rc.bin_spacing);
        cmd->add_option("--angle-start", rc.angle_start);
        cmd->add_option("--out", rc.out, "output directory");
        cmd->add_option("--seed", rc.seed);
        cmd->add_option("--threads", rc.threads, "1 = serial reference path");
        cmd->add_option("--matrix-cache", rc.matrix_cache, "system matrix cache file");
        cmd->add_option("--log", rc.log_path, "per-iteration diagnostics CSV path");
        cmd->add_flag("--pgm", rc.pgm, "also write 16-bit PGM previews");
    };
    auto add_phantom = [&](CLI::App* cmd) {
        cmd->add_option("--phantom", rc.phantom)
            ->check(CLI::IsMember({"disc", "two_discs", "two_rings", "star",
                                   "thin_rectangle", "cross"}));
        cmd->add_option("--intensity", rc.intensity);
        cmd->add_flag("--smooth", rc.smooth, "area-fraction rendering");
        cmd->add_option("--disc-radius", rc.disc_radius);
        cmd->add_option("--disc-center", rc.disc_center)->expected(2);
        cmd->add_option("--r1", rc.r1);
        cmd->add_option("--r2", rc.r2);
        cmd->add_option("--c1", rc.c1)->expected(2);
        cmd->add_option("--c2", rc.c2)->expected(2);
        cmd->add_option("--ring-outer", rc.ring_outer);
        cmd->add_option("--ring-inner1", rc.ring_inner1);
        cmd->add_option("--ring-inner2", rc.ring_inner2);
        cmd->add_option("--star-outer", rc.star_outer);
        cmd->add_option("--star-inner", rc.star_inner);
        cmd->add_option("--star-points", rc.star_points);
        cmd->add_option("--rect-width", rc.rect_width);
        cmd->add_option("--rect-length", rc.rect_length);
        cmd->add_option("--rect-border", rc.rect_border);
        cmd->add_option("--cross-width", rc.cross_width);
        cmd->add_option("--cross-hlen", rc.cross_hlen);
        cmd->add_option("--cross-vlen", rc.cross_vlen);
    };
    auto add_noise = [&](CLI::App* cmd) {
        cmd->add_option("--noise-preset", rc.noise_preset)
            ->check(CLI::IsMember({"none", "low", "high"}));
        cmd->add_option("--noise-counts", rc.noise_counts,
                        "mean photon counts at the sinogram maximum (overrides preset)");
    };
    auto add_solver = [&](CLI::App* cmd) {
        cmd->add_option("--alpha", rc.alpha);
        cmd->add_option("--beta", rc.beta);
        cmd->add_option("--lambda1", rc.lambda1);
        cmd->add_option("--lambda2", rc.lambda2);
        cmd->add_option("--lambda3", rc.lambda3);
        cmd->add_option("--lambda4", rc.lambda4);
        cmd->add_option("--outer-iters", rc.outer_iters);
        cmd->add_option("--outer-tol", rc.outer_tol);
        cmd->add_option("--cg-iters", rc.cg_iters);
        cmd->add_option("--cg-tol", rc.cg_tol);
        cmd->add_option("--g-floor", rc.g_floor, "relative fidelity weight floor");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "phantom + clean/noisy sinograms");
    add_common(simulate);
    add_phantom(simulate);
    add_noise(simulate);

    CLI::App* reconstruct = app.add_subcommand("reconstruct", "joint TV or EM reconstruction");
    add_common(reconstruct);
    add_solver(reconstruct);
    reconstruct->add_option("--input", rc.input, "input sinogram .pfg");
    reconstruct->add_option("--truth", rc.truth, "ground truth image .pfg for SNR");
    reconstruct->add_option("--method", rc.method)->check(CLI::IsMember({"joint", "em"}));
    reconstruct->add_option("--em-iters", rc.em_iters);

    CLI::App* scale = app.add_subcommand("scale-space",
                                         "sinogram ROF + FBP across a beta list");
    add_common(scale);
    add_phantom(scale);
    add_solver(scale);
    scale->add_option("--input", rc.input, "input sinogram .pfg (else clean phantom)");
    scale->add_option("--betas", rc.betas)->expected(-1);

    CLI::App* oracle = app.add_subcommand("oracle-table",
                                          "analytic vs numerical disc flat-top table");
    add_common(oracle);
    add_solver(oracle);
    oracle->add_option("--radii", rc.radii)->expected(-1);
    oracle->add_option("--betas", rc.betas)->expected(-1);
    oracle->add_option("--radius", rc.oracle_radius, "single-cell radius");
    oracle->add_option("--beta-value", rc.oracle_beta, "single-cell beta");
    oracle->add_flag("--skip-numeric", rc.skip_numeric, "emit the analytic column only");

    CLI::App* sweep = app.add_subcommand("sweep", "SNR over an (alpha, beta) grid");
    add_common(sweep);
    add_phantom(sweep);
    add_noise(sweep);
    add_solver(sweep);
    sweep->add_option("--alphas", rc.alphas)->expected(-1);
    sweep->add_option("--betas", rc.betas)->expected(-1);
    sweep->add_option("--seeds", rc.seeds)->expected(-1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return kExitBadConfig;
    }

#ifdef _OPENMP
    if (rc.threads > 0) omp_set_num_threads(rc.threads);
#endif

    try {
        if (simulate->parsed()) {
            rc.command = "simulate";
            return cmd_simulate(rc);
        }
        if (reconstruct->parsed()) {
            rc.command = "reconstruct";
            return cmd_reconstruct(rc);
        }
        if (scale->parsed()) {
            rc.command = "scale-space";
            return cmd_scale_space(rc);
        }
        if (oracle->parsed()) {
            rc.command = "oracle-table";
            return cmd_oracle_table(rc);
        }
        if (sweep->parsed()) {
            rc.command = "sweep";
            return cmd_sweep(rc);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadConfig;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitBadConfig;
}
