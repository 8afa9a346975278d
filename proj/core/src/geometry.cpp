#include "tomotv/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tomotv {

namespace {

constexpr std::uint32_t kCacheVersion = 1;
constexpr char kCacheMagic[4] = {'T', 'O', 'M', 'O'};

struct Entry {
    std::uint32_t col;
    double value;
};

/// One traced ray: sorted crossing parameters, then one cell per segment
/// classified by its midpoint. A segment whose midpoint sits on a grid line
/// (the ray runs along a pixel edge) splits its length evenly between the two
/// adjacent cells, which is the two-sided limit of nearby rays.
void trace_ray(const ScanGeometry& g, double cos_t, double sin_t, double s,
               std::vector<Entry>& out, std::vector<double>& ts) {
    out.clear();
    const int m = g.image_rows;
    const int n = g.image_cols;
    const double h = g.pixel_size;

    // Ray point p(t) = (s*cos - t*sin, s*sin + t*cos) mapped to grid
    // coordinates u in [0, n], v in [0, m]; cell (i, j) covers
    // [j, j+1) x [i, i+1).
    const double u0 = (s * cos_t) / h + 0.5 * n;
    const double du = -sin_t / h;
    const double v0 = 0.5 * m - (s * sin_t) / h;
    const double dv = -cos_t / h;

    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    auto clip = [&](double start, double rate, double extent) -> bool {
        if (rate == 0.0) return start >= 0.0 && start <= extent;
        double ta = (0.0 - start) / rate;
        double tb = (extent - start) / rate;
        if (ta > tb) std::swap(ta, tb);
        t_lo = std::max(t_lo, ta);
        t_hi = std::min(t_hi, tb);
        return true;
    };
    if (!clip(u0, du, static_cast<double>(n))) return;
    if (!clip(v0, dv, static_cast<double>(m))) return;
    if (!(t_lo < t_hi)) return;

    ts.clear();
    ts.push_back(t_lo);
    ts.push_back(t_hi);
    auto add_crossings = [&](double start, double rate) {
        if (rate == 0.0) return;
        const double ca = start + rate * t_lo;
        const double cb = start + rate * t_hi;
        const int c_min = static_cast<int>(std::ceil(std::min(ca, cb)));
        const int c_max = static_cast<int>(std::floor(std::max(ca, cb)));
        for (int c = c_min; c <= c_max; ++c) {
            const double t = (c - start) / rate;
            if (t > t_lo && t < t_hi) ts.push_back(t);
        }
    };
    add_crossings(u0, du);
    add_crossings(v0, dv);
    std::sort(ts.begin(), ts.end());

    const double eps_t = 1e-12 * (std::abs(t_lo) + std::abs(t_hi) + 1.0);
    const double eps_edge = 1e-9;
    for (std::size_t q = 0; q + 1 < ts.size(); ++q) {
        const double dt = ts[q + 1] - ts[q];
        if (dt <= eps_t) continue;
        const double tm = 0.5 * (ts[q] + ts[q + 1]);
        const double um = u0 + du * tm;
        const double vm = v0 + dv * tm;
        const double len = dt * h;

        const double ur = std::round(um);
        const double vr = std::round(vm);
        auto push = [&](int i, int j, double value) {
            if (i < 0 || i >= m || j < 0 || j >= n) return;
            out.push_back({static_cast<std::uint32_t>(j) * static_cast<std::uint32_t>(m) +
                               static_cast<std::uint32_t>(i),
                           value});
        };
        if (std::abs(um - ur) < eps_edge) {
            const int j_hi = static_cast<int>(ur);
            const int i = static_cast<int>(std::floor(vm));
            push(i, j_hi - 1, 0.5 * len);
            push(i, j_hi, 0.5 * len);
        } else if (std::abs(vm - vr) < eps_edge) {
            const int i_hi = static_cast<int>(vr);
            const int j = static_cast<int>(std::floor(um));
            push(i_hi - 1, j, 0.5 * len);
            push(i_hi, j, 0.5 * len);
        } else {
            push(static_cast<int>(std::floor(vm)), static_cast<int>(std::floor(um)), len);
        }
    }

    // Canonical CSR row: sorted column indices, duplicates merged.
    std::sort(out.begin(), out.end(),
              [](const Entry& a, const Entry& b) { return a.col < b.col; });
    std::size_t w = 0;
    for (std::size_t q = 0; q < out.size(); ++q) {
        if (w > 0 && out[w - 1].col == out[q].col)
            out[w - 1].value += out[q].value;
        else
            out[w++] = out[q];
    }
    out.resize(w);
}

} // namespace

ScanGeometry ScanGeometry::reference() { return ScanGeometry{}; }

ScanGeometry ScanGeometry::smoke() {
    ScanGeometry g;
    g.image_rows = 87;
    g.image_cols = 87;
    g.num_angles = 96;
    g.num_bins = 96;
    g.angle_step_deg = 2.0;
    g.field_of_view_radius = 47.5;
    return g;
}

double ScanGeometry::angle_rad(int a) const {
    return (angle_start_deg + a * angle_step_deg) * std::numbers::pi / 180.0;
}

void ScanGeometry::validate() const {
    if (image_rows < 1 || image_cols < 1 || num_angles < 1 || num_bins < 1)
        throw std::invalid_argument("ScanGeometry: zero dimension");
    if (pixel_size <= 0.0 || bin_spacing <= 0.0)
        throw std::invalid_argument("ScanGeometry: nonpositive spacing");
    if (field_of_view_radius < 0.0)
        throw std::invalid_argument("ScanGeometry: negative field of view");
}

bool ScanGeometry::same_grid(const ScanGeometry& o) const {
    return image_rows == o.image_rows && image_cols == o.image_cols &&
           num_angles == o.num_angles && num_bins == o.num_bins &&
           pixel_size == o.pixel_size && bin_spacing == o.bin_spacing &&
           angle_start_deg == o.angle_start_deg && angle_step_deg == o.angle_step_deg;
}

SystemMatrix build_system_matrix(const ScanGeometry& geom) {
    geom.validate();
    SystemMatrix R;
    R.geom = geom;
    const std::size_t rows = geom.sinogram_bins();
    R.row_offsets.assign(rows + 1, 0);
    R.col_indices.reserve(rows * 8);
    R.values.reserve(rows * 8);

    std::vector<Entry> row;
    std::vector<double> ts;
    row.reserve(2 * (geom.image_rows + geom.image_cols));
    ts.reserve(2 * (geom.image_rows + geom.image_cols) + 4);

    std::size_t nnz = 0;
    for (int a = 0; a < geom.num_angles; ++a) {
        const double theta = geom.angle_rad(a);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (int b = 0; b < geom.num_bins; ++b) {
            trace_ray(geom, c, s, geom.bin_center(b), row, ts);
            for (const Entry& e : row) {
                R.col_indices.push_back(e.col);
                R.values.push_back(e.value);
            }
            nnz += row.size();
            R.row_offsets[static_cast<std::size_t>(a) * geom.num_bins + b + 1] = nnz;
        }
    }
    return R;
}

Sinogram forward_project(const SystemMatrix& R, const ImageGrid& u) {
    if (u.rows() != R.geom.image_rows || u.cols() != R.geom.image_cols)
        throw std::invalid_argument("forward_project: image does not match matrix");
    Sinogram out(R.geom.num_bins, R.geom.num_angles);
    const double* x = u.data();
    double* y = out.data();
    const std::size_t rows = R.rows();
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::uint64_t q = R.row_offsets[r]; q < R.row_offsets[r + 1]; ++q)
            acc += R.values[q] * x[R.col_indices[q]];
        y[r] = acc;
    }
    return out;
}

ImageGrid back_project(const SystemMatrix& R, const Sinogram& v) {
    if (v.rows() != R.geom.num_bins || v.cols() != R.geom.num_angles)
        throw std::invalid_argument("back_project: sinogram does not match matrix");
    ImageGrid out(R.geom.image_rows, R.geom.image_cols);
    double* x = out.data();
    const double* y = v.data();
    const std::size_t rows = R.rows();
    for (std::size_t r = 0; r < rows; ++r) {
        const double yr = y[r];
        if (yr == 0.0) continue;
        for (std::uint64_t q = R.row_offsets[r]; q < R.row_offsets[r + 1]; ++q)
            x[R.col_indices[q]] += R.values[q] * yr;
    }
    return out;
}

namespace {

template <class T>
void write_raw(std::ofstream& f, const T& v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void read_raw(std::ifstream& f, T& v) {
    f.read(reinterpret_cast<char*>(&v), sizeof(T));
}

} // namespace

void save_system_matrix(const std::string& path, const SystemMatrix& R) {
    static_assert(std::endian::native == std::endian::little,
                  "cache format is little-endian");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("save_system_matrix: cannot open " + path);
    f.write(kCacheMagic, 4);
    write_raw(f, kCacheVersion);
    write_raw(f, static_cast<std::uint32_t>(R.geom.image_rows));
    write_raw(f, static_cast<std::uint32_t>(R.geom.image_cols));
    write_raw(f, static_cast<std::uint32_t>(R.geom.num_bins));
    write_raw(f, static_cast<std::uint32_t>(R.geom.num_angles));
    write_raw(f, R.geom.pixel_size);
    write_raw(f, R.geom.angle_start_deg);
    write_raw(f, R.geom.angle_step_deg);
    write_raw(f, R.geom.bin_spacing);
    write_raw(f, static_cast<std::uint64_t>(R.nnz()));
    f.write(reinterpret_cast<const char*>(R.row_offsets.data()),
            static_cast<std::streamsize>(R.row_offsets.size() * sizeof(std::uint64_t)));
    f.write(reinterpret_cast<const char*>(R.col_indices.data()),
            static_cast<std::streamsize>(R.col_indices.size() * sizeof(std::uint32_t)));
    f.write(reinterpret_cast<const char*>(R.values.data()),
            static_cast<std::streamsize>(R.values.size() * sizeof(double)));
    if (!f) throw std::runtime_error("save_system_matrix: write failed for " + path);
}

SystemMatrix load_system_matrix(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_system_matrix: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kCacheMagic, 4) != 0)
        throw std::runtime_error("load_system_matrix: bad magic in " + path);
    std::uint32_t version = 0;
    read_raw(f, version);
    if (version != kCacheVersion)
        throw std::runtime_error("load_system_matrix: unsupported version");
    SystemMatrix R;
    std::uint32_t m, n, k, l;
    read_raw(f, m);
    read_raw(f, n);
    read_raw(f, k);
    read_raw(f, l);
    R.geom.image_rows = static_cast<int>(m);
    R.geom.image_cols = static_cast<int>(n);
    R.geom.num_bins = static_cast<int>(k);
    R.geom.num_angles = static_cast<int>(l);
    read_raw(f, R.geom.pixel_size);
    read_raw(f, R.geom.angle_start_deg);
    read_raw(f, R.geom.angle_step_deg);
    read_raw(f, R.geom.bin_spacing);
    R.geom.field_of_view_radius = 0.5 * (R.geom.num_bins - 1) * R.geom.bin_spacing;
    std::uint64_t nnz = 0;
    read_raw(f, nnz);
    R.row_offsets.resize(R.rows() + 1);
    R.col_indices.resize(nnz);
    R.values.resize(nnz);
    f.read(reinterpret_cast<char*>(R.row_offsets.data()),
           static_cast<std::streamsize>(R.row_offsets.size() * sizeof(std::uint64_t)));
    f.read(reinterpret_cast<char*>(R.col_indices.data()),
           static_cast<std::streamsize>(R.col_indices.size() * sizeof(std::uint32_t)));
    f.read(reinterpret_cast<char*>(R.values.data()),
           static_cast<std::streamsize>(R.values.size() * sizeof(double)));
    if (!f) throw std::runtime_error("load_system_matrix: truncated file " + path);
    return R;
}

SystemMatrix load_or_build_system_matrix(const ScanGeometry& geom,
                                         const std::string& cache_path) {
    if (!cache_path.empty()) {
        std::ifstream probe(cache_path, std::ios::binary);
        if (probe.good()) {
            probe.close();
            SystemMatrix R = load_system_matrix(cache_path);
            if (R.geom.same_grid(geom)) {
                R.geom.field_of_view_radius = geom.field_of_view_radius;
                return R;
            }
        }
    }
    SystemMatrix R = build_system_matrix(geom);
    if (!cache_path.empty()) save_system_matrix(cache_path, R);
    return R;
}

} // namespace tomotv
