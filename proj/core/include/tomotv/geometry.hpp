#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tomotv/grid.hpp"

namespace tomotv {

/// Parallel-beam scan geometry: pixel lattice, projection angles and radial
/// bins. Radial bins are centred at s = (b - (k-1)/2) * bin_spacing, so the
/// bin coordinates are symmetric about zero.
struct ScanGeometry {
    int image_rows = 175;
    int image_cols = 175;
    double pixel_size = 1.0;
    int num_angles = 192;
    int num_bins = 192;
    double angle_start_deg = 0.0;
    double angle_step_deg = 1.0;
    double bin_spacing = 1.0;
    double field_of_view_radius = 95.5;

    /// 175x175 image, 192 angles at 1 degree steps, 192 bins of unit spacing.
    static ScanGeometry reference();
    /// Half-size geometry for fast smoke runs: 87x87 image, 96x96 sinogram.
    static ScanGeometry smoke();

    double angle_rad(int a) const;
    double bin_center(int b) const { return (b - 0.5 * (num_bins - 1)) * bin_spacing; }
    std::size_t image_pixels() const {
        return static_cast<std::size_t>(image_rows) * image_cols;
    }
    std::size_t sinogram_bins() const {
        return static_cast<std::size_t>(num_bins) * num_angles;
    }

    ImageGrid make_image(double value = 0.0) const { return ImageGrid(image_rows, image_cols, value); }
    Sinogram make_sinogram(double value = 0.0) const { return Sinogram(num_bins, num_angles, value); }

    /// Pixel center position in physical units; x grows with column index,
    /// y decreases with row index (row 0 is the top of the image).
    double pixel_x(int j) const { return (j - 0.5 * (image_cols - 1)) * pixel_size; }
    double pixel_y(int i) const { return (0.5 * (image_rows - 1) - i) * pixel_size; }

    void validate() const;
    bool same_grid(const ScanGeometry& o) const;
};

/// Sparse discrete Radon transform in CSR form. Row r = a * num_bins + b is
/// the line at angle index a and radial bin b; column c = j * image_rows + i
/// is pixel (i, j) under column-major vectorisation. Entries are the exact
/// Euclidean lengths of the line-pixel intersections.
struct SystemMatrix {
    ScanGeometry geom;
    std::vector<std::uint64_t> row_offsets;  // size rows()+1
    std::vector<std::uint32_t> col_indices;
    std::vector<double> values;

    std::size_t rows() const { return geom.sinogram_bins(); }
    std::size_t cols() const { return geom.image_pixels(); }
    std::size_t nnz() const { return values.size(); }
};

/// Builds the sparse Radon matrix by incremental ray traversal. Rays running
/// exactly along a pixel edge split their length evenly between the two
/// adjacent pixels (the two-sided limit), so axis-aligned projections stay
/// exact; grazing zero-length intersections are dropped.
SystemMatrix build_system_matrix(const ScanGeometry& geom);

Sinogram forward_project(const SystemMatrix& R, const ImageGrid& u);
ImageGrid back_project(const SystemMatrix& R, const Sinogram& v);

/// Binary cache: header {magic "TOMO", version u32, m n k l u32, pixel_size,
/// angle_start, angle_step, bin_spacing f64, nnz u64} then the CSR arrays
/// (row offsets u64, col indices u32, values f64), little-endian.
void save_system_matrix(const std::string& path, const SystemMatrix& R);
SystemMatrix load_system_matrix(const std::string& path);

/// Loads the cache when it exists and matches the geometry, else builds and
/// (if cache_path is nonempty) writes it.
SystemMatrix load_or_build_system_matrix(const ScanGeometry& geom,
                                         const std::string& cache_path);

} // namespace tomotv
