#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tomotv {

/// Dense 2-D array of doubles in column-major order (columns appended one
/// after another), so a CSR matrix acting on the flattened vector sees the
/// same layout the operators are defined on.
class Grid2D {
public:
    Grid2D() = default;
    Grid2D(int rows, int cols, double value = 0.0)
        : rows_(rows), cols_(cols),
          data_(check_extent(rows, cols), value) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(int i, int j) { return data_[index(i, j)]; }
    double operator()(int i, int j) const { return data_[index(i, j)]; }
    double& operator[](std::size_t flat) { return data_[flat]; }
    double operator[](std::size_t flat) const { return data_[flat]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    void fill(double value) { data_.assign(data_.size(), value); }

    bool same_shape(const Grid2D& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    friend bool operator==(const Grid2D& a, const Grid2D& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    static std::size_t check_extent(int rows, int cols) {
        if (rows < 1 || cols < 1)
            throw std::invalid_argument("Grid2D: dimensions must be >= 1");
        return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * rows_ + i;
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// Activity map, image_rows x image_cols.
using ImageGrid = Grid2D;
/// Line integrals, num_bins x num_angles (radial bin index runs down a column).
using Sinogram = Grid2D;

/// Forward-difference field: c1 holds differences along columns (horizontal),
/// c2 along rows (vertical). The trailing column of c1 and trailing row of c2
/// are zero when produced by gradient().
struct VectorField2 {
    Grid2D c1;
    Grid2D c2;

    VectorField2() = default;
    VectorField2(int rows, int cols) : c1(rows, cols), c2(rows, cols) {}

    bool same_shape(const VectorField2& o) const {
        return c1.same_shape(o.c1) && c2.same_shape(o.c2);
    }
};

inline void require_same_shape(const Grid2D& a, const Grid2D& b, const char* what) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

inline double dot(const Grid2D& a, const Grid2D& b) {
    require_same_shape(a, b, "dot");
    double s = 0.0;
    const double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) s += pa[i] * pb[i];
    return s;
}

inline double dot(const VectorField2& a, const VectorField2& b) {
    return dot(a.c1, b.c1) + dot(a.c2, b.c2);
}

inline double norm2(const Grid2D& a) { return std::sqrt(dot(a, a)); }
inline double norm2(const VectorField2& a) { return std::sqrt(dot(a, a)); }

inline double max_value(const Grid2D& a) {
    double m = a[0];
    for (std::size_t i = 1; i < a.size(); ++i)
        if (a[i] > m) m = a[i];
    return m;
}

inline double min_value(const Grid2D& a) {
    double m = a[0];
    for (std::size_t i = 1; i < a.size(); ++i)
        if (a[i] < m) m = a[i];
    return m;
}

inline double sum(const Grid2D& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i];
    return s;
}

} // namespace tomotv
