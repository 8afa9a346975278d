#pragma once

#include <complex>
#include <vector>

#include "tomotv/geometry.hpp"
#include "tomotv/grid.hpp"

namespace tomotv {

enum class TvFlavour { isotropic, anisotropic };
enum class Interp { nearest, linear };

/// Forward differences with zero at the trailing column/row:
/// (grad f).c1(i,j) = f(i,j+1) - f(i,j), (grad f).c2(i,j) = f(i+1,j) - f(i,j).
VectorField2 gradient(const Grid2D& f);
void gradient_into(const Grid2D& f, VectorField2& out);

/// Negative adjoint of gradient(): <div z, u> = -<z, grad u> for all u.
Grid2D divergence(const VectorField2& z);
void divergence_into(const VectorField2& z, Grid2D& out);

double tv_seminorm(const Grid2D& f, TvFlavour flavour = TvFlavour::isotropic);

/// Filtered back-projection: Ram-Lak ramp filtering along the radial
/// coordinate (zero-padded to the next power of two >= 2k), then weighted
/// backprojection. Angles that revisit the same line modulo 180 degrees share
/// their weight, so sets covering more than a half-turn are not double
/// counted.
ImageGrid fbp(const Sinogram& v, const ScanGeometry& geom,
              Interp interpolation = Interp::linear);

namespace detail {
/// Iterative radix-2 FFT; n must be a power of two. inverse=true applies the
/// unscaled inverse transform followed by division by n.
void fft_radix2(std::vector<std::complex<double>>& a, bool inverse);
std::size_t next_pow2(std::size_t n);
/// Frequency response of the band-limited ramp filter of length n (a power
/// of two), built from the exact spatial-domain kernel samples.
std::vector<double> ramp_filter_response(std::size_t n, double bin_spacing);
} // namespace detail

} // namespace tomotv
