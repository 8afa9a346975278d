#include "tomotv/operators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace tomotv {

VectorField2 gradient(const Grid2D& f) {
    VectorField2 out(f.rows(), f.cols());
    gradient_into(f, out);
    return out;
}

void gradient_into(const Grid2D& f, VectorField2& out) {
    const int m = f.rows();
    const int n = f.cols();
    if (out.c1.rows() != m || out.c1.cols() != n) out = VectorField2(m, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < m; ++i) {
            out.c1(i, j) = (j < n - 1) ? f(i, j + 1) - f(i, j) : 0.0;
            out.c2(i, j) = (i < m - 1) ? f(i + 1, j) - f(i, j) : 0.0;
        }
    }
}

Grid2D divergence(const VectorField2& z) {
    Grid2D out(z.c1.rows(), z.c1.cols());
    divergence_into(z, out);
    return out;
}

void divergence_into(const VectorField2& z, Grid2D& out) {
    if (!z.c1.same_shape(z.c2))
        throw std::invalid_argument("divergence: component shape mismatch");
    const int m = z.c1.rows();
    const int n = z.c1.cols();
    if (out.rows() != m || out.cols() != n) out = Grid2D(m, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < m; ++i) {
            double d = 0.0;
            if (j <= n - 2) d += z.c1(i, j);
            if (j >= 1) d -= z.c1(i, j - 1);
            if (i <= m - 2) d += z.c2(i, j);
            if (i >= 1) d -= z.c2(i - 1, j);
            out(i, j) = d;
        }
    }
}

double tv_seminorm(const Grid2D& f, TvFlavour flavour) {
    const int m = f.rows();
    const int n = f.cols();
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < m; ++i) {
            const double d1 = (j < n - 1) ? f(i, j + 1) - f(i, j) : 0.0;
            const double d2 = (i < m - 1) ? f(i + 1, j) - f(i, j) : 0.0;
            total += (flavour == TvFlavour::isotropic)
                         ? std::sqrt(d1 * d1 + d2 * d2)
                         : std::abs(d1) + std::abs(d2);
        }
    }
    return total;
}

namespace detail {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_radix2: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) *
                           (inverse ? 1.0 : -1.0);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> x = a[i + j];
                const std::complex<double> y = a[i + j + len / 2] * w;
                a[i + j] = x + y;
                a[i + j + len / 2] = x - y;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

std::vector<double> ramp_filter_response(std::size_t n, double bin_spacing) {
    // Band-limited ramp sampled in the spatial domain (Ram-Lak):
    // h(0) = 1/(4 ds^2), h(j) = -1/(pi j ds)^2 for odd j, 0 for even j.
    std::vector<std::complex<double>> h(n, 0.0);
    const double ds2 = bin_spacing * bin_spacing;
    h[0] = 1.0 / (4.0 * ds2);
    for (std::size_t j = 1; j < n / 2; j += 2) {
        const double val = -1.0 / (std::numbers::pi * std::numbers::pi *
                                   static_cast<double>(j * j) * ds2);
        h[j] = val;
        h[n - j] = val;
    }
    fft_radix2(h, false);
    std::vector<double> response(n);
    for (std::size_t j = 0; j < n; ++j) response[j] = h[j].real();
    return response;
}

} // namespace detail

ImageGrid fbp(const Sinogram& v, const ScanGeometry& geom, Interp interpolation) {
    if (v.rows() != geom.num_bins || v.cols() != geom.num_angles)
        throw std::invalid_argument("fbp: sinogram does not match geometry");
    const int k = geom.num_bins;
    const int l = geom.num_angles;
    const double ds = geom.bin_spacing;

    // Angles that alias the same line modulo 180 degrees split their weight,
    // so sets covering more than a half-turn are not double counted.
    std::vector<double> weight(l);
    {
        std::map<long long, int> multiplicity;
        std::vector<long long> keys(l);
        for (int a = 0; a < l; ++a) {
            double deg = geom.angle_start_deg + a * geom.angle_step_deg;
            double res = std::fmod(deg, 180.0);
            if (res < 0.0) res += 180.0;
            keys[a] = std::llround(res * 1e6);
            if (keys[a] == 180000000) keys[a] = 0;
            ++multiplicity[keys[a]];
        }
        const double dtheta = (geom.angle_step_deg > 0.0)
                                  ? geom.angle_step_deg * std::numbers::pi / 180.0
                                  : std::numbers::pi;
        for (int a = 0; a < l; ++a) weight[a] = dtheta / multiplicity[keys[a]];
    }

    const std::size_t pad = detail::next_pow2(std::max<std::size_t>(2 * k, 64));
    const std::vector<double> response = detail::ramp_filter_response(pad, ds);

    // Ramp-filter each angle's profile.
    Grid2D filtered(k, l);
    std::vector<std::complex<double>> buf(pad);
    for (int a = 0; a < l; ++a) {
        std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
        for (int b = 0; b < k; ++b) buf[b] = v(b, a);
        detail::fft_radix2(buf, false);
        for (std::size_t q = 0; q < pad; ++q) buf[q] *= response[q];
        detail::fft_radix2(buf, true);
        for (int b = 0; b < k; ++b) filtered(b, a) = buf[b].real() * ds;
    }

    ImageGrid image(geom.image_rows, geom.image_cols);
    const double half = 0.5 * (k - 1);
    for (int a = 0; a < l; ++a) {
        const double theta = geom.angle_rad(a);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const double wa = weight[a];
        for (int j = 0; j < geom.image_cols; ++j) {
            const double x = geom.pixel_x(j);
            for (int i = 0; i < geom.image_rows; ++i) {
                const double y = geom.pixel_y(i);
                const double pos = (x * c + y * s) / ds + half;
                double val = 0.0;
                if (interpolation == Interp::nearest) {
                    const long long b = std::llround(pos);
                    if (b >= 0 && b < k) val = filtered(static_cast<int>(b), a);
                } else {
                    const double fl = std::floor(pos);
                    const int b0 = static_cast<int>(fl);
                    const double t = pos - fl;
                    if (b0 >= 0 && b0 < k) val += (1.0 - t) * filtered(b0, a);
                    if (b0 + 1 >= 0 && b0 + 1 < k) val += t * filtered(b0 + 1, a);
                }
                image(i, j) += wa * val;
            }
        }
    }
    return image;
}

} // namespace tomotv
