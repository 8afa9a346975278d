#include "tomotv/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace tomotv {

namespace {

struct Point {
    double x, y;
};

bool in_disc(double x, double y, double cx, double cy, double r) {
    const double dx = x - cx;
    const double dy = y - cy;
    return dx * dx + dy * dy <= r * r;
}

/// Axis-aligned box with half-open extents [c - len/2, c + len/2) so that an
/// integer-width box covers exactly that many unit-spaced pixel centers.
bool in_box(double x, double y, double cx, double cy, double w, double h) {
    return x >= cx - 0.5 * w && x < cx + 0.5 * w && y >= cy - 0.5 * h &&
           y < cy + 0.5 * h;
}

std::vector<Point> star_polygon(int points, double outer, double inner) {
    std::vector<Point> poly;
    poly.reserve(2 * points);
    const double base = std::numbers::pi / 2.0;  // one spike points straight up
    const double step = std::numbers::pi / points;
    for (int q = 0; q < 2 * points; ++q) {
        const double r = (q % 2 == 0) ? outer : inner;
        const double ang = base + q * step;
        poly.push_back({r * std::cos(ang), r * std::sin(ang)});
    }
    return poly;
}

bool in_polygon(double x, double y, const std::vector<Point>& poly) {
    bool inside = false;
    for (std::size_t q = 0, p = poly.size() - 1; q < poly.size(); p = q++) {
        const Point& a = poly[q];
        const Point& b = poly[p];
        if ((a.y > y) != (b.y > y)) {
            const double xc = a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (x < xc) inside = !inside;
        }
    }
    return inside;
}

/// Largest distance from the grid center reached by the phantom, for the
/// field-of-view fit check.
double radial_extent(const PhantomSpec& s) {
    auto reach = [](double cx, double cy, double r) {
        return std::hypot(cx, cy) + r;
    };
    switch (s.kind) {
        case PhantomKind::disc:
            return reach(s.disc_cx, s.disc_cy, s.disc_radius);
        case PhantomKind::two_discs:
            return std::max(reach(s.c1x, s.c1y, s.r1), reach(s.c2x, s.c2y, s.r2));
        case PhantomKind::two_rings:
            return std::max(reach(s.ring1x, s.ring1y, s.ring_outer),
                            reach(s.ring2x, s.ring2y, s.ring_outer));
        case PhantomKind::star:
            return s.star_outer;
        case PhantomKind::thin_rectangle:
            return 0.5 * std::hypot(s.rect_width, s.rect_length);
        case PhantomKind::cross:
            return 0.5 * std::max(s.cross_horizontal_len, s.cross_vertical_len);
    }
    return 0.0;
}

} // namespace

PhantomSpec PhantomSpec::make(PhantomKind kind) {
    PhantomSpec s;
    s.kind = kind;
    return s;
}

PhantomKind phantom_kind_from_string(const std::string& name) {
    if (name == "disc") return PhantomKind::disc;
    if (name == "two_discs") return PhantomKind::two_discs;
    if (name == "two_rings") return PhantomKind::two_rings;
    if (name == "star") return PhantomKind::star;
    if (name == "thin_rectangle") return PhantomKind::thin_rectangle;
    if (name == "cross") return PhantomKind::cross;
    throw std::invalid_argument("unknown phantom kind: " + name);
}

std::string to_string(PhantomKind kind) {
    switch (kind) {
        case PhantomKind::disc: return "disc";
        case PhantomKind::two_discs: return "two_discs";
        case PhantomKind::two_rings: return "two_rings";
        case PhantomKind::star: return "star";
        case PhantomKind::thin_rectangle: return "thin_rectangle";
        case PhantomKind::cross: return "cross";
    }
    return "?";
}

ImageGrid render(const PhantomSpec& spec, const ScanGeometry& geom) {
    geom.validate();
    if (spec.intensity < 0.0)
        throw std::invalid_argument("render: negative intensity");
    switch (spec.kind) {
        case PhantomKind::disc:
            if (spec.disc_radius <= 0.0) throw std::invalid_argument("render: nonpositive radius");
            break;
        case PhantomKind::two_discs:
            if (spec.r1 <= 0.0 || spec.r2 <= 0.0)
                throw std::invalid_argument("render: nonpositive radius");
            break;
        case PhantomKind::two_rings:
            if (spec.ring_outer <= 0.0 || spec.ring_inner1 <= 0.0 ||
                spec.ring_inner2 <= 0.0 || spec.ring_inner1 >= spec.ring_outer ||
                spec.ring_inner2 >= spec.ring_outer)
                throw std::invalid_argument("render: bad ring radii");
            break;
        case PhantomKind::star:
            if (spec.star_outer <= 0.0 || spec.star_inner <= 0.0 ||
                spec.star_inner >= spec.star_outer || spec.star_points < 3)
                throw std::invalid_argument("render: bad star parameters");
            break;
        case PhantomKind::thin_rectangle:
            if (spec.rect_width <= 0.0 || spec.rect_length <= 0.0 ||
                spec.rect_border <= 0.0 ||
                2.0 * spec.rect_border >= std::min(spec.rect_width, spec.rect_length))
                throw std::invalid_argument("render: bad rectangle parameters");
            break;
        case PhantomKind::cross:
            if (spec.cross_arm_width <= 0.0 || spec.cross_horizontal_len <= 0.0 ||
                spec.cross_vertical_len <= 0.0)
                throw std::invalid_argument("render: bad cross parameters");
            break;
    }
    const double fov_px = geom.field_of_view_radius / geom.pixel_size;
    if (radial_extent(spec) > fov_px)
        throw std::invalid_argument("render: phantom does not fit in the field of view");

    std::vector<Point> poly;
    if (spec.kind == PhantomKind::star)
        poly = star_polygon(spec.star_points, spec.star_outer, spec.star_inner);

    auto member = [&](double x, double y) -> bool {
        switch (spec.kind) {
            case PhantomKind::disc:
                return in_disc(x, y, spec.disc_cx, spec.disc_cy, spec.disc_radius);
            case PhantomKind::two_discs:
                return in_disc(x, y, spec.c1x, spec.c1y, spec.r1) ||
                       in_disc(x, y, spec.c2x, spec.c2y, spec.r2);
            case PhantomKind::two_rings: {
                const bool a = in_disc(x, y, spec.ring1x, spec.ring1y, spec.ring_outer) &&
                               !in_disc(x, y, spec.ring1x, spec.ring1y, spec.ring_inner1);
                const bool b = in_disc(x, y, spec.ring2x, spec.ring2y, spec.ring_outer) &&
                               !in_disc(x, y, spec.ring2x, spec.ring2y, spec.ring_inner2);
                return a || b;
            }
            case PhantomKind::star:
                return in_polygon(x, y, poly);
            case PhantomKind::thin_rectangle: {
                const bool outer = in_box(x, y, 0.0, 0.0, spec.rect_width, spec.rect_length);
                const bool inner = in_box(x, y, 0.0, 0.0, spec.rect_width - 2.0 * spec.rect_border,
                                          spec.rect_length - 2.0 * spec.rect_border);
                return outer && !inner;
            }
            case PhantomKind::cross:
                return in_box(x, y, 0.0, 0.0, spec.cross_horizontal_len, spec.cross_arm_width) ||
                       in_box(x, y, 0.0, 0.0, spec.cross_arm_width, spec.cross_vertical_len);
        }
        return false;
    };

    ImageGrid img(geom.image_rows, geom.image_cols);
    // Phantom parameters are in pixel units; sample pixel centers on the
    // integer offset lattice.
    for (int j = 0; j < geom.image_cols; ++j) {
        const double x = j - 0.5 * (geom.image_cols - 1);
        for (int i = 0; i < geom.image_rows; ++i) {
            const double y = 0.5 * (geom.image_rows - 1) - i;
            if (spec.smooth) {
                int covered = 0;
                for (int sy = 0; sy < 4; ++sy)
                    for (int sx = 0; sx < 4; ++sx)
                        if (member(x + (sx + 0.5) / 4.0 - 0.5, y + (sy + 0.5) / 4.0 - 0.5))
                            ++covered;
                img(i, j) = spec.intensity * covered / 16.0;
            } else {
                img(i, j) = member(x, y) ? spec.intensity : 0.0;
            }
        }
    }
    return img;
}

Sinogram analytic_disc_sinogram(double r, const ScanGeometry& geom) {
    geom.validate();
    if (r <= 0.0) throw std::invalid_argument("analytic_disc_sinogram: nonpositive radius");
    if (r >= geom.field_of_view_radius)
        throw std::invalid_argument("analytic_disc_sinogram: disc exceeds field of view");
    Sinogram g(geom.num_bins, geom.num_angles);
    for (int b = 0; b < geom.num_bins; ++b) {
        const double s = geom.bin_center(b);
        const double val = (std::abs(s) < r) ? 2.0 * std::sqrt(r * r - s * s) : 0.0;
        for (int a = 0; a < geom.num_angles; ++a) g(b, a) = val;
    }
    return g;
}

std::vector<double> middle_line_profile(const Grid2D& u, Axis axis) {
    std::vector<double> profile;
    if (axis == Axis::row) {
        const int i = u.rows() / 2;
        profile.resize(u.cols());
        for (int j = 0; j < u.cols(); ++j) profile[j] = u(i, j);
    } else {
        const int j = u.cols() / 2;
        profile.resize(u.rows());
        for (int i = 0; i < u.rows(); ++i) profile[i] = u(i, j);
    }
    return profile;
}

} // namespace tomotv
