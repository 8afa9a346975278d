#pragma once

#include <string>
#include <vector>

#include "tomotv/geometry.hpp"
#include "tomotv/grid.hpp"

namespace tomotv {

enum class PhantomKind { disc, two_discs, two_rings, star, thin_rectangle, cross };

/// Synthetic test image description. All lengths are in pixel units and all
/// positions are relative to the grid center; defaults follow the reported
/// experiment layouts where stated, with unstated placements fixed here.
struct PhantomSpec {
    PhantomKind kind = PhantomKind::disc;
    double intensity = 1.0;
    /// Area-fraction rendering with 4x4 subsampling instead of the default
    /// binary center-point test.
    bool smooth = false;

    // disc
    double disc_radius = 50.5;
    double disc_cx = 0.0, disc_cy = 0.0;

    // two_discs
    double r1 = 26.0, r2 = 11.0;
    double c1x = -30.0, c1y = 30.0;
    double c2x = 35.0, c2y = -15.0;

    // two_rings: same outer radius, different annulus widths
    double ring_outer = 25.5;
    double ring_inner1 = 21.0, ring_inner2 = 11.0;
    double ring1x = -35.0, ring1y = 0.0;
    double ring2x = 35.0, ring2y = 0.0;

    // star: regular star polygon
    int star_points = 5;
    double star_outer = 45.0, star_inner = 18.0;

    // thin_rectangle: rectangular frame
    double rect_width = 50.0, rect_length = 100.0, rect_border = 2.0;

    // cross: two crossing lines
    double cross_arm_width = 3.0;
    double cross_horizontal_len = 121.0, cross_vertical_len = 100.0;

    static PhantomSpec make(PhantomKind kind);
};

PhantomKind phantom_kind_from_string(const std::string& name);
std::string to_string(PhantomKind kind);

/// Renders the indicator image scaled by the intensity. A pixel belongs to
/// the phantom iff its center satisfies the region predicate (or, in smooth
/// mode, proportionally to the covered subsample fraction).
ImageGrid render(const PhantomSpec& spec, const ScanGeometry& geom);

/// Angle-independent sinogram of the unit disc indicator of radius r:
/// g(theta, s) = 2*sqrt(r^2 - s^2) for |s| < r, 0 otherwise.
Sinogram analytic_disc_sinogram(double r, const ScanGeometry& geom);

enum class Axis { row, col };
std::vector<double> middle_line_profile(const Grid2D& u, Axis axis);

} // namespace tomotv
