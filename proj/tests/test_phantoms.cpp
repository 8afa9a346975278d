#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tomotv/geometry.hpp"
#include "tomotv/phantoms.hpp"

using namespace tomotv;

TEST_CASE("tiny disc covers exactly the center pixel") {
    ScanGeometry g = ScanGeometry::reference();
    PhantomSpec spec = PhantomSpec::make(PhantomKind::disc);
    spec.disc_radius = 0.4;
    ImageGrid img = render(spec, g);
    CHECK(sum(img) == 1.0);
    CHECK(img(g.image_rows / 2, g.image_cols / 2) == 1.0);
}

TEST_CASE("disc pixel count approximates the area") {
    ScanGeometry g = ScanGeometry::reference();
    PhantomSpec spec = PhantomSpec::make(PhantomKind::disc);
    spec.disc_radius = 50.5;
    ImageGrid img = render(spec, g);
    const double area = std::numbers::pi * 50.5 * 50.5;
    CHECK(std::abs(sum(img) - area) / area < 0.01);
}

TEST_CASE("two discs are disjoint and nonnegative") {
    ScanGeometry g = ScanGeometry::reference();
    PhantomSpec spec = PhantomSpec::make(PhantomKind::two_discs);
    ImageGrid img = render(spec, g);
    CHECK(min_value(img) >= 0.0);
    // the two discs never overlap: total mass is the sum of both areas
    const double area =
        std::numbers::pi * (spec.r1 * spec.r1 + spec.r2 * spec.r2);
    CHECK(std::abs(sum(img) - area) / area < 0.02);
    // centers are filled
    auto pixel_at = [&](double x, double y) {
        const int j = static_cast<int>(std::lround(x + 0.5 * (g.image_cols - 1)));
        const int i = static_cast<int>(std::lround(0.5 * (g.image_rows - 1) - y));
        return img(i, j);
    };
    CHECK(pixel_at(spec.c1x, spec.c1y) == 1.0);
    CHECK(pixel_at(spec.c2x, spec.c2y) == 1.0);
    // midpoint between the discs is empty
    CHECK(pixel_at(0.5 * (spec.c1x + spec.c2x), 0.5 * (spec.c1y + spec.c2y)) == 0.0);
}

TEST_CASE("rings have hollow centers, cross and frame have exact pixel widths") {
    ScanGeometry g = ScanGeometry::reference();
    auto pixel_at = [&](const ImageGrid& img, double x, double y) {
        const int j = static_cast<int>(std::lround(x + 0.5 * (g.image_cols - 1)));
        const int i = static_cast<int>(std::lround(0.5 * (g.image_rows - 1) - y));
        return img(i, j);
    };

    PhantomSpec rings = PhantomSpec::make(PhantomKind::two_rings);
    ImageGrid ri = render(rings, g);
    CHECK(pixel_at(ri, rings.ring1x, rings.ring1y) == 0.0);  // hollow
    CHECK(pixel_at(ri, rings.ring1x + 0.5 * (rings.ring_inner1 + rings.ring_outer),
                   rings.ring1y) == 1.0);  // annulus

    PhantomSpec cross = PhantomSpec::make(PhantomKind::cross);
    ImageGrid cr = render(cross, g);
    // vertical arm is exactly 3 px wide at mid-height
    int width = 0;
    const int i0 = g.image_rows / 2 - 20;
    for (int j = 0; j < g.image_cols; ++j) width += cr(i0, j) > 0 ? 1 : 0;
    CHECK(width == 3);
    // horizontal arm is exactly 121 px long through the center row
    int len = 0;
    for (int j = 0; j < g.image_cols; ++j) len += cr(g.image_rows / 2, j) > 0 ? 1 : 0;
    CHECK(len == 121);

    PhantomSpec frame = PhantomSpec::make(PhantomKind::thin_rectangle);
    ImageGrid fr = render(frame, g);
    CHECK(pixel_at(fr, 0, 0) == 0.0);  // hollow interior
    // the border is exactly 2 px: walking inward from the left edge of the
    // outer box along the center row crosses 2 filled pixels
    int run = 0;
    bool started = false;
    for (int j = 0; j < g.image_cols; ++j) {
        const double v = fr(g.image_rows / 2, j);
        if (v > 0) {
            started = true;
            ++run;
        } else if (started) {
            break;
        }
    }
    CHECK(run == 2);
}

TEST_CASE("star has the requested fold symmetry") {
    ScanGeometry g = ScanGeometry::reference();
    PhantomSpec spec = PhantomSpec::make(PhantomKind::star);
    ImageGrid img = render(spec, g);
    CHECK(sum(img) > 0.0);
    CHECK(min_value(img) >= 0.0);
    // mass is invariant under rotation by 72 degrees (sampled comparison)
    double mismatch = 0.0, total = 0.0;
    const double rot = 2.0 * std::numbers::pi / spec.star_points;
    for (int i = 0; i < g.image_rows; ++i)
        for (int j = 0; j < g.image_cols; ++j) {
            if (img(i, j) == 0.0) continue;
            const double x = g.pixel_x(j), y = g.pixel_y(i);
            const double xr = x * std::cos(rot) - y * std::sin(rot);
            const double yr = x * std::sin(rot) + y * std::cos(rot);
            const int jr = static_cast<int>(std::lround(xr + 0.5 * (g.image_cols - 1)));
            const int ir = static_cast<int>(std::lround(0.5 * (g.image_rows - 1) - yr));
            total += 1.0;
            if (img(ir, jr) == 0.0) mismatch += 1.0;
        }
    CHECK(mismatch / total < 0.05);  // boundary pixels may move under rotation
}

TEST_CASE("render rejects bad specs") {
    ScanGeometry g = ScanGeometry::reference();
    PhantomSpec spec = PhantomSpec::make(PhantomKind::disc);
    spec.disc_radius = 200.0;  // outside the field of view
    CHECK_THROWS_AS(render(spec, g), std::invalid_argument);
    spec.disc_radius = -1.0;
    CHECK_THROWS_AS(render(spec, g), std::invalid_argument);
    spec = PhantomSpec::make(PhantomKind::disc);
    spec.intensity = -2.0;
    CHECK_THROWS_AS(render(spec, g), std::invalid_argument);
}

TEST_CASE("analytic disc sinogram values") {
    ScanGeometry g = ScanGeometry::reference();
    CHECK_THROWS_AS(analytic_disc_sinogram(-1.0, g), std::invalid_argument);
    CHECK_THROWS_AS(analytic_disc_sinogram(1000.0, g), std::invalid_argument);

    const double r = 50.5;
    Sinogram s = analytic_disc_sinogram(r, g);
    // peak at the innermost bins: 2*sqrt(r^2 - 0.25)
    const int kc = g.num_bins / 2;
    CHECK(s(kc, 0) == doctest::Approx(2.0 * std::sqrt(r * r - 0.25)).epsilon(1e-12));
    // g(30) = 2*sqrt(50.5^2 - 900) = 81.2465 (cross-checked by quadrature below)
    int b30 = -1;
    for (int b = 0; b < g.num_bins; ++b)
        if (g.bin_center(b) == 30.5) b30 = b;  // closest sample to 30 is 30.5
    REQUIRE(b30 >= 0);
    CHECK(s(b30, 5) == doctest::Approx(2.0 * std::sqrt(r * r - 30.5 * 30.5)).epsilon(1e-12));

    // numerical chord-length integration of the indicator at s = 30
    const double off = 30.0;
    const int N = 2'000'000;
    const double T = 60.0;
    double chord = 0.0;
    for (int q = 0; q < N; ++q) {
        const double t = -T + (q + 0.5) * (2 * T / N);
        if (off * off + t * t <= r * r) chord += 2 * T / N;
    }
    CHECK(chord == doctest::Approx(81.2465).epsilon(1e-4));
    CHECK(2.0 * std::sqrt(r * r - off * off) == doctest::Approx(81.2465).epsilon(1e-4));

    // zero at and beyond the radius, angle independence
    for (int b = 0; b < g.num_bins; ++b) {
        if (std::abs(g.bin_center(b)) >= r) CHECK(s(b, 7) == 0.0);
        for (int a = 1; a < g.num_angles; ++a) CHECK(s(b, a) == s(b, 0));
    }
}

TEST_CASE("middle line profiles") {
    Grid2D c(5, 9, 4.5);
    auto row = middle_line_profile(c, Axis::row);
    CHECK(row.size() == 9);
    for (double v : row) CHECK(v == 4.5);

    Grid2D single(1, 1, 2.0);
    CHECK(middle_line_profile(single, Axis::col) == std::vector<double>{2.0});

    ScanGeometry g = ScanGeometry::reference();
    PhantomSpec spec = PhantomSpec::make(PhantomKind::disc);
    spec.disc_radius = 30.5;
    ImageGrid disc = render(spec, g);
    auto profile = middle_line_profile(disc, Axis::row);
    int width = 0;
    for (double v : profile) width += v > 0 ? 1 : 0;
    CHECK(std::abs(width - 2 * 30.5) <= 1.0);  // top-hat of width about 2r
}

TEST_CASE("projection of rendered discs tracks the analytic profile") {
    // The rim bins are pixelisation-limited: at the tangent offsets |s| = r
    // the analytic profile drops to zero with unbounded slope while the
    // rendered disc's mass is quantised in whole pixels, so those two bins
    // are excluded. Individual oblique rays keep an O(1) pixelisation wobble;
    // the angle-averaged profile is what the discretisation controls.
    ScanGeometry g = ScanGeometry::reference();
    SystemMatrix R = build_system_matrix(g);
    for (double r : {15.5, 30.5, 50.5}) {
        PhantomSpec spec = PhantomSpec::make(PhantomKind::disc);
        spec.disc_radius = r;
        Sinogram proj = forward_project(R, render(spec, g));
        Sinogram exact = analytic_disc_sinogram(r, g);
        double worst_mean = 0.0, l2_num = 0.0, l2_den = 0.0;
        for (int b = 0; b < g.num_bins; ++b) {
            double mean = 0.0;
            for (int a = 0; a < g.num_angles; ++a) mean += proj(b, a);
            mean /= g.num_angles;
            if (std::abs(std::abs(g.bin_center(b)) - r) > 0.5 * g.bin_spacing)
                worst_mean = std::max(worst_mean, std::abs(mean - exact(b, 0)));
        }
        for (std::size_t q = 0; q < proj.size(); ++q) {
            l2_num += (proj[q] - exact[q]) * (proj[q] - exact[q]);
            l2_den += exact[q] * exact[q];
        }
        CHECK(worst_mean < 1.5);
        // relative L2 of the raw per-ray comparison floors near 3% at the
        // smallest radius (measured; rendering-independent), 2% above it
        CHECK(std::sqrt(l2_num / l2_den) < (r < 20 ? 0.035 : 0.02));
    }
}

TEST_CASE("rendering is deterministic") {
    ScanGeometry g = ScanGeometry::smoke();
    PhantomSpec spec = PhantomSpec::make(PhantomKind::star);
    ImageGrid a = render(spec, g);
    ImageGrid b = render(spec, g);
    CHECK(a == b);
}
