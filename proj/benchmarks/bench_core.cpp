#include <benchmark/benchmark.h>

#include "tomotv/geometry.hpp"
#include "tomotv/noise.hpp"
#include "tomotv/operators.hpp"
#include "tomotv/phantoms.hpp"
#include "tomotv/solver.hpp"

using namespace tomotv;

namespace {

const ScanGeometry& ref_geom() {
    static ScanGeometry g = ScanGeometry::reference();
    return g;
}

const SystemMatrix& ref_matrix() {
    static SystemMatrix R = build_system_matrix(ref_geom());
    return R;
}

const ImageGrid& disc_image() {
    static ImageGrid img = [] {
        PhantomSpec spec = PhantomSpec::make(PhantomKind::disc);
        spec.disc_radius = 50.5;
        return render(spec, ref_geom());
    }();
    return img;
}

const Sinogram& disc_sinogram() {
    static Sinogram s = forward_project(ref_matrix(), disc_image());
    return s;
}

} // namespace

static void BM_BuildSystemMatrix(benchmark::State& state) {
    ScanGeometry g = ScanGeometry::smoke();
    for (auto _ : state) {
        SystemMatrix R = build_system_matrix(g);
        benchmark::DoNotOptimize(R.values.data());
    }
}
BENCHMARK(BM_BuildSystemMatrix)->Unit(benchmark::kMillisecond);

static void BM_ForwardProject(benchmark::State& state) {
    const SystemMatrix& R = ref_matrix();
    const ImageGrid& u = disc_image();
    for (auto _ : state) {
        Sinogram s = forward_project(R, u);
        benchmark::DoNotOptimize(s.data());
    }
}
BENCHMARK(BM_ForwardProject)->Unit(benchmark::kMillisecond);

static void BM_BackProject(benchmark::State& state) {
    const SystemMatrix& R = ref_matrix();
    const Sinogram& s = disc_sinogram();
    for (auto _ : state) {
        ImageGrid u = back_project(R, s);
        benchmark::DoNotOptimize(u.data());
    }
}
BENCHMARK(BM_BackProject)->Unit(benchmark::kMillisecond);

static void BM_GradientDivergence(benchmark::State& state) {
    Grid2D f(175, 175, 1.0);
    for (int i = 0; i < 175; ++i) f(i, i) = 2.0;
    VectorField2 buf(175, 175);
    Grid2D out(175, 175);
    for (auto _ : state) {
        gradient_into(f, buf);
        divergence_into(buf, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_GradientDivergence)->Unit(benchmark::kMicrosecond);

static void BM_Fbp(benchmark::State& state) {
    const Sinogram& s = disc_sinogram();
    for (auto _ : state) {
        ImageGrid u = fbp(s, ref_geom(), Interp::linear);
        benchmark::DoNotOptimize(u.data());
    }
}
BENCHMARK(BM_Fbp)->Unit(benchmark::kMillisecond);

static void BM_RofIterations(benchmark::State& state) {
    const Sinogram& g = disc_sinogram();
    SolverConfig cfg;
    cfg.outer_max_iters = static_cast<int>(state.range(0));
    cfg.outer_rel_tol = 0.0;
    for (auto _ : state) {
        RofResult res = sinogram_rof(g, 10.0, cfg);
        benchmark::DoNotOptimize(res.sinogram.data());
    }
}
BENCHMARK(BM_RofIterations)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_JointIteration(benchmark::State& state) {
    const Sinogram& g = disc_sinogram();
    SolverConfig cfg;
    cfg.alpha = 2.0;
    cfg.outer_max_iters = 5;
    cfg.outer_rel_tol = 0.0;
    for (auto _ : state) {
        JointResult res = reconstruct_joint(g, ref_geom(), ref_matrix(), cfg);
        benchmark::DoNotOptimize(res.image.data());
    }
}
BENCHMARK(BM_JointIteration)->Unit(benchmark::kMillisecond);

static void BM_PoissonNoise(benchmark::State& state) {
    const Sinogram& g = disc_sinogram();
    NoiseModel nm{125.0, 7};
    for (auto _ : state) {
        Sinogram n = apply_poisson(g, nm);
        benchmark::DoNotOptimize(n.data());
    }
}
BENCHMARK(BM_PoissonNoise)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
