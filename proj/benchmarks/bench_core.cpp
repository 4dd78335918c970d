// Microbenchmarks for the kernels that dominate a segmentation run: the
// cosine transforms, the screened solves, redistancing, the edge detector,
// and one full iteration of the constrained model.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>

#include "cvxseg/admm.hpp"
#include "cvxseg/dct.hpp"
#include "cvxseg/field.hpp"
#include "cvxseg/forces.hpp"
#include "cvxseg/sdf.hpp"
#include "cvxseg/synth.hpp"

namespace {

cvxseg::ScalarField smooth_field(int side) {
    cvxseg::ScalarField f(side, side);
    for (int n = 0; n < side; ++n)
        for (int m = 0; m < side; ++m)
            f(m, n) = std::sin(0.13 * m) * std::cos(0.07 * n) + 0.01 * m;
    return f;
}

void bm_dct_forward_direct(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const cvxseg::Dct2 dct(side, side, cvxseg::Dct2::Route::direct);
    const cvxseg::ScalarField f = smooth_field(side);
    for (auto _ : state) benchmark::DoNotOptimize(dct.forward(f));
    state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(bm_dct_forward_direct)->Arg(64)->Arg(128);

void bm_dct_forward_fft(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const cvxseg::Dct2 dct(side, side, cvxseg::Dct2::Route::fft);
    const cvxseg::ScalarField f = smooth_field(side);
    for (auto _ : state) benchmark::DoNotOptimize(dct.forward(f));
    state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(bm_dct_forward_fft)->Arg(64)->Arg(128)->Arg(256);

void bm_biharmonic_solve(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const cvxseg::SpectralSolver solver(side, side, 1.0, 10.0);
    const cvxseg::ScalarField rhs = smooth_field(side);
    for (auto _ : state) benchmark::DoNotOptimize(solver.biharmonic(rhs));
    state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(bm_biharmonic_solve)->Arg(64)->Arg(128)->Arg(256);

void bm_sdf_from_mask(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const cvxseg::SynthScene scene =
        cvxseg::synth_scene(cvxseg::SynthShape::crescent, side, side, 0.0, 0);
    for (auto _ : state) benchmark::DoNotOptimize(cvxseg::sdf_from_mask(scene.truth));
    state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(bm_sdf_from_mask)->Arg(64)->Arg(128)->Arg(256);

void bm_edge_detector(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const cvxseg::SynthScene scene =
        cvxseg::synth_scene(cvxseg::SynthShape::disk, side, side, 0.05, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(cvxseg::edge_detector(scene.image, 0.1, 10.0));
    state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(bm_edge_detector)->Arg(128)->Arg(256);

void bm_segmentation_iteration(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const cvxseg::SynthScene scene =
        cvxseg::synth_scene(cvxseg::SynthShape::disk, side, side, 0.05, 3);
    cvxseg::BinaryMask init(side, side);
    const double c = (side - 1) / 2.0, r = 0.27 * side;
    for (int n = 0; n < side; ++n)
        for (int m = 0; m < side; ++m)
            if (std::hypot(m - c, n - c) <= r) init(m, n) = 0;

    cvxseg::AdmmConfig cfg;
    cfg.model = cvxseg::Model::gmmc;
    cvxseg::ForceConfig fcfg;
    fcfg.lambda = 1e-3;

    for (auto _ : state) {
        state.PauseTiming();
        cfg.num_iters = static_cast<int>(state.range(1));
        state.ResumeTiming();
        benchmark::DoNotOptimize(
            cvxseg::run_segmentation(scene.image, init, {}, cfg, fcfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(1));
    state.counters["iters"] = static_cast<double>(state.range(1));
}
BENCHMARK(bm_segmentation_iteration)->Args({128, 10})->Args({128, 50})->Args({256, 10});

}  // namespace

BENCHMARK_MAIN();
