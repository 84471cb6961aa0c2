#include "robustmd/ambiguity.hpp"
#include "robustmd/guarantee.hpp"
#include "robustmd/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace robustmd;

namespace {

std::vector<double> random_tableau(std::size_t rows, std::size_t cols) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> t(rows * cols);
    for (auto& x : t) x = u(rng);
    return t;
}

template <void (*Pivot)(kernels::TableauView, std::size_t, std::size_t)>
void BM_Pivot(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const std::size_t cols = 2 * rows;
    const auto original = random_tableau(rows, cols);
    auto t = original;
    std::size_t k = 0;
    for (auto _ : state) {
        if (++k % 64 == 0) t = original; // keep magnitudes bounded
        kernels::TableauView view{t.data(), rows, cols, cols};
        const std::size_t pr = k % rows;
        view.at(pr, pr) = 1.5;
        Pivot(view, pr, pr);
        benchmark::DoNotOptimize(t.data());
    }
    state.SetItemsProcessed(static_cast<long>(state.iterations() * rows * cols));
}

template <void (*Kernel)(std::span<const double>, std::span<const double>, double, std::span<double>)>
void BM_WindowedMin(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> pts(n), vals(n), out(n);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = static_cast<double>(i) / static_cast<double>(n);
        vals[i] = u(rng);
    }
    const double h = 8.0 / static_cast<double>(n);
    for (auto _ : state) {
        Kernel(pts, vals, h, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(static_cast<long>(state.iterations() * n));
}

void BM_RadiusSweep(benchmark::State& state) {
    const auto grid = Grid::uniform(0.0, 2.0, 1.0 / 200.0, {0.5, 1.0});
    const auto v = ValueFunction::from_function(grid, [](double t) { return t < 0.5 ? -t : -0.35; });
    std::vector<double> radii;
    for (int k = 1; k <= 16; ++k) radii.push_back(0.001 * k);
    for (auto _ : state) {
        auto sweep = radius_sweep(v, SupportInterval{0.5, 1.0}, radii, BallMethod::ClosedForm);
        benchmark::DoNotOptimize(sweep.curve.data());
    }
}

} // namespace

BENCHMARK(BM_Pivot<kernels::pivot_reference>)->Name("pivot/serial")->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_Pivot<kernels::pivot>)->Name("pivot/openmp")->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_WindowedMin<kernels::windowed_min_reference>)->Name("windowed_min/serial")->Arg(1 << 10)->Arg(1 << 13);
BENCHMARK(BM_WindowedMin<kernels::windowed_min>)->Name("windowed_min/openmp")->Arg(1 << 10)->Arg(1 << 13)->Arg(1 << 16);
BENCHMARK(BM_RadiusSweep)->Name("radius_sweep/closed_form")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
