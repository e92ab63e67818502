#include <benchmark/benchmark.h>

#include "hjbtk/fields.hpp"
#include "hjbtk/mesh.hpp"
#include "hjbtk/solvers.hpp"

using namespace hjbtk;

namespace {

// One monotone sweep over the grid; the dominant cost of every solver.
void BM_sl_step_lqr(benchmark::State& state) {
    auto pr = builtin("lqr-1d");
    auto mesh = mesh_sphere_radius(pr, static_cast<int>(state.range(1)));
    SchemeModel model = SchemeModel::for_problem(pr, mesh);
    Grid grid({{-2.0, 2.0, static_cast<int>(state.range(0)), false}});
    ValueField u(grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double x = grid.coords(i)[0];
        u.values[i] = x * x;
    }
    for (auto _ : state) {
        u = sl_step(model, u, 0.02, 0.5, false, nullptr);
        benchmark::DoNotOptimize(u.values.data());
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(u.size() * mesh.size()));
}

void BM_sl_step_finite_2d(benchmark::State& state) {
    auto pr = builtin("example-4-1");
    auto mesh = mesh_finite(pr.control_set);
    SchemeModel model = SchemeModel::for_problem(pr, mesh);
    const int n = static_cast<int>(state.range(0));
    Grid grid({{-2.0, 2.0, n, false}, {-2.0, 2.0, n, false}});
    ValueField u(grid);
    for (auto _ : state) {
        u = sl_step(model, u, 0.05, 0.0, false, nullptr);
        benchmark::DoNotOptimize(u.values.data());
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(u.size() * mesh.size()));
}

void BM_interpolate_2d(benchmark::State& state) {
    Grid grid({{-1.0, 1.0, 101, false}, {-1.0, 1.0, 101, false}});
    ValueField f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Vec x = grid.coords(i);
        f.values[i] = x[0] * x[0] + x[1];
    }
    double x = -0.9;
    for (auto _ : state) {
        x += 1e-4;
        if (x > 0.9) x = -0.9;
        benchmark::DoNotOptimize(interpolate(f, Vec{x, -x}));
    }
}

void BM_extended_eval(benchmark::State& state) {
    auto pr = builtin("lqr-1d");
    auto ext = extend(pr);
    Vec out(1);
    double w0 = 0.1;
    for (auto _ : state) {
        w0 += 1e-3;
        if (w0 > 0.99) w0 = 0.1;
        const double w = std::sqrt(1.0 - w0 * w0);
        ext.f_bar(Vec{0.7}, w0, Vec{w}, out);
        benchmark::DoNotOptimize(ext.l_bar(Vec{0.7}, w0, Vec{w}) + out[0]);
    }
}

}  // namespace

BENCHMARK(BM_sl_step_lqr)->Args({201, 17})->Args({201, 65})->Args({801, 17});
BENCHMARK(BM_sl_step_finite_2d)->Arg(41)->Arg(81);
BENCHMARK(BM_interpolate_2d);
BENCHMARK(BM_extended_eval);

BENCHMARK_MAIN();
