#include <awave/conservative.hpp>
#include <awave/dissipative.hpp>
#include <awave/energy_state.hpp>
#include <awave/flux.hpp>
#include <awave/measure.hpp>

#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

namespace {

awave::EnergyState ramp_state(std::size_t n) {
    awave::EnergyState st;
    st.t = 0.0;
    st.xi_bar = 1.0;
    st.n_cells = n;
    st.U.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        st.U[i] = -double(i) / double(n);
    st.U[0] = 0.0;
    return st;
}

void bm_rk4_step(benchmark::State& state) {
    const awave::Flux fx = awave::make_flux("quadratic");
    awave::EnergyState st = ramp_state(std::size_t(state.range(0)));
    for (auto _ : state) {
        awave::EnergyState next = awave::step(st, fx, 1e-3);
        benchmark::DoNotOptimize(next.U.data());
    }
}
BENCHMARK(bm_rk4_step)->Arg(250)->Arg(1000)->Arg(4000);

void bm_evolve_half_unit(benchmark::State& state) {
    const awave::Flux fx = awave::make_flux("quadratic");
    const awave::EnergyState st = ramp_state(1000);
    for (auto _ : state) {
        awave::EnergyState out = awave::evolve(st, fx, 0.5, 1e-3);
        benchmark::DoNotOptimize(out.U.data());
    }
}
BENCHMARK(bm_evolve_half_unit);

void bm_picard_half_unit(benchmark::State& state) {
    const awave::Flux fx = awave::make_flux("cubic");
    awave::EnergyState st = ramp_state(500);
    for (std::size_t i = 0; i < st.U.size(); ++i) st.U[i] = -st.U[i];
    for (auto _ : state) {
        awave::EnergyState out =
            awave::picard_solve(st, fx, 0.05, 1e-10, 40, 1e-3);
        benchmark::DoNotOptimize(out.U.data());
    }
}
BENCHMARK(bm_picard_half_unit);

void bm_dissipative_step(benchmark::State& state) {
    const awave::Flux fx = awave::make_flux("quadratic");
    const awave::PiecewiseLinearFn ramp{{0.0, 1.0}, {0.0, -1.0}};
    awave::DissipativeState st =
        awave::init_dissipative(ramp, std::size_t(state.range(0)));
    for (auto _ : state) {
        awave::DissipativeState next = awave::d_step(st, fx, 1e-3);
        benchmark::DoNotOptimize(next.Y.data());
    }
}
BENCHMARK(bm_dissipative_step)->Arg(250)->Arg(1000)->Arg(4000);

void bm_to_physical(benchmark::State& state) {
    const awave::Flux fx = awave::make_flux("quadratic");
    awave::EnergyState st =
        awave::evolve(ramp_state(std::size_t(state.range(0))), fx, 0.5, 1e-3);
    for (auto _ : state) {
        awave::PhysicalSnapshot ps = awave::to_physical(st);
        benchmark::DoNotOptimize(ps.u.x.data());
    }
}
BENCHMARK(bm_to_physical)->Arg(250)->Arg(1000)->Arg(4000);

void bm_flat_distance(benchmark::State& state) {
    std::vector<double> bp{0.0, 1.0}, dens{1.0};
    const awave::Measure1D a(bp, dens, {{0.25, 0.5}});
    const awave::Measure1D b(bp, dens, {{0.75, 0.5}});
    for (auto _ : state) {
        double d = awave::flat_distance(a, b, 1e-3);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(bm_flat_distance);

}  // namespace

BENCHMARK_MAIN();
