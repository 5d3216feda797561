#include <chambereff/ac.hpp>
#include <chambereff/combine.hpp>
#include <chambereff/io.hpp>
#include <chambereff/rc.hpp>
#include <chambereff/sim.hpp>

#include <benchmark/benchmark.h>

using namespace chambereff;

static void BM_QuadratureWeights(benchmark::State& state) {
    const double step = static_cast<double>(state.range(0)) / 10.0;
    const SphericalGrid grid(step, step);
    for (auto _ : state) benchmark::DoNotOptimize(ac::build_weights(grid).sum());
}
BENCHMARK(BM_QuadratureWeights)->Arg(50)->Arg(10)->Arg(1);

static void BM_DirectivityPerFrequency(benchmark::State& state) {
    const auto sweep = FrequencySweep::linear(1e9, 3e9, static_cast<std::size_t>(state.range(0)));
    const auto pat = sim::synth_pattern(sim::SyntheticAntenna(sim::AntennaKind::HalfWaveDipole, 1.0),
                                        SphericalGrid::default_grid(), sweep);
    for (auto _ : state) benchmark::DoNotOptimize(ac::directivity(pat.pattern, ac::peak_direction(pat.pattern)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DirectivityPerFrequency)->Arg(1)->Arg(201);

static void BM_StirredStats(benchmark::State& state) {
    sim::RcScenario sc;
    sc.n_steps = static_cast<std::size_t>(state.range(0));
    const auto e = sim::synth_rc_ensemble(0.9, 0.7, sc, FrequencySweep::default_sweep());
    for (auto _ : state) benchmark::DoNotOptimize(rc::stirred_stats(e, 0, 1));
}
BENCHMARK(BM_StirredStats)->Arg(100)->Arg(1000);

static void BM_SynthEnsemble(benchmark::State& state) {
    sim::RcScenario sc;
    sc.unstirred_reflection = {0.1, 0.15, 0.12};
    const auto workers = static_cast<unsigned>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(sim::synth_rc_ensemble_mimo(0.9, 0.6, 0.8, sc, FrequencySweep::default_sweep(), workers));
}
BENCHMARK(BM_SynthEnsemble)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_VirtualCombine(benchmark::State& state) {
    sim::RcScenario sc;
    sc.unstirred_reflection = {0.1, 0.15, 0.12};
    const auto sweep = FrequencySweep::default_sweep();
    const auto e = sim::synth_rc_ensemble_mimo(0.9, 0.6, 0.8, sc, sweep);
    const auto c = combine::ideal_combiner(3.2, 20.0, sweep);
    for (auto _ : state) benchmark::DoNotOptimize(combine::virtual_combine(e, c));
}
BENCHMARK(BM_VirtualCombine)->Unit(benchmark::kMillisecond);

static void BM_TouchstoneParse(benchmark::State& state) {
    sim::RcScenario sc;
    sc.n_steps = 1;
    sc.unstirred_reflection = {0.1, 0.15, 0.12};
    const auto step = io::ensemble_step(sim::synth_rc_ensemble_mimo(0.9, 0.6, 0.8, sc, FrequencySweep::default_sweep()), 0);
    const auto text = io::write_touchstone(step, io::TouchstoneFormat::MA);
    for (auto _ : state) benchmark::DoNotOptimize(io::parse_touchstone(text, 3));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_TouchstoneParse);
BENCHMARK_MAIN();
