#include <benchmark/benchmark.h>

#include "qslink/analytic.hpp"
#include "qslink/channel.hpp"
#include "qslink/simulator.hpp"
#include "qslink/variates.hpp"

using namespace qslink;

namespace {

const LinkModel& default_model() {
    static const LinkModel m = LinkModel::build(SystemConfig{});
    return m;
}

void bm_gamma_gamma_sample(benchmark::State& state) {
    RngStream rng(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(gg_sample(rng, 3.0, 2.0));
}
BENCHMARK(bm_gamma_gamma_sample);

void bm_normal_draw(benchmark::State& state) {
    RngStream rng(1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(rng.normal(1.0));
}
BENCHMARK(bm_normal_draw);

void bm_channel_realization(benchmark::State& state) {
    const LinkModel& m = default_model();
    RngStream rng(1, 2);
    for (auto _ : state) benchmark::DoNotOptimize(sample_channel(m, rng));
}
BENCHMARK(bm_channel_realization);

void bm_weight_tables(benchmark::State& state) {
    const LinkModel& m = default_model();
    for (auto _ : state)
        benchmark::DoNotOptimize(WeightTables::build(m, Vec2{0.05, -0.02}));
}
BENCHMARK(bm_weight_tables);

void bm_full_trial(benchmark::State& state) {
    const LinkModel& m = default_model();
    TrialWorkspace ws;
    std::uint64_t trial = 0;
    for (auto _ : state) {
        RngStream rng(99, trial++);
        benchmark::DoNotOptimize(run_trial(m, rng, ws));
    }
}
BENCHMARK(bm_full_trial);

void bm_signal_pmf_table(benchmark::State& state) {
    const LinkModel& m = default_model();
    const QuadratureSpec quad;
    for (auto _ : state) benchmark::DoNotOptimize(p_nsig_table(m, quad));
}
BENCHMARK(bm_signal_pmf_table);

void bm_outage_and_error_budget(benchmark::State& state) {
    const LinkModel& m = default_model();
    QuadratureSpec quad;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sync_error_variance(m, quad));
    }
}
BENCHMARK(bm_outage_and_error_budget);

} // namespace

BENCHMARK_MAIN();
