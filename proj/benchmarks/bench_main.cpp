#include <benchmark/benchmark.h>

#include <random>

#include "mudt/config.hpp"
#include "mudt/mapgraph.hpp"
#include "mudt/predictors.hpp"
#include "mudt/reservation.hpp"
#include "mudt/simulation.hpp"
#include "mudt/trace.hpp"

using namespace mudt;

namespace {

FeaturePointSet random_set(std::mt19937_64& rng, int universe, double density) {
    std::bernoulli_distribution pick(density);
    std::vector<FeatureId> ids;
    for (int i = 0; i < universe; ++i)
        if (pick(rng)) ids.push_back(static_cast<FeatureId>(i));
    return FeaturePointSet(std::move(ids));
}

FrameTrace labeled_trace(int slots) {
    GeneratorConfig g;
    g.slot_count = slots;
    return label_key_frames(generate_trace(g), LabelingConfig{0.6, 0.1, 32}, g.frames_per_slot);
}

}  // namespace

static void BM_EvalG(benchmark::State& state) {
    const int F = static_cast<int>(state.range(0));
    const auto r = posterior_rates(0.9, 0.85, 0.2);
    for (auto _ : state)
        for (int n = 0; n <= F; ++n) benchmark::DoNotOptimize(eval_g(n, F, F / 3, r));
}
BENCHMARK(BM_EvalG)->Arg(10)->Arg(30)->Arg(100);

static void BM_FindNStar(benchmark::State& state) {
    const ConfusionStats s{0.9, 0.85, 0.2, 0.9};
    for (auto _ : state) benchmark::DoNotOptimize(find_n_star(10, 3, s, 0.9));
}
BENCHMARK(BM_FindNStar);

static void BM_Jaccard(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const auto a = random_set(rng, static_cast<int>(state.range(0)), 0.3);
    const auto b = random_set(rng, static_cast<int>(state.range(0)), 0.3);
    for (auto _ : state) benchmark::DoNotOptimize(jaccard(a, b));
}
BENCHMARK(BM_Jaccard)->Arg(200)->Arg(2000);

static void BM_BuildGraph(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::vector<Frame> frames;
    for (int i = 0; i < state.range(0); ++i) frames.push_back(Frame{static_cast<FrameId>(i), random_set(rng, 1000, 0.1), {}});
    for (auto _ : state) benchmark::DoNotOptimize(build_graph(frames));
}
BENCHMARK(BM_BuildGraph)->Arg(10)->Arg(32);

static void BM_LabelTrace(benchmark::State& state) {
    GeneratorConfig g;
    g.slot_count = 200;
    const auto raw = generate_trace(g);
    for (auto _ : state) benchmark::DoNotOptimize(label_key_frames(raw, LabelingConfig{0.6, 0.1, 32}, 10));
}
BENCHMARK(BM_LabelTrace)->Unit(benchmark::kMillisecond);

static void BM_SimulateSlots(benchmark::State& state) {
    SimConfig cfg;
    cfg.generator.slot_count = static_cast<int>(state.range(0));
    const auto prepared = prepare_trace(cfg);
    for (auto _ : state) benchmark::DoNotOptimize(run_simulation(cfg, prepared));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateSlots)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_PoissonBaseline(benchmark::State& state) {
    SimConfig cfg;
    cfg.generator.slot_count = 2000;
    const auto prepared = prepare_trace(cfg);
    for (auto _ : state) benchmark::DoNotOptimize(run_baseline(cfg, prepared, Method::poisson));
}
BENCHMARK(BM_PoissonBaseline)->Unit(benchmark::kMillisecond);

static void BM_LabeledTraceGeneration(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(labeled_trace(100));
}
BENCHMARK(BM_LabeledTraceGeneration)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
