#include <benchmark/benchmark.h>

#include <mapn/explore.hpp>
#include <mapn/gen.hpp>
#include <mapn/oracle.hpp>
#include <mapn/unfold.hpp>

#include <map>
#include <memory>

namespace {

struct Case {
    mapn::Model model;
    mapn::UnfoldedGraph unfolded;
};

const Case& generatedCase(std::uint64_t variants, bool withEnergy) {
    static std::map<std::pair<std::uint64_t, bool>, std::unique_ptr<Case>> cache;
    auto& slot = cache[{variants, withEnergy}];
    if (!slot) {
        mapn::SyntheticSpec spec;
        spec.targetVariants = variants;
        spec.seed = 42;
        spec.withEnergy = withEnergy;
        auto c = std::make_unique<Case>();
        c->model = mapn::generateSynthetic(spec);
        c->unfolded = mapn::unfoldGraph(c->model.graph, c->model.metrics, c->model.annotations, c->model.rules);
        slot = std::move(c);
    }
    return *slot;
}

void BM_Explore(benchmark::State& state) {
    const Case& c = generatedCase(static_cast<std::uint64_t>(state.range(0)), false);
    std::size_t found = 0;
    for (auto _ : state) {
        auto vs = mapn::exploreGraph(c.unfolded.graph, c.model.metrics, c.unfolded.annotations, {});
        found = vs.size();
        benchmark::DoNotOptimize(vs);
    }
    state.counters["variants"] = static_cast<double>(found);
}

void BM_EnumerateEvaluate(benchmark::State& state) {
    const Case& c = generatedCase(static_cast<std::uint64_t>(state.range(0)), false);
    std::size_t found = 0;
    for (auto _ : state) {
        auto vs = mapn::evaluateAndRank(mapn::enumerateVariants(c.unfolded.graph).variants, c.unfolded.graph,
                                        c.model.metrics, c.unfolded.annotations, {});
        found = vs.size();
        benchmark::DoNotOptimize(vs);
    }
    state.counters["variants"] = static_cast<double>(found);
}

void BM_ExploreMetrics(benchmark::State& state) {
    const Case& c = generatedCase(768, true);
    mapn::MetricSet metrics;
    for (std::int64_t i = 0; i < state.range(0); ++i)
        metrics.add(c.model.metrics[static_cast<std::size_t>(i)]);
    for (auto _ : state)
        benchmark::DoNotOptimize(mapn::exploreGraph(c.unfolded.graph, metrics, c.unfolded.annotations, {}));
}

void BM_ExploreBeam(benchmark::State& state) {
    const Case& c = generatedCase(static_cast<std::uint64_t>(state.range(0)), false);
    mapn::ExplorationConfig cfg;
    cfg.mode = mapn::Mode::Beam;
    cfg.best = 5;
    for (auto _ : state)
        benchmark::DoNotOptimize(mapn::exploreGraph(c.unfolded.graph, c.model.metrics, c.unfolded.annotations, cfg));
}

} // namespace

BENCHMARK(BM_Explore)->RangeMultiplier(4)->Range(16, 4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateEvaluate)->RangeMultiplier(4)->Range(16, 4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExploreMetrics)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExploreBeam)->RangeMultiplier(4)->Range(16, 4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
