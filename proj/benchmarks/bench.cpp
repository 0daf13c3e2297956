#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "clusterfx/analysis.hpp"
#include "clusterfx/covariance.hpp"
#include "clusterfx/ranks.hpp"
#include "clusterfx/sim.hpp"

using namespace clusterfx;

namespace {

std::vector<double> random_values(std::size_t n) {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> val(-50, 50);
    std::vector<double> v(n);
    for (double& x : v) x = val(rng);
    return v;
}

StudyData synthetic_study(int n_complete, int n_incomplete) {
    SimulationConfig cfg;
    cfg.num_groups = 3;
    cfg.n_complete = n_complete;
    cfg.n_pre = n_incomplete;
    cfg.n_post = n_incomplete;
    cfg.max_cluster_size = 3;
    cfg.seed = 7;
    Rng rng = Rng::substream(cfg.seed, 0);
    return gen_study(cfg, rng);
}

void BM_Midranks(benchmark::State& state) {
    const auto values = random_values(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(midranks(values));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Midranks)->Range(1 << 10, 1 << 16)->Complexity(benchmark::oNLogN);

void BM_PairwiseEffects(benchmark::State& state) {
    const StudyData d = synthetic_study(static_cast<int>(state.range(0)),
                                        static_cast<int>(state.range(0)) / 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pairwise_w(d));
    }
}
BENCHMARK(BM_PairwiseEffects)->Arg(5)->Arg(20)->Arg(80);

void BM_CovarianceAssembly(benchmark::State& state) {
    const StudyData d = synthetic_study(static_cast<int>(state.range(0)),
                                        static_cast<int>(state.range(0)) / 2);
    const PairwiseEffects w = pairwise_w(d);
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_covariance(d, w));
    }
}
BENCHMARK(BM_CovarianceAssembly)->Arg(5)->Arg(20)->Arg(80);

void BM_Analyze(benchmark::State& state) {
    const StudyData d = synthetic_study(10, 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(analyze(d));
    }
}
BENCHMARK(BM_Analyze);

void BM_SimReplication(benchmark::State& state) {
    SimulationConfig cfg;
    cfg.n_complete = 5;
    cfg.n_pre = 10;
    cfg.n_post = 5;
    cfg.runs = 1;
    std::uint64_t rep = 0;
    for (auto _ : state) {
        Rng rng = Rng::substream(cfg.seed, rep++);
        const StudyData d = gen_study(cfg, rng);
        const PairwiseEffects w = pairwise_w(d);
        const EffectEstimate est = estimate_p(d, w);
        benchmark::DoNotOptimize(estimate_covariance(d, w));
        benchmark::DoNotOptimize(est);
    }
}
BENCHMARK(BM_SimReplication);

}  // namespace

BENCHMARK_MAIN();
