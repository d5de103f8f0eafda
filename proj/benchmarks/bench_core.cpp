#include <benchmark/benchmark.h>

#include "truthrl/grpo.hpp"
#include "truthrl/metrics.hpp"
#include "truthrl/policy.hpp"
#include "truthrl/reward.hpp"
#include "truthrl/verifier.hpp"
#include "truthrl/world.hpp"

namespace {

using namespace truthrl;

// Mixed bank with K candidates per question.
QuestionBank mixed_bank(int n, int k) {
    BankSpec spec;
    spec.simple = n;
    spec.k_min = k;
    spec.k_max = k;
    spec.kappa_mix = {{0.0, 1.0 / 3}, {0.5, 1.0 / 3}, {1.0, 1.0 / 3}};
    spec.rho = 0.6;
    spec.seed = 1;
    return generate_bank(spec);
}

void BM_SampleAction(benchmark::State& state) {
    auto bank = mixed_bank(1, static_cast<int>(state.range(0)));
    auto policy = make_base_policy(bank, BasePrior{}, Mode::no_retrieval, 2);
    Rng rng(3);
    for (auto _ : state) benchmark::DoNotOptimize(sample_action(policy, 0, rng));
}
BENCHMARK(BM_SampleAction)->Arg(4)->Arg(256)->Arg(1024);

void BM_RolloutGroup(benchmark::State& state) {
    auto bank = mixed_bank(1, static_cast<int>(state.range(0)));
    auto policy = make_base_policy(bank, BasePrior{}, Mode::no_retrieval, 2);
    auto old = snapshot(policy, SnapshotTag::old);
    Verifier verifier;
    RewardScheme scheme;
    Rng rng(4);
    for (auto _ : state)
        benchmark::DoNotOptimize(rollout_group(old, bank.at(0), 8, Mode::no_retrieval, verifier, scheme, false, rng));
}
BENCHMARK(BM_RolloutGroup)->Arg(4)->Arg(256)->Arg(1024);

void BM_SurrogateGradient(benchmark::State& state) {
    auto bank = mixed_bank(1, static_cast<int>(state.range(0)));
    auto policy = make_base_policy(bank, BasePrior{}, Mode::no_retrieval, 2);
    auto old = snapshot(policy, SnapshotTag::old);
    auto ref = snapshot(policy, SnapshotTag::reference);
    Rng rng(5);
    auto group = rollout_group(old, bank.at(0), 8, Mode::no_retrieval, Verifier(), RewardScheme{}, false, rng);
    for (auto _ : state) benchmark::DoNotOptimize(surrogate_gradient(policy, old, ref, group, 0.2, 0.001));
}
BENCHMARK(BM_SurrogateGradient)->Arg(4)->Arg(256)->Arg(1024);

// 100 GRPO steps on the 150-question mixed bank.
void BM_TrainSteps(benchmark::State& state) {
    auto bank = mixed_bank(150, static_cast<int>(state.range(0)));
    auto initial = make_base_policy(bank, BasePrior{}, Mode::no_retrieval, 2);
    GrpoConfig cfg;
    cfg.steps = 100;
    cfg.seed = 6;
    for (auto _ : state)
        benchmark::DoNotOptimize(train(bank, initial, cfg, RewardScheme{}, Verifier(), Mode::no_retrieval));
    state.SetItemsProcessed(state.iterations() * cfg.steps);
}
BENCHMARK(BM_TrainSteps)->Arg(4)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
    auto bank = mixed_bank(150, static_cast<int>(state.range(0)));
    auto policy = make_base_policy(bank, BasePrior{}, Mode::no_retrieval, 2);
    Verifier verifier;
    for (auto _ : state)
        benchmark::DoNotOptimize(evaluate(policy, bank, Mode::no_retrieval, verifier, Weights{}, 7));
}
BENCHMARK(BM_Evaluate)->Arg(4)->Arg(256);

void BM_MajorityAtK(benchmark::State& state) {
    auto bank = mixed_bank(150, 256);
    auto policy = make_base_policy(bank, BasePrior{}, Mode::no_retrieval, 2);
    Verifier verifier;
    const int k = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(majority_at_k(policy, bank, k, Mode::no_retrieval, verifier, Weights{}, 8));
}
BENCHMARK(BM_MajorityAtK)->Arg(1)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
