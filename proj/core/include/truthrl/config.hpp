#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "truthrl/baselines.hpp"
#include "truthrl/grpo.hpp"
#include "truthrl/metrics.hpp"
#include "truthrl/policy.hpp"
#include "truthrl/reward.hpp"
#include "truthrl/verifier.hpp"
#include "truthrl/world.hpp"

namespace truthrl {

enum class Method { prompting, sft, rft, rtuning, dpo, iterative_dpo, truthrl_binary, truthrl_ternary };
std::string_view to_string(Method m);
Method parse_method(std::string_view s);

enum class EvalJudge { exact, training };

struct Seeds {
    std::uint64_t bank = 0;
    std::uint64_t train = 0;
    std::uint64_t probe = 0;
    std::uint64_t eval = 0;
};

struct ExperimentConfig {
    Method method = Method::truthrl_ternary;
    Mode mode = Mode::no_retrieval;
    int workers = 1;

    std::string bank_path;  // when set, replaces the generated bank
    BankSpec bank{150, 0, 0, 256, 256, {{0.0, 1.0 / 3}, {0.5, 1.0 / 3}, {1.0, 1.0 / 3}}, 0.6, 0};
    BasePrior prior;

    RewardScheme reward;
    ReasoningProfile reasoning;
    GrpoConfig grpo;
    SftConfig sft;

    int probe_samples = 256;
    Mode probe_mode = Mode::no_retrieval;

    RftConfig rft;
    DpoConfig dpo;
    int dpo_iterations = 4;

    VerifierConfig verifier;

    Weights weights;
    EvalJudge eval_judge = EvalJudge::exact;
    std::vector<double> confidence_edges{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};

    std::vector<int> majority_k;
    MajorityRule majority_rule = MajorityRule::abstain_vote;
    bool majority_shared_episodes = false;

    Seeds seeds;

    // Keys that appeared in the source text or were set by override.
    std::set<std::string> explicit_keys;

    bool needs_probe() const;
    bool is_grpo() const { return method == Method::truthrl_binary || method == Method::truthrl_ternary; }
    VerifierConfig training_verifier() const;
};

// Strict sectioned key-value parser. Throws ConfigError with line numbers.
ExperimentConfig parse_config(std::string_view text);

// Sets one dotted key (e.g. "grpo.epsilon") and re-validates.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

// Canonical text that parses back to the same configuration.
std::string resolved_config(const ExperimentConfig& config);

std::vector<std::string> known_config_keys();

}  // namespace truthrl
