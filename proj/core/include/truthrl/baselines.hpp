#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "truthrl/policy.hpp"
#include "truthrl/probe.hpp"
#include "truthrl/verifier.hpp"
#include "truthrl/world.hpp"

namespace truthrl {

inline constexpr int kAbsent = -1;

// One target action per question, or kAbsent.
struct LabelSet {
    std::vector<int> target;

    int size() const { return static_cast<int>(target.size()); }
    int count_present() const;
    std::string to_csv() const;  // absent questions are omitted
};

struct SftConfig {
    double learning_rate = 0.5;
    int epochs = 50;
    void validate() const;
};

Policy train_sft(const QuestionBank& bank, const Policy& initial, const LabelSet& labels, const SftConfig& config);

LabelSet gold_labels(const QuestionBank& bank);
LabelSet build_rtuning_labels(const QuestionBank& bank, const OokReport& ook);

struct RftConfig {
    int samples = 64;
    double temperature = 0.6;
    void validate() const;
};

LabelSet build_rft_labels(const Policy& policy, const QuestionBank& bank, const OokReport& ook, const RftConfig& config,
                          Mode mode, const Verifier& verifier, std::uint64_t seed);

struct PreferencePair {
    int question_id = 0;
    int winner = 0;
    int loser = 0;
    friend bool operator==(const PreferencePair&, const PreferencePair&) = default;
};

std::string pairs_to_csv(const std::vector<PreferencePair>& pairs);

// Loser is a uniformly drawn non-gold candidate (one draw per question).
std::vector<PreferencePair> build_preference_pairs(const QuestionBank& bank, const OokReport& ook, std::uint64_t seed);

struct DpoLoss {
    double loss = 0.0;
    std::vector<double> gradient;  // d loss / d logits
};

DpoLoss dpo_gradient(const Policy& policy, const PolicySnapshot& ref, const PreferencePair& pair, double beta);

enum class DpoReference { reset, global };
std::string_view to_string(DpoReference r);
DpoReference parse_dpo_reference(std::string_view s);

struct DpoConfig {
    double beta = 0.1;
    double learning_rate = 5.0;
    int epochs = 20;
    DpoReference reference = DpoReference::reset;
    std::uint64_t seed = 0;
    void validate() const;
};

// Gradient descent on the pair losses with ref frozen.
Policy train_dpo(const QuestionBank& bank, const Policy& initial, const PolicySnapshot& ref, const DpoConfig& config,
                 const std::vector<PreferencePair>& pairs);

struct DpoIteration {
    Policy policy;
    OokReport ook;
    std::vector<PreferencePair> pairs;
    double initial_loss = 0.0;  // mean pair loss before the first update
};

// Iteration i probes the current policy (seed derived from probe_seed and i),
// rebuilds pairs, and trains; iteration 1 is plain DPO from `initial`.
std::vector<DpoIteration> iterate_dpo(const QuestionBank& bank, const Policy& initial, const DpoConfig& config,
                                      int iterations, Mode probe_mode, int probe_samples, const Verifier& verifier,
                                      std::uint64_t probe_seed, int workers = 1);

}  // namespace truthrl
