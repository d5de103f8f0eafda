#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "truthrl/rng.hpp"
#include "truthrl/world.hpp"

namespace truthrl {

// Per-question logit rows; row q has K_q + 1 entries, the last being ABSTAIN.
class Policy {
public:
    Policy() = default;
    explicit Policy(const QuestionBank& bank);
    Policy(std::uint64_t bank_fingerprint, const std::vector<int>& row_widths);

    int num_questions() const { return static_cast<int>(offsets_.size()) - 1; }
    int num_actions(int q) const;
    int abstain_action(int q) const { return num_actions(q) - 1; }
    std::uint64_t bank_fingerprint() const { return fingerprint_; }

    std::span<double> row(int q);
    std::span<const double> row(int q) const;

    bool same_shape(const Policy& other) const;
    void require_same_shape(const Policy& other) const;

    std::string serialize() const;
    static Policy deserialize(std::string_view text);

    friend bool operator==(const Policy&, const Policy&) = default;

private:
    void check(int q) const;

    std::uint64_t fingerprint_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<double> logits_;
};

enum class SnapshotTag { old, reference };

class PolicySnapshot {
public:
    PolicySnapshot(std::shared_ptr<const Policy> p, SnapshotTag tag) : policy_(std::move(p)), tag_(tag) {}
    const Policy& policy() const { return *policy_; }
    SnapshotTag tag() const { return tag_; }
    std::span<const double> row(int q) const { return policy_->row(q); }

private:
    std::shared_ptr<const Policy> policy_;
    SnapshotTag tag_;
};

PolicySnapshot snapshot(const Policy& policy, SnapshotTag tag);

struct ActionSample {
    int action = 0;
    double log_probability = 0.0;
};

// Max-subtracted softmax of logits * inv_temperature.
void softmax(std::span<const double> logits, std::span<double> out, double inv_temperature = 1.0);
void log_softmax(std::span<const double> logits, std::span<double> out);
std::vector<double> action_distribution(const Policy& policy, int q);

// Inverse CDF in action order; one draw.
int sample_index(std::span<const double> probs, Rng& rng);
ActionSample sample_action(const Policy& policy, int q, Rng& rng);

int argmax_lowest(std::span<const double> values);
int greedy_action(const Policy& policy, int q);

double kl_divergence(std::span<const double> logits_p, std::span<const double> logits_q);
double kl_divergence(const Policy& policy, const PolicySnapshot& snap, int q);

// Untrained-model stand-in. Each row gets N(0, noise) logits; background
// candidates sit background_shift below the three salient actions: gold
// (+gold_bias * eff), one confabulated candidate (+confab_bias * (1 - eff)),
// and ABSTAIN (+abstain_bias), where eff is the effective knowability.
struct BasePrior {
    double gold_bias = 6.0;
    double confab_bias = 3.7;
    double abstain_bias = 3.5;
    double background_shift = 2.0;
    double noise = 1.0;
    void validate() const;
};

Policy make_base_policy(const QuestionBank& bank, const BasePrior& prior, Mode mode, std::uint64_t seed);

}  // namespace truthrl
