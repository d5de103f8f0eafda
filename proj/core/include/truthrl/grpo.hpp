#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "truthrl/errors.hpp"
#include "truthrl/policy.hpp"
#include "truthrl/reward.hpp"
#include "truthrl/verifier.hpp"
#include "truthrl/world.hpp"

namespace truthrl {

enum class ReferencePolicy { initial, old };
std::string_view to_string(ReferencePolicy r);
ReferencePolicy parse_reference_policy(std::string_view s);

struct GrpoConfig {
    int group_size = 8;
    double epsilon = 0.2;
    double beta = 0.001;
    double learning_rate = 0.5;  // tabular rate; transformer-scale rates (1e-6) do not move logits
    int steps = 2000;
    int batch_size = 64;
    int inner_epochs = 1;
    double std_guard = 1e-8;
    bool population_std = true;
    ReferencePolicy reference = ReferencePolicy::initial;
    int checkpoint_every = 0;
    int workers = 1;
    std::uint64_t seed = 0;
    void validate() const;
};

struct RolloutSample {
    int action = 0;
    double log_prob_old = 0.0;
    Episode episode;
    Outcome outcome;
    double reward = 0.0;
    double advantage = 0.0;
};

struct GroupRollout {
    int question_id = 0;
    std::vector<RolloutSample> samples;
};

std::vector<double> group_advantages(std::span<const double> rewards, double std_guard = 1e-8,
                                     bool population_std = true);

GroupRollout rollout_group(const PolicySnapshot& old_policy, const Question& q, int group_size, Mode mode,
                           const Verifier& verifier, const RewardScheme& scheme, bool is_ook, Rng& rng,
                           double std_guard = 1e-8, bool population_std = true);

// Maximization objective for one question's group.
double surrogate_value(const Policy& policy, const PolicySnapshot& old_policy, const PolicySnapshot& ref_policy,
                       const GroupRollout& group, double epsilon, double beta);
std::vector<double> surrogate_gradient(const Policy& policy, const PolicySnapshot& old_policy,
                                       const PolicySnapshot& ref_policy, const GroupRollout& group, double epsilon,
                                       double beta);

struct TraceRecord {
    int step = 0;
    double mean_reward = 0.0;
    double acc = 0.0;
    double unc = 0.0;
    double hall = 0.0;
    double mean_kl = 0.0;
    double grad_norm = 0.0;
};

struct TraceLog {
    std::vector<TraceRecord> records;
    std::string to_csv() const;
};

struct TrainResult {
    Policy policy;
    TraceLog trace;
};

// Raised when a rollout fails mid-training; carries the trace so far.
class TrainingAborted : public Error {
public:
    TrainingAborted(const std::string& message, TraceLog partial, std::exception_ptr cause)
        : Error(message), partial_(std::move(partial)), cause_(std::move(cause)) {}
    const TraceLog& partial_trace() const { return partial_; }
    std::exception_ptr cause() const { return cause_; }

private:
    TraceLog partial_;
    std::exception_ptr cause_;
};

using CheckpointSink = std::function<void(int step, const Policy& policy)>;

// Per-question OOK flags are consulted only by knowledge-enhanced rewards.
TrainResult train(const QuestionBank& bank, const Policy& initial, const GrpoConfig& config,
                  const RewardScheme& scheme, const Verifier& verifier, Mode mode,
                  const std::vector<bool>* ook = nullptr, const CheckpointSink& on_checkpoint = {});

// Batch of min(batch_size, n) distinct question ids in increasing order.
std::vector<int> select_batch(int num_questions, int batch_size, Rng& rng);

}  // namespace truthrl
