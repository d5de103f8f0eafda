#pragma once

#include <string_view>

#include "truthrl/verifier.hpp"

namespace truthrl {

enum class BaseReward { binary, ternary };
enum class ReasoningMode { off, multiplicative, additive, conditional };

std::string_view to_string(BaseReward b);
std::string_view to_string(ReasoningMode m);
BaseReward parse_base_reward(std::string_view s);
ReasoningMode parse_reasoning_mode(std::string_view s);

struct RewardScheme {
    BaseReward base = BaseReward::ternary;
    bool knowledge_enhanced = false;
    ReasoningMode reasoning = ReasoningMode::off;
    double lambda = 0.5;
    void validate() const;
};

double reward_binary(Label l);
double reward_ternary(Label l);
double reward_knowledge_enhanced(Label l, bool is_ook, BaseReward base);
double combine_reasoning(double r_outcome, bool r_reason, ReasoningMode strategy, double lambda);

// Full scheme; requires outcome.reasoning_ok when reasoning is enabled.
double compute_reward(const RewardScheme& scheme, const Outcome& outcome, bool is_ook);

}  // namespace truthrl
