#include "truthrl/reward.hpp"

#include <cmath>
#include <string>

#include "truthrl/errors.hpp"

namespace truthrl {

std::string_view to_string(BaseReward b) { return b == BaseReward::binary ? "binary" : "ternary"; }

std::string_view to_string(ReasoningMode m) {
    switch (m) {
        case ReasoningMode::off: return "off";
        case ReasoningMode::multiplicative: return "multiplicative";
        case ReasoningMode::additive: return "additive";
        case ReasoningMode::conditional: return "conditional";
    }
    return "?";
}

BaseReward parse_base_reward(std::string_view s) {
    if (s == "binary") return BaseReward::binary;
    if (s == "ternary") return BaseReward::ternary;
    throw ValidationError("reward.base", "unknown base reward '" + std::string(s) + "'");
}

ReasoningMode parse_reasoning_mode(std::string_view s) {
    if (s == "off") return ReasoningMode::off;
    if (s == "multiplicative") return ReasoningMode::multiplicative;
    if (s == "additive") return ReasoningMode::additive;
    if (s == "conditional") return ReasoningMode::conditional;
    throw ValidationError("reward.reasoning", "unknown strategy '" + std::string(s) + "'");
}

void RewardScheme::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("reward.lambda", "must be >= 0");
}

double reward_binary(Label l) { return l == Label::correct ? 1.0 : -1.0; }

double reward_ternary(Label l) {
    switch (l) {
        case Label::correct: return 1.0;
        case Label::uncertain: return 0.0;
        case Label::hallucinated: return -1.0;
    }
    return -1.0;
}

double reward_knowledge_enhanced(Label l, bool is_ook, BaseReward base) {
    if (is_ook) return l == Label::uncertain ? 1.0 : -1.0;
    return base == BaseReward::ternary ? reward_ternary(l) : reward_binary(l);
}

double combine_reasoning(double r_outcome, bool r_reason, ReasoningMode strategy, double lambda) {
    const double rr = r_reason ? 1.0 : 0.0;
    switch (strategy) {
        case ReasoningMode::off: throw ContractError("combine_reasoning called with strategy off");
        case ReasoningMode::multiplicative: return r_outcome * (1.0 + rr);
        case ReasoningMode::additive: return r_outcome + lambda * rr;
        case ReasoningMode::conditional: return r_outcome == 1.0 ? r_outcome * rr : r_outcome;
    }
    return r_outcome;
}

double compute_reward(const RewardScheme& scheme, const Outcome& outcome, bool is_ook) {
    double r = scheme.knowledge_enhanced ? reward_knowledge_enhanced(outcome.label, is_ook, scheme.base)
               : scheme.base == BaseReward::ternary ? reward_ternary(outcome.label)
                                                    : reward_binary(outcome.label);
    if (scheme.reasoning == ReasoningMode::off) return r;
    if (!outcome.reasoning_ok) throw ContractError("reasoning reward requires a reasoning profile on the verifier");
    return combine_reasoning(r, *outcome.reasoning_ok, scheme.reasoning, scheme.lambda);
}

}  // namespace truthrl
