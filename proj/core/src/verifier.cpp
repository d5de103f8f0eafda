#include "truthrl/verifier.hpp"

#include <cmath>

#include "truthrl/errors.hpp"

namespace truthrl {

std::string_view to_string(Label l) {
    switch (l) {
        case Label::correct: return "correct";
        case Label::uncertain: return "uncertain";
        case Label::hallucinated: return "hallucinated";
    }
    return "?";
}

double ReasoningProfile::probability(Label l) const {
    switch (l) {
        case Label::correct: return p_correct;
        case Label::uncertain: return p_uncertain;
        case Label::hallucinated: return p_hallucinated;
    }
    return 0.0;
}

void ReasoningProfile::validate() const {
    for (auto [v, name] : {std::pair{p_correct, "p_correct"}, {p_uncertain, "p_uncertain"},
                           {p_hallucinated, "p_hallucinated"}})
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(name, "must lie in [0, 1]");
}

Outcome judge_exact(const Episode& episode, int action) {
    if (action < 0 || action > episode.num_candidates) throw ContractError("action outside the action set");
    if (action == episode.num_candidates) return {Label::uncertain, {}};
    return {action == episode.realized_gold ? Label::correct : Label::hallucinated, {}};
}

Outcome judge_noisy_strict(const Episode& episode, int action, double phi, Rng& rng) {
    if (!(phi >= 0.0 && phi <= 1.0)) throw ValidationError("phi", "must lie in [0, 1]");
    Outcome o = judge_exact(episode, action);
    if (o.label == Label::correct && rng.uniform() < phi) o.label = Label::hallucinated;
    return o;
}

bool reasoning_score(const Outcome& outcome, const ReasoningProfile& profile, Rng& rng) {
    return rng.uniform() < profile.probability(outcome.label);
}

bool is_abstention_marker(std::string_view prediction) {
    return prediction == "I don't know" || prediction == "invalid question";
}

std::string_view to_string(VerifierKind k) {
    switch (k) {
        case VerifierKind::exact: return "exact";
        case VerifierKind::noisy_strict: return "noisy_strict";
        case VerifierKind::external: return "external";
    }
    return "?";
}

VerifierKind parse_verifier_kind(std::string_view s) {
    if (s == "exact") return VerifierKind::exact;
    if (s == "noisy_strict") return VerifierKind::noisy_strict;
    if (s == "external") return VerifierKind::external;
    throw ValidationError("verifier.kind", "unknown verifier '" + std::string(s) + "'");
}

void EndpointConfig::validate() const {
    if (host.empty()) throw ValidationError("host", "must be non-empty");
    if (port <= 0 || port > 65535) throw ValidationError("port", "out of range");
    if (max_attempts < 1) throw ValidationError("attempts", "must be >= 1");
    if (!(backoff_base_ms >= 0.0)) throw ValidationError("backoff_ms", "must be >= 0");
    if (max_in_flight < 1) throw ValidationError("max_in_flight", "must be >= 1");
    if (!(timeout_s > 0.0)) throw ValidationError("timeout_s", "must be > 0");
}

void VerifierConfig::validate() const {
    if (!(phi >= 0.0 && phi <= 1.0)) throw ValidationError("phi", "must lie in [0, 1]");
    if (kind == VerifierKind::external) endpoint.validate();
    if (reasoning) reasoning->validate();
}

std::string answer_text(const Question& q, int action) {
    if (action == q.abstain_action()) return "I don't know";
    if (q.qtype == QType::false_premise && action == q.num_candidates - 1) return "invalid question";
    return "candidate " + std::to_string(action);
}

Verifier::Verifier(VerifierConfig config) : config_(std::move(config)) {
    config_.validate();
    if (config_.kind == VerifierKind::external) client_ = std::make_shared<JudgeClient>(config_.endpoint);
}

Outcome Verifier::judge(const Question& q, const Episode& episode, int action, Rng& rng) const {
    Outcome o;
    switch (config_.kind) {
        case VerifierKind::exact: o = judge_exact(episode, action); break;
        case VerifierKind::noisy_strict: o = judge_noisy_strict(episode, action, config_.phi, rng); break;
        case VerifierKind::external: {
            if (action < 0 || action > q.num_candidates) throw ContractError("action outside the action set");
            JudgeRequest req;
            req.question = "question " + std::to_string(q.id);
            req.reference = answer_text(q, episode.realized_gold);
            req.prediction = answer_text(q, action);
            o = client_->judge(req);
            break;
        }
    }
    if (config_.reasoning) o.reasoning_ok = reasoning_score(o, *config_.reasoning, rng);
    return o;
}

}  // namespace truthrl
