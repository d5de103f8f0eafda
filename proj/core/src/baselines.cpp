#include "truthrl/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "parallel.hpp"
#include "truthrl/errors.hpp"

namespace truthrl {

int LabelSet::count_present() const {
    return static_cast<int>(std::count_if(target.begin(), target.end(), [](int t) { return t != kAbsent; }));
}

std::string LabelSet::to_csv() const {
    std::string out = "question_id,target\n";
    for (std::size_t i = 0; i < target.size(); ++i)
        if (target[i] != kAbsent) out += std::to_string(i) + ',' + std::to_string(target[i]) + '\n';
    return out;
}

void SftConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ValidationError("sft.learning_rate", "must be > 0");
    if (epochs < 0) throw ValidationError("sft.epochs", "must be >= 0");
}

Policy train_sft(const QuestionBank& bank, const Policy& initial, const LabelSet& labels, const SftConfig& config) {
    config.validate();
    if (labels.size() != bank.size()) throw ShapeError("label set does not cover the bank");
    for (int q = 0; q < labels.size(); ++q) {
        int t = labels.target[static_cast<std::size_t>(q)];
        if (t != kAbsent && (t < 0 || t >= bank.at(q).num_actions()))
            throw ValidationError("target", "label outside the action set of question " + std::to_string(q));
    }
    Policy policy = initial;
    std::vector<double> p;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (int q = 0; q < labels.size(); ++q) {
            int t = labels.target[static_cast<std::size_t>(q)];
            if (t == kAbsent) continue;
            auto row = policy.row(q);
            p.resize(row.size());
            softmax(row, p);
            for (std::size_t j = 0; j < row.size(); ++j) row[j] -= config.learning_rate * p[j];
            row[static_cast<std::size_t>(t)] += config.learning_rate;
        }
    }
    return policy;
}

LabelSet gold_labels(const QuestionBank& bank) {
    LabelSet l;
    for (const auto& q : bank.questions()) l.target.push_back(q.gold_index);
    return l;
}

LabelSet build_rtuning_labels(const QuestionBank& bank, const OokReport& ook) {
    if (ook.size() != bank.size()) throw ShapeError("OOK report does not cover the bank");
    LabelSet l;
    for (const auto& q : bank.questions())
        l.target.push_back(ook.is_ook[static_cast<std::size_t>(q.id)] ? q.abstain_action() : q.gold_index);
    return l;
}

void RftConfig::validate() const {
    if (samples < 1) throw ValidationError("rft.samples", "must be >= 1");
    if (!(temperature > 0.0)) throw ValidationError("rft.temperature", "must be > 0");
}

LabelSet build_rft_labels(const Policy& policy, const QuestionBank& bank, const OokReport& ook, const RftConfig& config,
                          Mode mode, const Verifier& verifier, std::uint64_t seed) {
    config.validate();
    if (ook.size() != bank.size()) throw ShapeError("OOK report does not cover the bank");
    LabelSet l;
    l.target.assign(static_cast<std::size_t>(bank.size()), kAbsent);
    std::vector<double> p;
    for (const auto& q : bank.questions()) {
        auto row = policy.row(q.id);
        p.resize(row.size());
        softmax(row, p, 1.0 / config.temperature);
        Rng rng = derive_stream(seed, {tag("rft"), static_cast<std::uint64_t>(q.id)});
        const bool flagged = ook.is_ook[static_cast<std::size_t>(q.id)];
        int& target = l.target[static_cast<std::size_t>(q.id)];
        for (int s = 0; s < config.samples; ++s) {
            int a = sample_index(p, rng);
            Episode e = realize_episode(q, mode, rng);
            Label lab = verifier.judge(q, e, a, rng).label;
            if (target != kAbsent) continue;  // keep the draw pattern fixed
            if (flagged ? a == q.abstain_action() : lab == Label::correct) target = a;
        }
    }
    return l;
}

std::string pairs_to_csv(const std::vector<PreferencePair>& pairs) {
    std::string out = "question_id,winner,loser\n";
    for (const auto& p : pairs)
        out += std::to_string(p.question_id) + ',' + std::to_string(p.winner) + ',' + std::to_string(p.loser) + '\n';
    return out;
}

std::vector<PreferencePair> build_preference_pairs(const QuestionBank& bank, const OokReport& ook, std::uint64_t seed) {
    if (ook.size() != bank.size()) throw ShapeError("OOK report does not cover the bank");
    std::vector<PreferencePair> pairs;
    pairs.reserve(static_cast<std::size_t>(bank.size()));
    for (const auto& q : bank.questions()) {
        if (q.num_candidates < 2) throw ValidationError("K", "need at least 2 candidates to form a loser");
        Rng rng = derive_stream(seed, {tag("pair"), static_cast<std::uint64_t>(q.id)});
        const int K = q.num_candidates;
        int loser = (q.gold_index + 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(K - 1)))) % K;
        int winner = ook.is_ook[static_cast<std::size_t>(q.id)] ? q.abstain_action() : q.gold_index;
        pairs.push_back({q.id, winner, loser});
    }
    return pairs;
}

DpoLoss dpo_gradient(const Policy& policy, const PolicySnapshot& ref, const PreferencePair& pair, double beta) {
    policy.require_same_shape(ref.policy());
    const int q = pair.question_id;
    auto row = policy.row(q);
    const int n = static_cast<int>(row.size());
    if (pair.winner == pair.loser || pair.winner < 0 || pair.loser < 0 || pair.winner >= n || pair.loser >= n)
        throw ValidationError("pair", "winner and loser must be distinct actions of question " + std::to_string(q));
    std::vector<double> lp(row.size()), lr(row.size());
    log_softmax(row, lp);
    log_softmax(ref.row(q), lr);
    auto w = static_cast<std::size_t>(pair.winner);
    auto l = static_cast<std::size_t>(pair.loser);
    // The log-partition terms cancel in the margin.
    double z = beta * ((lp[w] - lr[w]) - (lp[l] - lr[l]));
    DpoLoss out;
    // -log sigmoid(z) = log1p(exp(-z)), evaluated stably on both sides.
    out.loss = z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    double one_minus_sigma = z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
    out.gradient.assign(row.size(), 0.0);
    out.gradient[w] = -beta * one_minus_sigma;
    out.gradient[l] = beta * one_minus_sigma;
    return out;
}

std::string_view to_string(DpoReference r) { return r == DpoReference::reset ? "reset" : "global"; }

DpoReference parse_dpo_reference(std::string_view s) {
    if (s == "reset") return DpoReference::reset;
    if (s == "global") return DpoReference::global;
    throw ValidationError("dpo.reference", "expected reset or global, got '" + std::string(s) + "'");
}

void DpoConfig::validate() const {
    if (!(beta > 0.0)) throw ValidationError("dpo.beta", "must be > 0");
    if (!(learning_rate > 0.0)) throw ValidationError("dpo.learning_rate", "must be > 0");
    if (epochs < 0) throw ValidationError("dpo.epochs", "must be >= 0");
}

Policy train_dpo(const QuestionBank& bank, const Policy& initial, const PolicySnapshot& ref, const DpoConfig& config,
                 const std::vector<PreferencePair>& pairs) {
    config.validate();
    if (initial.num_questions() != bank.size()) throw ShapeError("policy does not cover the bank");
    Policy policy = initial;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (const auto& pair : pairs) {
            auto g = dpo_gradient(policy, ref, pair, config.beta);
            auto row = policy.row(pair.question_id);
            row[static_cast<std::size_t>(pair.winner)] -= config.learning_rate * g.gradient[static_cast<std::size_t>(pair.winner)];
            row[static_cast<std::size_t>(pair.loser)] -= config.learning_rate * g.gradient[static_cast<std::size_t>(pair.loser)];
        }
    }
    return policy;
}

std::vector<DpoIteration> iterate_dpo(const QuestionBank& bank, const Policy& initial, const DpoConfig& config,
                                      int iterations, Mode probe_mode, int probe_samples, const Verifier& verifier,
                                      std::uint64_t probe_seed, int workers) {
    config.validate();
    if (iterations < 1) throw ValidationError("dpo.iterations", "must be >= 1");
    std::vector<DpoIteration> out;
    const auto global_ref = snapshot(initial, SnapshotTag::reference);
    Policy current = initial;
    for (int it = 1; it <= iterations; ++it) {
        auto u = static_cast<std::uint64_t>(it);
        OokReport ook = probe_ook(current, bank, probe_samples, probe_mode, verifier,
                                  derive_seed(probe_seed, {tag("dpo-iteration"), u}), workers);
        auto pairs = build_preference_pairs(bank, ook, derive_seed(config.seed, {tag("dpo-pairs"), u}));
        auto ref = config.reference == DpoReference::reset ? snapshot(current, SnapshotTag::reference) : global_ref;
        double loss0 = 0.0;
        for (const auto& p : pairs) loss0 += dpo_gradient(current, ref, p, config.beta).loss;
        if (!pairs.empty()) loss0 /= static_cast<double>(pairs.size());
        current = train_dpo(bank, current, ref, config, pairs);
        out.push_back({current, std::move(ook), std::move(pairs), loss0});
    }
    return out;
}

}  // namespace truthrl
