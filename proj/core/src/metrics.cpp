#include "truthrl/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "truthrl/csv.hpp"
#include "truthrl/errors.hpp"

namespace truthrl {

void Weights::validate() const {
    for (auto [v, name] : {std::pair{w1, "w1"}, {w2, "w2"}, {w3, "w3"}})
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(name, "weights must be non-negative");
}

double truthfulness(double acc, double unc, double hall, const Weights& w) {
    w.validate();
    return w.w1 * acc + w.w2 * unc - w.w3 * hall;
}

void Tally::add(Label l) {
    switch (l) {
        case Label::correct: ++correct; break;
        case Label::uncertain: ++uncertain; break;
        case Label::hallucinated: ++hallucinated; break;
    }
}

Tally& Tally::operator+=(const Tally& o) {
    correct += o.correct;
    uncertain += o.uncertain;
    hallucinated += o.hallucinated;
    return *this;
}

Scoreboard make_scoreboard(const Tally& t, const Weights& w) {
    Scoreboard s;
    s.tally = t;
    s.n = t.n();
    if (s.n > 0) {
        double n = static_cast<double>(s.n);
        s.acc = static_cast<double>(t.correct) / n;
        s.unc = static_cast<double>(t.uncertain) / n;
        s.hall = static_cast<double>(t.hallucinated) / n;
    }
    s.truthfulness = truthfulness(s.acc, s.unc, s.hall, w);
    return s;
}

std::string kappa_band(double kappa) {
    const auto& e = kKappaBandEdges;
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        bool last = i + 2 == e.size();
        if (kappa >= e[i] && (kappa < e[i + 1] || (last && kappa <= e[i + 1])))
            return "[" + csv::format_double(e[i]) + "," + csv::format_double(e[i + 1]) + (last ? "]" : ")");
    }
    throw ValidationError("kappa", "outside [0, 1]");
}

void ScoreboardBuilder::add(const Question& q, Label l) {
    all_.add(l);
    slices_["qtype:" + std::string(to_string(q.qtype))].add(l);
    slices_["kappa:" + kappa_band(q.kappa)].add(l);
}

Scoreboard ScoreboardBuilder::build() const {
    Scoreboard s = make_scoreboard(all_, w_);
    for (const auto& [k, t] : slices_) s.slices.emplace(k, make_scoreboard(t, w_));
    return s;
}

namespace {

Rng eval_stream(std::uint64_t seed, int q) { return derive_stream(seed, {tag("eval"), static_cast<std::uint64_t>(q)}); }

}  // namespace

Scoreboard evaluate(const Policy& policy, const QuestionBank& bank, Mode mode, const Verifier& verifier,
                    const Weights& weights, std::uint64_t eval_seed) {
    weights.validate();
    if (policy.num_questions() != bank.size()) throw ShapeError("policy does not cover the bank");
    ScoreboardBuilder b(weights);
    for (const auto& q : bank.questions()) {
        Rng rng = eval_stream(eval_seed, q.id);
        Episode e = realize_episode(q, mode, rng);
        b.add(q, verifier.judge(q, e, greedy_action(policy, q.id), rng).label);
    }
    return b.build();
}

std::string_view to_string(MajorityRule r) {
    switch (r) {
        case MajorityRule::plurality: return "plurality";
        case MajorityRule::abstain_excluded: return "abstain_excluded";
        case MajorityRule::abstain_floor: return "abstain_floor";
        case MajorityRule::abstain_vote: return "abstain_vote";
    }
    return "?";
}

MajorityRule parse_majority_rule(std::string_view s) {
    if (s == "plurality") return MajorityRule::plurality;
    if (s == "abstain_excluded") return MajorityRule::abstain_excluded;
    if (s == "abstain_floor") return MajorityRule::abstain_floor;
    if (s == "abstain_vote") return MajorityRule::abstain_vote;
    throw ValidationError("majority.rule", "unknown rule '" + std::string(s) + "'");
}

int aggregate_votes(std::span<const int> counts, MajorityRule rule) {
    const int abstain = static_cast<int>(counts.size()) - 1;
    int k = 0;
    for (int c : counts) k += c;
    int best = 0;
    for (int a = 1; a < abstain; ++a)
        if (counts[static_cast<std::size_t>(a)] > counts[static_cast<std::size_t>(best)]) best = a;
    const int best_votes = counts[static_cast<std::size_t>(best)];
    switch (rule) {
        case MajorityRule::plurality:
            if (2 * counts[static_cast<std::size_t>(abstain)] > k) return abstain;
            return best;
        case MajorityRule::abstain_excluded: return best_votes > 0 ? best : abstain;
        case MajorityRule::abstain_floor: return 2 * best_votes > k ? best : abstain;
        case MajorityRule::abstain_vote: return best_votes > counts[static_cast<std::size_t>(abstain)] ? best : abstain;
    }
    return abstain;
}

Scoreboard majority_at_k(const Policy& policy, const QuestionBank& bank, int k, Mode mode, const Verifier& verifier,
                         const Weights& weights, std::uint64_t seed, MajorityRule rule, bool shared_episodes) {
    if (k < 1) throw ValidationError("majority.k", "must be >= 1");
    weights.validate();
    if (policy.num_questions() != bank.size()) throw ShapeError("policy does not cover the bank");
    ScoreboardBuilder b(weights);
    std::vector<double> p;
    std::vector<int> counts;
    const auto ku = static_cast<std::uint64_t>(k);
    for (const auto& q : bank.questions()) {
        const auto id = static_cast<std::uint64_t>(q.id);
        p = action_distribution(policy, q.id);
        counts.assign(p.size(), 0);
        Rng votes = derive_stream(seed, {tag("majority-votes"), ku, id});
        for (int i = 0; i < k; ++i) ++counts[static_cast<std::size_t>(sample_index(p, votes))];
        int action = aggregate_votes(counts, rule);
        Rng judge_rng = shared_episodes ? derive_stream(seed, {tag("majority-episode"), id})
                                        : derive_stream(seed, {tag("majority-episode"), ku, id});
        Episode e = realize_episode(q, mode, judge_rng);
        b.add(q, verifier.judge(q, e, action, judge_rng).label);
    }
    return b.build();
}

std::vector<ConfidenceBin> confidence_bins(const Policy& policy, const QuestionBank& bank, Mode mode,
                                           const Verifier& verifier, const Weights& weights,
                                           const std::vector<double>& edges, std::uint64_t eval_seed) {
    if (edges.size() < 2 || edges.front() != 0.0 || edges.back() != 1.0)
        throw ValidationError("edges", "must span [0, 1]");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1])) throw ValidationError("edges", "must be strictly increasing");
    weights.validate();
    if (policy.num_questions() != bank.size()) throw ShapeError("policy does not cover the bank");
    const std::size_t nb = edges.size() - 1;
    std::vector<ScoreboardBuilder> builders(nb, ScoreboardBuilder(weights));
    for (const auto& q : bank.questions()) {
        auto p = action_distribution(policy, q.id);
        int a = greedy_action(policy, q.id);
        double conf = p[static_cast<std::size_t>(a)];
        auto it = std::upper_bound(edges.begin(), edges.end(), conf);
        std::size_t bin = std::min(static_cast<std::size_t>(it - edges.begin()) - 1, nb - 1);
        Rng rng = eval_stream(eval_seed, q.id);
        Episode e = realize_episode(q, mode, rng);
        builders[bin].add(q, verifier.judge(q, e, a, rng).label);
    }
    std::vector<ConfidenceBin> out;
    for (std::size_t i = 0; i < nb; ++i) out.push_back({edges[i], edges[i + 1], builders[i].build()});
    return out;
}

std::vector<BreakdownRow> breakdown(const Scoreboard& board, std::string_view key) {
    if (key != "qtype" && key != "kappa") throw LookupError("unknown breakdown key '" + std::string(key) + "'");
    std::string prefix = std::string(key) + ":";
    std::vector<BreakdownRow> rows;
    for (const auto& [k, s] : board.slices)
        if (k.rfind(prefix, 0) == 0)
            rows.push_back({k.substr(prefix.size()), s.acc, s.unc, s.hall, s.truthfulness, s.n});
    return rows;
}

std::string scoreboard_row(std::string_view label, std::string_view k_or_bin, const Scoreboard& board) {
    std::string out = csv::quote(label);
    out += ',';
    out += csv::quote(k_or_bin);
    for (double v : {board.acc, board.unc, board.hall, board.truthfulness}) {
        out += ',';
        out += csv::format_double(v);
    }
    out += ',';
    out += std::to_string(board.n);
    out += '\n';
    return out;
}

}  // namespace truthrl
