#include "truthrl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "truthrl/csv.hpp"
#include "truthrl/errors.hpp"

namespace truthrl {

namespace {
constexpr std::string_view kMagic = "truthrl-policy 1";
}

Policy::Policy(const QuestionBank& bank) : fingerprint_(bank.fingerprint()) {
    offsets_.reserve(static_cast<std::size_t>(bank.size()) + 1);
    for (const auto& q : bank.questions()) offsets_.push_back(offsets_.back() + static_cast<std::size_t>(q.num_actions()));
    logits_.assign(offsets_.back(), 0.0);
}

Policy::Policy(std::uint64_t bank_fingerprint, const std::vector<int>& row_widths) : fingerprint_(bank_fingerprint) {
    for (int w : row_widths) {
        if (w < 3) throw ValidationError("layout", "rows need at least 2 candidates plus ABSTAIN");
        offsets_.push_back(offsets_.back() + static_cast<std::size_t>(w));
    }
    logits_.assign(offsets_.back(), 0.0);
}

void Policy::check(int q) const {
    if (q < 0 || q >= num_questions()) throw LookupError("unknown question id " + std::to_string(q));
}

int Policy::num_actions(int q) const {
    check(q);
    auto i = static_cast<std::size_t>(q);
    return static_cast<int>(offsets_[i + 1] - offsets_[i]);
}

std::span<double> Policy::row(int q) {
    check(q);
    auto i = static_cast<std::size_t>(q);
    return {logits_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

std::span<const double> Policy::row(int q) const {
    check(q);
    auto i = static_cast<std::size_t>(q);
    return {logits_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

bool Policy::same_shape(const Policy& other) const {
    return fingerprint_ == other.fingerprint_ && offsets_ == other.offsets_;
}

void Policy::require_same_shape(const Policy& other) const {
    if (!same_shape(other)) throw ShapeError("policy and snapshot belong to different banks or layouts");
}

std::string Policy::serialize() const {
    std::string out(kMagic);
    out += "\nbank ";
    out += csv::format_hex64(fingerprint_);
    out += "\nlayout ";
    for (int q = 0; q < num_questions(); ++q) {
        if (q) out += ',';
        out += std::to_string(num_actions(q));
    }
    out += '\n';
    for (int q = 0; q < num_questions(); ++q) {
        out += std::to_string(q);
        for (double v : row(q)) {
            out += ',';
            out += csv::format_double(v);
        }
        out += '\n';
    }
    return out;
}

Policy Policy::deserialize(std::string_view text) {
    auto ls = csv::lines(text);
    if (ls.size() < 3 || ls[0] != kMagic) throw ValidationError("checkpoint", "bad header");
    if (ls[1].substr(0, 5) != "bank ") throw ValidationError("checkpoint", "missing bank line");
    auto fp = csv::parse_hex64(ls[1].substr(5), "bank");
    if (ls[2].substr(0, 7) != "layout ") throw ValidationError("checkpoint", "missing layout line");
    std::vector<int> widths;
    auto layout = ls[2].substr(7);
    if (!csv::trim(layout).empty())
        for (auto f : csv::split(layout)) widths.push_back(static_cast<int>(csv::parse_int(f, "layout")));
    Policy p(fp, widths);
    std::size_t row_lines = 0;
    for (std::size_t i = 3; i < ls.size(); ++i) {
        if (ls[i].empty()) continue;
        auto f = csv::split(ls[i]);
        int q = static_cast<int>(csv::parse_int(f[0], "row id"));
        if (q != static_cast<int>(row_lines)) throw ValidationError("checkpoint", "rows out of order");
        auto r = p.row(q);
        if (f.size() != r.size() + 1) throw ShapeError("checkpoint row " + std::to_string(q) + " width mismatch");
        for (std::size_t a = 0; a < r.size(); ++a) r[a] = csv::parse_double(f[a + 1], "logit");
        ++row_lines;
    }
    if (row_lines != widths.size()) throw ShapeError("checkpoint has missing rows");
    return p;
}

PolicySnapshot snapshot(const Policy& policy, SnapshotTag tag) {
    return PolicySnapshot(std::make_shared<const Policy>(policy), tag);
}

void softmax(std::span<const double> logits, std::span<double> out, double inv_temperature) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : logits) m = std::max(m, v * inv_temperature);
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] * inv_temperature - m);
        z += out[i];
    }
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] /= z;
}

void log_softmax(std::span<const double> logits, std::span<double> out) {
    double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double v : logits) z += std::exp(v - m);
    double lz = m + std::log(z);
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lz;
}

std::vector<double> action_distribution(const Policy& policy, int q) {
    auto r = policy.row(q);
    std::vector<double> p(r.size());
    softmax(r, p);
    return p;
}

int sample_index(std::span<const double> probs, Rng& rng) {
    double u = rng.uniform();
    double c = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        c += probs[i];
        if (u < c) return static_cast<int>(i);
    }
    // Rounding left u above the accumulated mass; take the last non-empty entry.
    for (std::size_t i = probs.size(); i-- > 0;)
        if (probs[i] > 0.0) return static_cast<int>(i);
    return static_cast<int>(probs.size()) - 1;
}

ActionSample sample_action(const Policy& policy, int q, Rng& rng) {
    auto p = action_distribution(policy, q);
    int a = sample_index(p, rng);
    return {a, std::log(p[static_cast<std::size_t>(a)])};
}

int argmax_lowest(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return static_cast<int>(best);
}

int greedy_action(const Policy& policy, int q) { return argmax_lowest(policy.row(q)); }

double kl_divergence(std::span<const double> logits_p, std::span<const double> logits_q) {
    if (logits_p.size() != logits_q.size()) throw ShapeError("kl_divergence: action-set size mismatch");
    std::vector<double> lp(logits_p.size()), lq(logits_q.size());
    log_softmax(logits_p, lp);
    log_softmax(logits_q, lq);
    double kl = 0.0;
    for (std::size_t i = 0; i < lp.size(); ++i) {
        double p = std::exp(lp[i]);
        if (p > 0.0) kl += p * (lp[i] - lq[i]);
    }
    return std::max(kl, 0.0);
}

double kl_divergence(const Policy& policy, const PolicySnapshot& snap, int q) {
    policy.require_same_shape(snap.policy());
    auto a = policy.row(q);
    auto b = snap.row(q);
    if (std::equal(a.begin(), a.end(), b.begin(), b.end())) return 0.0;
    return kl_divergence(a, b);
}

void BasePrior::validate() const {
    for (auto [v, name] : {std::pair{gold_bias, "gold_bias"}, {confab_bias, "confab_bias"},
                           {abstain_bias, "abstain_bias"}, {background_shift, "background_shift"}, {noise, "noise"}})
        if (!std::isfinite(v)) throw ValidationError(name, "must be finite");
    if (noise < 0.0) throw ValidationError("noise", "must be >= 0");
}

Policy make_base_policy(const QuestionBank& bank, const BasePrior& prior, Mode mode, std::uint64_t seed) {
    prior.validate();
    Policy p(bank);
    for (const auto& q : bank.questions()) {
        Rng rng = derive_stream(seed, {tag("prior"), static_cast<std::uint64_t>(q.id)});
        auto r = p.row(q.id);
        for (double& v : r) v = prior.noise * rng.normal() - prior.background_shift;
        const int K = q.num_candidates;
        int confab = (q.gold_index + 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(K - 1)))) % K;
        double eff = effective_knowability(q, mode);
        auto at = [&](int a) -> double& { return r[static_cast<std::size_t>(a)]; };
        at(q.gold_index) += prior.background_shift + prior.gold_bias * eff;
        at(confab) += prior.background_shift + prior.confab_bias * (1.0 - eff);
        at(K) += prior.background_shift + prior.abstain_bias;
    }
    return p;
}

}  // namespace truthrl
