#include "truthrl/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "parallel.hpp"
#include "truthrl/csv.hpp"

namespace truthrl {

std::string_view to_string(ReferencePolicy r) { return r == ReferencePolicy::initial ? "initial" : "old"; }

ReferencePolicy parse_reference_policy(std::string_view s) {
    if (s == "initial") return ReferencePolicy::initial;
    if (s == "old") return ReferencePolicy::old;
    throw ValidationError("grpo.reference", "expected initial or old, got '" + std::string(s) + "'");
}

void GrpoConfig::validate() const {
    if (group_size < 2) throw ValidationError("grpo.group_size", "must be >= 2");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("grpo.epsilon", "must lie in (0, 1)");
    if (!(beta >= 0.0)) throw ValidationError("grpo.beta", "must be >= 0");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        throw ValidationError("grpo.learning_rate", "must be > 0");
    if (steps < 0) throw ValidationError("grpo.steps", "must be >= 0");
    if (batch_size < 1) throw ValidationError("grpo.batch_size", "must be >= 1");
    if (inner_epochs < 1) throw ValidationError("grpo.inner_epochs", "must be >= 1");
    if (!(std_guard > 0.0)) throw ValidationError("grpo.std_guard", "must be > 0");
    if (checkpoint_every < 0) throw ValidationError("grpo.checkpoint_every", "must be >= 0");
    if (workers < 1) throw ValidationError("grpo.workers", "must be >= 1");
}

std::vector<double> group_advantages(std::span<const double> rewards, double std_guard, bool population_std) {
    const std::size_t G = rewards.size();
    if (G < 2) throw ContractError("group_advantages needs at least 2 rewards");
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= static_cast<double>(G);
    double ss = 0.0;
    for (double r : rewards) ss += (r - mean) * (r - mean);
    double sd = std::sqrt(ss / static_cast<double>(population_std ? G : G - 1));
    std::vector<double> adv(G, 0.0);
    if (sd < std_guard) return adv;
    for (std::size_t i = 0; i < G; ++i) adv[i] = (rewards[i] - mean) / sd;
    return adv;
}

GroupRollout rollout_group(const PolicySnapshot& old_policy, const Question& q, int group_size, Mode mode,
                           const Verifier& verifier, const RewardScheme& scheme, bool is_ook, Rng& rng,
                           double std_guard, bool population_std) {
    if (group_size < 2) throw ContractError("rollout_group needs G >= 2");
    std::vector<double> p(static_cast<std::size_t>(q.num_actions()));
    softmax(old_policy.row(q.id), p);
    GroupRollout g;
    g.question_id = q.id;
    g.samples.resize(static_cast<std::size_t>(group_size));
    std::vector<double> rewards(g.samples.size());
    for (std::size_t i = 0; i < g.samples.size(); ++i) {
        auto& s = g.samples[i];
        s.action = sample_index(p, rng);
        s.log_prob_old = std::log(p[static_cast<std::size_t>(s.action)]);
        s.episode = realize_episode(q, mode, rng);
        s.outcome = verifier.judge(q, s.episode, s.action, rng);
        s.reward = rewards[i] = compute_reward(scheme, s.outcome, is_ook);
    }
    auto adv = group_advantages(rewards, std_guard, population_std);
    for (std::size_t i = 0; i < adv.size(); ++i) g.samples[i].advantage = adv[i];
    return g;
}

namespace {

struct RowTerms {
    std::vector<double> lp;      // log pi_theta
    std::vector<double> lp_old;  // log pi_old
    std::vector<double> lp_ref;  // log pi_ref
};

RowTerms row_terms(const Policy& policy, const PolicySnapshot& old_policy, const PolicySnapshot& ref_policy, int q) {
    policy.require_same_shape(old_policy.policy());
    policy.require_same_shape(ref_policy.policy());
    auto n = static_cast<std::size_t>(policy.num_actions(q));
    RowTerms t{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    log_softmax(policy.row(q), t.lp);
    log_softmax(old_policy.row(q), t.lp_old);
    log_softmax(ref_policy.row(q), t.lp_ref);
    return t;
}

double clip(double w, double eps) { return std::clamp(w, 1.0 - eps, 1.0 + eps); }

}  // namespace

double surrogate_value(const Policy& policy, const PolicySnapshot& old_policy, const PolicySnapshot& ref_policy,
                       const GroupRollout& group, double epsilon, double beta) {
    const int q = group.question_id;
    auto t = row_terms(policy, old_policy, ref_policy, q);
    double total = 0.0;
    for (const auto& s : group.samples) {
        auto a = static_cast<std::size_t>(s.action);
        double w = std::exp(t.lp[a] - t.lp_old[a]);
        total += std::min(w * s.advantage, clip(w, epsilon) * s.advantage);
    }
    double value = group.samples.empty() ? 0.0 : total / static_cast<double>(group.samples.size());
    if (beta != 0.0) value -= beta * kl_divergence(policy.row(q), ref_policy.row(q));
    return value;
}

std::vector<double> surrogate_gradient(const Policy& policy, const PolicySnapshot& old_policy,
                                       const PolicySnapshot& ref_policy, const GroupRollout& group, double epsilon,
                                       double beta) {
    const int q = group.question_id;
    auto t = row_terms(policy, old_policy, ref_policy, q);
    const std::size_t n = t.lp.size();
    std::vector<double> p(n);
    for (std::size_t j = 0; j < n; ++j) p[j] = std::exp(t.lp[j]);

    std::vector<double> grad(n, 0.0);
    if (!group.samples.empty()) {
        const double inv_g = 1.0 / static_cast<double>(group.samples.size());
        for (const auto& s : group.samples) {
            auto a = static_cast<std::size_t>(s.action);
            double w = std::exp(t.lp[a] - t.lp_old[a]);
            double unclipped = w * s.advantage;
            if (unclipped > clip(w, epsilon) * s.advantage) continue;  // clip branch: constant in theta
            double c = inv_g * unclipped;
            for (std::size_t j = 0; j < n; ++j) grad[j] -= c * p[j];
            grad[a] += c;
        }
    }
    if (beta != 0.0) {
        double kl = 0.0;
        for (std::size_t j = 0; j < n; ++j) kl += p[j] * (t.lp[j] - t.lp_ref[j]);
        for (std::size_t j = 0; j < n; ++j) grad[j] -= beta * p[j] * (t.lp[j] - t.lp_ref[j] - kl);
    }
    return grad;
}

std::string TraceLog::to_csv() const {
    std::string out = "step,mean_reward,acc,unc,hall,mean_kl,grad_norm\n";
    for (const auto& r : records) {
        out += std::to_string(r.step);
        for (double v : {r.mean_reward, r.acc, r.unc, r.hall, r.mean_kl, r.grad_norm}) {
            out += ',';
            out += csv::format_double(v);
        }
        out += '\n';
    }
    return out;
}

std::vector<int> select_batch(int num_questions, int batch_size, Rng& rng) {
    std::vector<int> ids(static_cast<std::size_t>(num_questions));
    for (int i = 0; i < num_questions; ++i) ids[static_cast<std::size_t>(i)] = i;
    if (batch_size >= num_questions) return ids;
    // Partial Fisher-Yates from the front: one draw per selected slot.
    for (int i = 0; i < batch_size; ++i) {
        auto j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.index(static_cast<std::uint64_t>(num_questions - i)));
        std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
    }
    ids.resize(static_cast<std::size_t>(batch_size));
    std::sort(ids.begin(), ids.end());
    return ids;
}

namespace {

// Greedy exact-judge metrics on fixed episodes, plus mean KL to the reference.
// Per-row results are cached; refresh() recomputes only rows that changed.
class TraceProbe {
public:
    TraceProbe(const QuestionBank& bank, Mode mode, std::uint64_t seed) : bank_(bank) {
        for (const auto& q : bank.questions()) {
            Rng rng = derive_stream(seed, {tag("trace"), static_cast<std::uint64_t>(q.id)});
            episodes_.push_back(realize_episode(q, mode, rng));
        }
        labels_.assign(episodes_.size(), Label::uncertain);
        kl_.assign(episodes_.size(), 0.0);
    }

    void refresh_all(const Policy& policy, const std::vector<std::vector<double>>& ref_logp) {
        for (int q = 0; q < bank_.size(); ++q) refresh_row(policy, ref_logp, q);
    }

    void refresh(const Policy& policy, const std::vector<std::vector<double>>& ref_logp, const std::vector<int>& rows) {
        for (int q : rows) refresh_row(policy, ref_logp, q);
    }

    void fill(TraceRecord& rec) const {
        const int n = bank_.size();
        int correct = 0, uncertain = 0;
        double kl_sum = 0.0;
        for (std::size_t q = 0; q < labels_.size(); ++q) {
            correct += labels_[q] == Label::correct;
            uncertain += labels_[q] == Label::uncertain;
            kl_sum += kl_[q];
        }
        double dn = n > 0 ? static_cast<double>(n) : 1.0;
        rec.acc = correct / dn;
        rec.unc = uncertain / dn;
        rec.hall = n > 0 ? (n - correct - uncertain) / dn : 0.0;
        rec.mean_kl = kl_sum / dn;
    }

private:
    void refresh_row(const Policy& policy, const std::vector<std::vector<double>>& ref_logp, int q) {
        const auto i = static_cast<std::size_t>(q);
        auto row = policy.row(q);
        labels_[i] = judge_exact(episodes_[i], argmax_lowest(row)).label;
        lp_.resize(row.size());
        log_softmax(row, lp_);
        const auto& lr = ref_logp[i];
        double kl = 0.0;
        for (std::size_t j = 0; j < lp_.size(); ++j) kl += std::exp(lp_[j]) * (lp_[j] - lr[j]);
        kl_[i] = std::max(kl, 0.0);
    }

    const QuestionBank& bank_;
    std::vector<Episode> episodes_;
    std::vector<Label> labels_;
    std::vector<double> kl_;
    std::vector<double> lp_;
};

std::vector<std::vector<double>> log_rows(const Policy& p) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(p.num_questions()));
    for (int q = 0; q < p.num_questions(); ++q) {
        auto r = p.row(q);
        out[static_cast<std::size_t>(q)].resize(r.size());
        log_softmax(r, out[static_cast<std::size_t>(q)]);
    }
    return out;
}

}  // namespace

TrainResult train(const QuestionBank& bank, const Policy& initial, const GrpoConfig& config,
                  const RewardScheme& scheme, const Verifier& verifier, Mode mode, const std::vector<bool>* ook,
                  const CheckpointSink& on_checkpoint) {
    config.validate();
    scheme.validate();
    if (initial.bank_fingerprint() != bank.fingerprint() || initial.num_questions() != bank.size())
        throw ShapeError("initial policy does not match the bank");
    if (ook && static_cast<int>(ook->size()) != bank.size()) throw ShapeError("OOK flags do not cover the bank");
    if (scheme.knowledge_enhanced && !ook) throw ContractError("knowledge-enhanced reward requires OOK flags");

    TrainResult result{initial, {}};
    Policy& policy = result.policy;
    auto ref = snapshot(initial, SnapshotTag::reference);
    auto ref_logp = log_rows(initial);
    TraceProbe probe(bank, mode, config.seed);
    probe.refresh_all(policy, ref_logp);
    result.trace.records.reserve(static_cast<std::size_t>(config.steps));

    for (int step = 1; step <= config.steps; ++step) {
        auto old = snapshot(policy, SnapshotTag::old);
        if (config.reference == ReferencePolicy::old) {
            ref = PolicySnapshot(std::make_shared<const Policy>(old.policy()), SnapshotTag::reference);
            ref_logp = log_rows(policy);
        }
        Rng batch_rng = derive_stream(config.seed, {tag("batch"), static_cast<std::uint64_t>(step)});
        auto batch = select_batch(bank.size(), config.batch_size, batch_rng);

        std::vector<GroupRollout> groups(batch.size());
        try {
            detail::parallel_for(static_cast<int>(batch.size()), config.workers, [&](int i) {
                const auto& q = bank.at(batch[static_cast<std::size_t>(i)]);
                Rng rng = derive_stream(config.seed, {tag("rollout"), static_cast<std::uint64_t>(step),
                                                      static_cast<std::uint64_t>(q.id)});
                bool flag = ook ? (*ook)[static_cast<std::size_t>(q.id)] : false;
                groups[static_cast<std::size_t>(i)] = rollout_group(old, q, config.group_size, mode, verifier, scheme,
                                                                    flag, rng, config.std_guard, config.population_std);
            });
        } catch (const std::exception& e) {
            throw TrainingAborted(std::string("training aborted at step ") + std::to_string(step) + ": " + e.what(),
                                  result.trace, std::current_exception());
        }

        TraceRecord rec;
        rec.step = step;
        double reward_sum = 0.0;
        std::size_t count = 0;
        for (const auto& g : groups)
            for (const auto& s : g.samples) {
                reward_sum += s.reward;
                ++count;
            }
        rec.mean_reward = count ? reward_sum / static_cast<double>(count) : 0.0;

        double sq = 0.0;
        for (int epoch = 0; epoch < config.inner_epochs; ++epoch) {
            for (const auto& g : groups) {
                auto grad = surrogate_gradient(policy, old, ref, g, config.epsilon, config.beta);
                auto row = policy.row(g.question_id);
                for (std::size_t j = 0; j < row.size(); ++j) {
                    row[j] += config.learning_rate * grad[j];
                    if (epoch == 0) sq += grad[j] * grad[j];
                }
            }
        }
        rec.grad_norm = std::sqrt(sq);
        if (config.reference == ReferencePolicy::old)
            probe.refresh_all(policy, ref_logp);
        else
            probe.refresh(policy, ref_logp, batch);
        probe.fill(rec);
        result.trace.records.push_back(rec);

        if (on_checkpoint && config.checkpoint_every > 0 && step % config.checkpoint_every == 0)
            on_checkpoint(step, policy);
    }
    return result;
}

}  // namespace truthrl
