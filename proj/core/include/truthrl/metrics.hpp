#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "truthrl/policy.hpp"
#include "truthrl/verifier.hpp"
#include "truthrl/world.hpp"

namespace truthrl {

struct Weights {
    double w1 = 1.0;
    double w2 = 0.0;
    double w3 = 1.0;
    void validate() const;
};

double truthfulness(double acc, double unc, double hall, const Weights& w = {});

struct Tally {
    long correct = 0;
    long uncertain = 0;
    long hallucinated = 0;

    long n() const { return correct + uncertain + hallucinated; }
    void add(Label l);
    Tally& operator+=(const Tally& o);
};

struct Scoreboard {
    double acc = 0.0;
    double unc = 0.0;
    double hall = 0.0;
    double truthfulness = 0.0;
    long n = 0;
    Tally tally;
    std::map<std::string, Scoreboard> slices;  // "qtype:<name>" and "kappa:<band>"
};

Scoreboard make_scoreboard(const Tally& t, const Weights& w = {});

// Band edges for kappa slices; the last band is closed.
inline const std::vector<double> kKappaBandEdges{0.0, 0.1, 0.5, 0.9, 1.0};
std::string kappa_band(double kappa);

// Accumulates per-question labels into a scoreboard with slices.
class ScoreboardBuilder {
public:
    explicit ScoreboardBuilder(Weights w = {}) : w_(w) {}
    void add(const Question& q, Label l);
    Scoreboard build() const;

private:
    Weights w_;
    Tally all_;
    std::map<std::string, Tally> slices_;
};

// One greedy action and one episode per question; episode streams derive from eval_seed.
Scoreboard evaluate(const Policy& policy, const QuestionBank& bank, Mode mode, const Verifier& verifier,
                    const Weights& weights, std::uint64_t eval_seed);

// plurality: ABSTAIN only on a strict majority of votes.
// abstain_excluded: plurality over concrete votes; ABSTAIN only if there are none.
// abstain_floor: a concrete answer needs a strict majority, otherwise ABSTAIN.
// abstain_vote: ABSTAIN competes in the plurality and wins ties with the top concrete answer.
enum class MajorityRule { plurality, abstain_excluded, abstain_floor, abstain_vote };
std::string_view to_string(MajorityRule r);
MajorityRule parse_majority_rule(std::string_view s);

// counts has K+1 entries, ABSTAIN last.
int aggregate_votes(std::span<const int> counts, MajorityRule rule);

Scoreboard majority_at_k(const Policy& policy, const QuestionBank& bank, int k, Mode mode, const Verifier& verifier,
                         const Weights& weights, std::uint64_t seed, MajorityRule rule = MajorityRule::abstain_vote,
                         bool shared_episodes = false);

struct ConfidenceBin {
    double lo = 0.0;
    double hi = 0.0;
    Scoreboard board;
};

std::vector<ConfidenceBin> confidence_bins(const Policy& policy, const QuestionBank& bank, Mode mode,
                                           const Verifier& verifier, const Weights& weights,
                                           const std::vector<double>& edges, std::uint64_t eval_seed);

struct BreakdownRow {
    std::string slice;
    double acc = 0.0;
    double unc = 0.0;
    double hall = 0.0;
    double truthfulness = 0.0;
    long n = 0;
};

// key is "qtype" or "kappa".
std::vector<BreakdownRow> breakdown(const Scoreboard& board, std::string_view key);

// Rows in the `label,k_or_bin,acc,unc,hall,truthfulness,n` layout.
inline constexpr std::string_view kScoreboardHeader = "label,k_or_bin,acc,unc,hall,truthfulness,n\n";
std::string scoreboard_row(std::string_view label, std::string_view k_or_bin, const Scoreboard& board);

}  // namespace truthrl
