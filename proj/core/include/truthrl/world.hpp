#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "truthrl/rng.hpp"

namespace truthrl {

enum class QType { simple, comparison, false_premise };
enum class Mode { no_retrieval, retrieval };

std::string_view to_string(QType t);
std::string_view to_string(Mode m);
QType parse_qtype(std::string_view s);
Mode parse_mode(std::string_view s);

struct Question {
    int id = 0;
    int num_candidates = 2;  // K; actions are 0..K-1 plus ABSTAIN at K
    int gold_index = 0;
    double kappa = 1.0;
    double rho = 0.0;
    QType qtype = QType::simple;

    int abstain_action() const { return num_candidates; }
    int num_actions() const { return num_candidates + 1; }
    void validate() const;
};

struct KappaShare {
    double value = 1.0;
    double fraction = 1.0;
};

struct BankSpec {
    int simple = 0;
    int comparison = 0;
    int false_premise = 0;
    int k_min = 4;
    int k_max = 4;
    std::vector<KappaShare> kappa_mix{{1.0, 1.0}};
    double rho = 0.0;
    std::uint64_t seed = 0;

    int total() const { return simple + comparison + false_premise; }
    void validate() const;
};

struct Episode {
    int question_id = 0;
    Mode mode = Mode::no_retrieval;
    int realized_gold = 0;
    int num_candidates = 2;
};

class QuestionBank {
public:
    QuestionBank() = default;
    QuestionBank(std::vector<Question> questions, std::uint64_t seed, std::optional<BankSpec> spec = std::nullopt);

    const std::vector<Question>& questions() const { return questions_; }
    const Question& at(int id) const;
    int size() const { return static_cast<int>(questions_.size()); }
    std::uint64_t seed() const { return seed_; }
    const std::optional<BankSpec>& spec() const { return spec_; }

    // FNV-1a of the CSV serialization; identifies the bank in checkpoints.
    std::uint64_t fingerprint() const { return fingerprint_; }

    std::string to_csv() const;
    static QuestionBank from_csv(std::string_view text, std::uint64_t seed = 0);

private:
    std::vector<Question> questions_;
    std::uint64_t seed_ = 0;
    std::optional<BankSpec> spec_;
    std::uint64_t fingerprint_ = 0;
};

QuestionBank generate_bank(const BankSpec& spec);

double effective_knowability(const Question& q, Mode mode);

// Two draws: the knowability test, then the resample (always taken).
Episode realize_episode(const Question& q, Mode mode, Rng& rng);

// P(Correct) for a strategy that always answers gold_index.
double gold_ceiling(const Question& q, Mode mode);

}  // namespace truthrl
