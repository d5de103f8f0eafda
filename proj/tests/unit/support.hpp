#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "truthrl/policy.hpp"
#include "truthrl/world.hpp"

namespace truthrl::testing {

inline Question make_question(int id, int k, int gold, double kappa, double rho = 0.0,
                              QType qtype = QType::simple) {
    Question q;
    q.id = id;
    q.num_candidates = k;
    q.gold_index = gold;
    q.kappa = kappa;
    q.rho = rho;
    q.qtype = qtype;
    return q;
}

// n questions with the same K and kappa; gold cycles through the candidates.
inline QuestionBank uniform_bank(int n, int k, double kappa, double rho = 0.0) {
    std::vector<Question> qs;
    for (int i = 0; i < n; ++i) qs.push_back(make_question(i, k, i % k, kappa, rho));
    return QuestionBank(std::move(qs), 0);
}

inline Policy set_row(Policy p, int q, const std::vector<double>& logits) {
    auto row = p.row(q);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = logits[j];
    return p;
}

// Fresh empty directory under the system temp dir.
inline std::string scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("truthrl-test-" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
}

}  // namespace truthrl::testing
