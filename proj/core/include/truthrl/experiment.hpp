#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "truthrl/config.hpp"
#include "truthrl/metrics.hpp"
#include "truthrl/policy.hpp"
#include "truthrl/world.hpp"

namespace truthrl {

// Writes files under a root directory and records their content hashes.
class ArtifactDir {
public:
    explicit ArtifactDir(std::string root);

    void write(const std::string& relative, const std::string& contents);
    const std::map<std::string, std::uint64_t>& hashes() const { return hashes_; }
    const std::string& root() const { return root_; }
    std::string path(const std::string& relative) const;

private:
    std::string root_;
    std::map<std::string, std::uint64_t> hashes_;
};

QuestionBank load_bank(const ExperimentConfig& config);
std::uint64_t base_policy_seed(const ExperimentConfig& config);
Policy base_policy(const ExperimentConfig& config, const QuestionBank& bank);

enum class Stage { bank, probe, train, eval, majority, all };

struct RunOptions {
    Stage stage = Stage::all;
    std::optional<std::string> policy_path;  // evaluate or probe this checkpoint instead
    std::vector<int> k_override;
};

struct ScoreRow {
    std::string label;
    std::string key;
    Scoreboard board;
};

struct RunResult {
    std::string out_dir;
    std::vector<ScoreRow> scoreboard;  // one row per evaluated policy
    std::vector<ScoreRow> majority;
    std::map<std::string, std::uint64_t> file_hashes;
};

// Executes the configured method pipeline and writes artifacts plus
// manifest.json. Judge failures propagate after partial artifacts are written.
RunResult run_experiment(const ExperimentConfig& config, const std::string& out_dir, const RunOptions& options = {});

struct SweepResult {
    std::vector<std::string> run_dirs;
    std::string merged_csv;
};

std::uint64_t sweep_child_seed(std::uint64_t parent, std::string_view axis_value);

// One run per value under out_dir/<axis>=<value>; bank seed is shared, the
// train, probe and eval seeds are re-derived per value. Writes merged.csv.
SweepResult run_sweep(const ExperimentConfig& base, const std::string& axis, const std::vector<std::string>& values,
                      const std::string& out_dir);

}  // namespace truthrl
