#include "truthrl/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "truthrl/baselines.hpp"
#include "truthrl/csv.hpp"
#include "truthrl/errors.hpp"
#include "truthrl/grpo.hpp"
#include "truthrl/probe.hpp"

namespace truthrl {

namespace fs = std::filesystem;
using nlohmann::json;

ArtifactDir::ArtifactDir(std::string root) : root_(std::move(root)) { fs::create_directories(root_); }

std::string ArtifactDir::path(const std::string& relative) const { return (fs::path(root_) / relative).string(); }

void ArtifactDir::write(const std::string& relative, const std::string& contents) {
    fs::path p = fs::path(root_) / relative;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    csv::write_file(p.string(), contents);
    hashes_[relative] = fnv1a64(contents);
}

QuestionBank load_bank(const ExperimentConfig& config) {
    if (!config.bank_path.empty()) return QuestionBank::from_csv(csv::read_file(config.bank_path), config.seeds.bank);
    return generate_bank(config.bank);
}

std::uint64_t base_policy_seed(const ExperimentConfig& config) {
    return derive_seed(config.seeds.bank, {tag("base-policy")});
}

Policy base_policy(const ExperimentConfig& config, const QuestionBank& bank) {
    return make_base_policy(bank, config.prior, config.mode, base_policy_seed(config));
}

namespace {

std::string step_name(int step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "checkpoints/step_%06d.ckpt", step);
    return buf;
}

std::string hex(std::uint64_t v) { return csv::format_hex64(v); }

class Pipeline {
public:
    Pipeline(const ExperimentConfig& config, const std::string& out_dir, const RunOptions& options)
        : cfg_(config), opts_(options), dir_(out_dir), train_verifier_(config.training_verifier()) {
        result_.out_dir = out_dir;
        eval_verifier_ = cfg_.eval_judge == EvalJudge::exact ? Verifier() : train_verifier_;
    }

    RunResult run() {
        try {
            body();
            status_ = "complete";
        } catch (const TrainingAborted& e) {
            dir_.write("trace.csv", e.partial_trace().to_csv());
            status_ = "aborted";
            finish();
            std::rethrow_exception(e.cause());
        } catch (...) {
            status_ = "aborted";
            finish();
            throw;
        }
        finish();
        return result_;
    }

private:
    void body() {
        bank_ = load_bank(cfg_);
        dir_.write("bank.csv", bank_.to_csv());
        dir_.write("resolved.cfg", resolved_config(cfg_));
        if (opts_.stage == Stage::bank) return;

        initial_ = base_policy(cfg_, bank_);
        if (opts_.policy_path) {
            Policy p = Policy::deserialize(csv::read_file(*opts_.policy_path));
            if (p.bank_fingerprint() != bank_.fingerprint() || !p.same_shape(Policy(bank_)))
                throw ShapeError("checkpoint " + *opts_.policy_path + " does not match the bank");
            given_ = std::move(p);
        }

        if (opts_.stage == Stage::probe) {
            dir_.write("ook.csv", probe(given_ ? *given_ : initial_).to_csv());
            return;
        }
        if (opts_.stage == Stage::eval || opts_.stage == Stage::majority) {
            evaluated_.emplace_back(given_ ? "checkpoint" : "prompting", given_ ? *given_ : initial_);
        } else {
            train_method();
        }
        if (opts_.stage == Stage::train) return;
        if (opts_.stage != Stage::majority) evaluate_all();
        majority();
    }

    OokReport probe(const Policy& p) {
        return probe_ook(p, bank_, cfg_.probe_samples, cfg_.probe_mode, train_verifier_, cfg_.seeds.probe, cfg_.workers);
    }

    void write_policy(const std::string& name, const Policy& p) { dir_.write("checkpoints/" + name, p.serialize()); }

    void train_method() {
        const std::string label(to_string(cfg_.method));
        switch (cfg_.method) {
            case Method::prompting: evaluated_.emplace_back(label, initial_); return;
            case Method::sft:
            case Method::rtuning:
            case Method::rft: {
                LabelSet labels;
                if (cfg_.method == Method::sft) {
                    labels = gold_labels(bank_);
                } else {
                    OokReport ook = probe(initial_);
                    dir_.write("ook.csv", ook.to_csv());
                    if (cfg_.method == Method::rtuning) {
                        labels = build_rtuning_labels(bank_, ook);
                    } else {
                        auto seed = derive_seed(cfg_.seeds.train, {tag("rft")});
                        derived_["rft"] = seed;
                        labels = build_rft_labels(initial_, bank_, ook, cfg_.rft, cfg_.mode, train_verifier_, seed);
                    }
                }
                dir_.write("labels.csv", labels.to_csv());
                Policy p = train_sft(bank_, initial_, labels, cfg_.sft);
                write_policy("final.ckpt", p);
                evaluated_.emplace_back(label, std::move(p));
                return;
            }
            case Method::dpo:
            case Method::iterative_dpo: {
                const bool iterative = cfg_.method == Method::iterative_dpo;
                auto its = iterate_dpo(bank_, initial_, cfg_.dpo, iterative ? cfg_.dpo_iterations : 1, cfg_.probe_mode,
                                       cfg_.probe_samples, train_verifier_, cfg_.seeds.probe, cfg_.workers);
                dir_.write("ook.csv", its.front().ook.to_csv());
                if (!iterative) {
                    dir_.write("pairs.csv", pairs_to_csv(its.front().pairs));
                    write_policy("final.ckpt", its.front().policy);
                    evaluated_.emplace_back(label, its.front().policy);
                    return;
                }
                for (std::size_t i = 0; i < its.size(); ++i) {
                    std::string n = std::to_string(i + 1);
                    if (i > 0) dir_.write("ook_iter" + n + ".csv", its[i].ook.to_csv());
                    dir_.write("pairs_iter" + n + ".csv", pairs_to_csv(its[i].pairs));
                    write_policy("iter_" + n + ".ckpt", its[i].policy);
                    evaluated_.emplace_back("iter" + n, its[i].policy);
                }
                return;
            }
            case Method::truthrl_binary:
            case Method::truthrl_ternary: {
                std::optional<OokReport> ook;
                if (cfg_.reward.knowledge_enhanced) {
                    ook = probe(initial_);
                    dir_.write("ook.csv", ook->to_csv());
                }
                auto sink = [&](int step, const Policy& p) { dir_.write(step_name(step), p.serialize()); };
                auto r = train(bank_, initial_, cfg_.grpo, cfg_.reward, train_verifier_, cfg_.mode,
                               ook ? &ook->is_ook : nullptr, sink);
                dir_.write("trace.csv", r.trace.to_csv());
                write_policy("final.ckpt", r.policy);
                evaluated_.emplace_back(label, std::move(r.policy));
                return;
            }
        }
    }

    void evaluate_all() {
        std::string board = std::string(kScoreboardHeader);
        for (const auto& [label, p] : evaluated_) {
            Scoreboard s = evaluate(p, bank_, cfg_.mode, eval_verifier_, cfg_.weights, cfg_.seeds.eval);
            board += scoreboard_row(label, "greedy", s);
            result_.scoreboard.push_back({label, "greedy", s});
        }
        dir_.write("scoreboard.csv", board);

        const auto& [label, final_policy] = evaluated_.back();
        const Scoreboard& last = result_.scoreboard.back().board;
        std::string slices = std::string(kScoreboardHeader);
        for (const auto& [key, s] : last.slices) slices += scoreboard_row(label, key, s);
        dir_.write("breakdown.csv", slices);

        std::string conf = std::string(kScoreboardHeader);
        for (const auto& b : confidence_bins(final_policy, bank_, cfg_.mode, eval_verifier_, cfg_.weights,
                                             cfg_.confidence_edges, cfg_.seeds.eval)) {
            bool top = b.hi == 1.0;
            std::string key = "[" + csv::format_double(b.lo) + "," + csv::format_double(b.hi) + (top ? "]" : ")");
            conf += scoreboard_row(label, key, b.board);
        }
        dir_.write("confidence.csv", conf);
    }

    void majority() {
        const auto& ks = opts_.k_override.empty() ? cfg_.majority_k : opts_.k_override;
        if (ks.empty()) {
            if (opts_.stage == Stage::majority) throw ConfigError(0, "majority.k", "no k values configured");
            return;
        }
        const auto& [label, p] = evaluated_.back();
        std::string out = std::string(kScoreboardHeader);
        for (int k : ks) {
            Scoreboard s = majority_at_k(p, bank_, k, cfg_.mode, eval_verifier_, cfg_.weights, cfg_.seeds.eval,
                                         cfg_.majority_rule, cfg_.majority_shared_episodes);
            out += scoreboard_row(label, std::to_string(k), s);
            result_.majority.push_back({label, std::to_string(k), s});
        }
        dir_.write("majority.csv", out);
    }

    void finish() {
        json m;
        m["method"] = std::string(to_string(cfg_.method));
        m["mode"] = std::string(to_string(cfg_.mode));
        m["status"] = status_;
        m["seeds"] = {{"bank", cfg_.seeds.bank}, {"train", cfg_.seeds.train}, {"probe", cfg_.seeds.probe},
                      {"eval", cfg_.seeds.eval}};
        json derived = {{"base_policy", hex(base_policy_seed(cfg_))}};
        for (const auto& [k, v] : derived_) derived[k] = hex(v);
        m["derived_seeds"] = derived;
        if (bank_.size() > 0) m["bank_fingerprint"] = hex(bank_.fingerprint());
        json files = json::object();
        for (const auto& [name, h] : dir_.hashes()) files[name] = "fnv1a64:" + hex(h);
        m["files"] = files;
        result_.file_hashes = dir_.hashes();
        csv::write_file(dir_.path("manifest.json"), m.dump(2) + "\n");
    }

    const ExperimentConfig& cfg_;
    const RunOptions& opts_;
    ArtifactDir dir_;
    Verifier train_verifier_;
    Verifier eval_verifier_;
    QuestionBank bank_;
    Policy initial_;
    std::optional<Policy> given_;
    std::vector<std::pair<std::string, Policy>> evaluated_;
    std::map<std::string, std::uint64_t> derived_;
    std::string status_ = "running";
    RunResult result_;
};

std::string sanitize(std::string_view s) {
    std::string out;
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                  c == '_' || c == '-' || c == '=';
        out += ok ? c : '_';
    }
    return out;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const std::string& out_dir, const RunOptions& options) {
    return Pipeline(config, out_dir, options).run();
}

std::uint64_t sweep_child_seed(std::uint64_t parent, std::string_view axis_value) {
    return mix_seed(parent, fnv1a64(axis_value));
}

SweepResult run_sweep(const ExperimentConfig& base, const std::string& axis, const std::vector<std::string>& values,
                      const std::string& out_dir) {
    if (values.empty()) throw ConfigError(0, axis, "sweep needs at least one value");
    {
        auto keys = known_config_keys();
        if (std::find(keys.begin(), keys.end(), axis) == keys.end()) throw ConfigError(0, axis, "unknown sweep axis");
    }
    ArtifactDir dir(out_dir);
    SweepResult out;
    std::string merged = std::string(kScoreboardHeader);
    json runs = json::array();
    for (const auto& value : values) {
        ExperimentConfig child = base;
        set_config_value(child, axis, value);
        set_config_value(child, "seeds.train", std::to_string(sweep_child_seed(base.seeds.train, value)));
        set_config_value(child, "seeds.probe", std::to_string(sweep_child_seed(base.seeds.probe, value)));
        set_config_value(child, "seeds.eval", std::to_string(sweep_child_seed(base.seeds.eval, value)));
        std::string sub = sanitize(axis + "=" + value);
        auto r = run_experiment(child, dir.path(sub));
        for (const auto& row : r.scoreboard) merged += scoreboard_row(axis + "=" + value + "/" + row.label, row.key, row.board);
        for (const auto& row : r.majority) merged += scoreboard_row(axis + "=" + value + "/" + row.label, row.key, row.board);
        out.run_dirs.push_back(r.out_dir);
        json files = json::object();
        for (const auto& [name, h] : r.file_hashes) files[name] = "fnv1a64:" + hex(h);
        runs.push_back({{"value", value},
                        {"dir", sub},
                        {"seeds", {{"bank", child.seeds.bank}, {"train", child.seeds.train},
                                   {"probe", child.seeds.probe}, {"eval", child.seeds.eval}}},
                        {"files", files}});
    }
    dir.write("merged.csv", merged);
    json m;
    m["axis"] = axis;
    m["parent_seeds"] = {{"bank", base.seeds.bank}, {"train", base.seeds.train}, {"probe", base.seeds.probe},
                         {"eval", base.seeds.eval}};
    m["seed_derivation"] = "child = mix_seed(parent, fnv1a64(value)); bank seed shared";
    m["runs"] = runs;
    m["merged"] = "fnv1a64:" + hex(dir.hashes().at("merged.csv"));
    csv::write_file(dir.path("sweep.json"), m.dump(2) + "\n");
    out.merged_csv = merged;
    return out;
}

}  // namespace truthrl
