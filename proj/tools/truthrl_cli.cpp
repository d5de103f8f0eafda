#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "truthrl/config.hpp"
#include "truthrl/csv.hpp"
#include "truthrl/errors.hpp"
#include "truthrl/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitJudge = 3;

struct Common {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> seed_overrides;
    std::string policy_path;
};

void add_common(CLI::App* cmd, Common& c, bool with_policy) {
    cmd->add_option("--config", c.config_path, "experiment config file")->required();
    cmd->add_option("--out", c.out_dir, "output directory");
    cmd->add_option("--seed-override", c.seed_overrides, "override a named seed, e.g. train=7")->take_all();
    if (with_policy) cmd->add_option("--policy", c.policy_path, "policy checkpoint to use instead of the base policy");
}

truthrl::ExperimentConfig load(const Common& c) {
    std::string text;
    try {
        text = truthrl::csv::read_file(c.config_path);
    } catch (const truthrl::LookupError& e) {
        throw truthrl::ConfigError(0, "", e.what());
    }
    auto cfg = truthrl::parse_config(text);
    for (const auto& o : c.seed_overrides) {
        auto eq = o.find('=');
        if (eq == std::string::npos) throw truthrl::ConfigError(0, "--seed-override", "expected name=int, got '" + o + "'");
        std::string name = o.substr(0, eq);
        if (name != "bank" && name != "train" && name != "probe" && name != "eval")
            throw truthrl::ConfigError(0, "--seed-override", "unknown seed '" + name + "'");
        truthrl::set_config_value(cfg, "seeds." + name, o.substr(eq + 1));
    }
    return cfg;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    for (auto f : truthrl::csv::split(s)) {
        auto t = truthrl::csv::trim(f);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

void print_rows(const truthrl::RunResult& r) {
    for (const auto& row : r.scoreboard)
        std::cout << row.label << "  acc=" << row.board.acc << " unc=" << row.board.unc << " hall=" << row.board.hall
                  << " T=" << row.board.truthfulness << " n=" << row.board.n << "\n";
    for (const auto& row : r.majority)
        std::cout << row.label << " k=" << row.key << "  acc=" << row.board.acc << " unc=" << row.board.unc
                  << " hall=" << row.board.hall << " T=" << row.board.truthfulness << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"truthrl: tabular truthfulness-RL laboratory"};
    app.require_subcommand(1);

    Common common;
    std::string k_list;
    std::string axis;
    std::string values;

    struct Sub {
        CLI::App* cmd;
        truthrl::Stage stage;
    };
    std::vector<Sub> subs;
    auto add_stage = [&](const char* name, const char* help, truthrl::Stage stage, bool with_policy) {
        auto* cmd = app.add_subcommand(name, help);
        add_common(cmd, common, with_policy);
        subs.push_back({cmd, stage});
        return cmd;
    };
    add_stage("gen-bank", "generate the question bank", truthrl::Stage::bank, false);
    add_stage("probe", "probe the knowledge boundary of a policy", truthrl::Stage::probe, true);
    add_stage("train", "train the configured method", truthrl::Stage::train, false);
    add_stage("eval", "evaluate a policy (base policy unless --policy)", truthrl::Stage::eval, true);
    auto* majority = add_stage("majority-k", "majority@k curve for a policy", truthrl::Stage::majority, true);
    majority->add_option("--k", k_list, "comma-separated k values (default: majority.k)");
    add_stage("run", "full pipeline: train, evaluate, report", truthrl::Stage::all, false);

    auto* sweep = app.add_subcommand("sweep", "one run per value of a config key");
    add_common(sweep, common, false);
    sweep->add_option("--axis", axis, "dotted config key, e.g. reward.base")->required();
    sweep->add_option("--values", values, "comma-separated values")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        auto cfg = load(common);
        if (sweep->parsed()) {
            auto r = truthrl::run_sweep(cfg, axis, split_list(values), common.out_dir);
            std::cout << r.merged_csv;
            return kExitOk;
        }
        for (const auto& s : subs) {
            if (!s.cmd->parsed()) continue;
            truthrl::RunOptions opts;
            opts.stage = s.stage;
            if (!common.policy_path.empty()) opts.policy_path = common.policy_path;
            for (const auto& k : split_list(k_list)) opts.k_override.push_back(static_cast<int>(truthrl::csv::parse_int(k, "--k")));
            auto r = truthrl::run_experiment(cfg, common.out_dir, opts);
            print_rows(r);
            std::cout << "artifacts: " << r.out_dir << "\n";
        }
        return kExitOk;
    } catch (const truthrl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const truthrl::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const truthrl::JudgeUnavailableError& e) {
        std::cerr << "judge unavailable: " << e.what() << "\n";
        return kExitJudge;
    } catch (const truthrl::JudgeProtocolError& e) {
        std::cerr << "judge protocol error: " << e.what() << "\nraw reply: " << e.raw_reply() << "\n";
        return kExitJudge;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
