#include "truthrl/config.hpp"

#include <functional>
#include <map>

#include "truthrl/csv.hpp"
#include "truthrl/errors.hpp"

namespace truthrl {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::prompting: return "prompting";
        case Method::sft: return "sft";
        case Method::rft: return "rft";
        case Method::rtuning: return "rtuning";
        case Method::dpo: return "dpo";
        case Method::iterative_dpo: return "iterative_dpo";
        case Method::truthrl_binary: return "truthrl_binary";
        case Method::truthrl_ternary: return "truthrl_ternary";
    }
    return "?";
}

Method parse_method(std::string_view s) {
    for (auto m : {Method::prompting, Method::sft, Method::rft, Method::rtuning, Method::dpo, Method::iterative_dpo,
                   Method::truthrl_binary, Method::truthrl_ternary})
        if (s == to_string(m)) return m;
    throw ValidationError("experiment.method", "unknown method '" + std::string(s) + "'");
}

bool ExperimentConfig::needs_probe() const {
    switch (method) {
        case Method::rft:
        case Method::rtuning:
        case Method::dpo:
        case Method::iterative_dpo: return true;
        case Method::truthrl_binary:
        case Method::truthrl_ternary: return reward.knowledge_enhanced;
        default: return false;
    }
}

VerifierConfig ExperimentConfig::training_verifier() const {
    VerifierConfig v = verifier;
    v.reasoning.reset();
    if (reward.reasoning != ReasoningMode::off) v.reasoning = reasoning;
    return v;
}

namespace {

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct KeySpec {
    std::string key;
    Setter set;
    Getter get;
};

std::string fmt(double v) { return csv::format_double(v); }

int to_int(std::string_view v) {
    long long x = csv::parse_int(v, "value");
    if (x < INT32_MIN || x > INT32_MAX) throw ValidationError("value", "integer out of range");
    return static_cast<int>(x);
}

bool to_bool(std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ValidationError("value", "expected true or false, got '" + std::string(v) + "'");
}

// Accepts decimals and simple fractions such as 1/3.
double to_fraction(std::string_view v) {
    auto slash = v.find('/');
    if (slash == std::string_view::npos) return csv::parse_double(v, "value");
    double num = csv::parse_double(v.substr(0, slash), "value");
    double den = csv::parse_double(v.substr(slash + 1), "value");
    if (den == 0.0) throw ValidationError("value", "zero denominator");
    return num / den;
}

std::vector<double> to_doubles(std::string_view v) {
    std::vector<double> out;
    if (csv::trim(v).empty()) return out;
    for (auto f : csv::split(v)) out.push_back(csv::parse_double(f, "value"));
    return out;
}

std::vector<int> to_ints(std::string_view v) {
    std::vector<int> out;
    if (csv::trim(v).empty()) return out;
    for (auto f : csv::split(v)) out.push_back(to_int(csv::trim(f)));
    return out;
}

std::vector<KappaShare> to_kappa_mix(std::string_view v) {
    std::vector<KappaShare> out;
    for (auto item : csv::split(v)) {
        item = csv::trim(item);
        auto colon = item.find(':');
        if (colon == std::string_view::npos) throw ValidationError("value", "expected value:fraction pairs");
        out.push_back({to_fraction(csv::trim(item.substr(0, colon))), to_fraction(csv::trim(item.substr(colon + 1)))});
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_same_v<T, double>)
            out += fmt(xs[i]);
        else
            out += std::to_string(xs[i]);
    }
    return out;
}

#define TRUTHRL_DOUBLE(KEY, FIELD)                                                         \
    KeySpec {                                                                              \
        KEY, [](ExperimentConfig& c, std::string_view v) { c.FIELD = csv::parse_double(v, "value"); }, \
            [](const ExperimentConfig& c) { return fmt(c.FIELD); }                         \
    }
#define TRUTHRL_INT(KEY, FIELD)                                                                    \
    KeySpec {                                                                                      \
        KEY, [](ExperimentConfig& c, std::string_view v) { c.FIELD = to_int(v); },                 \
            [](const ExperimentConfig& c) { return std::to_string(c.FIELD); }                      \
    }
#define TRUTHRL_SEED(KEY, FIELD)                                                                   \
    KeySpec {                                                                                      \
        KEY, [](ExperimentConfig& c, std::string_view v) { c.seeds.FIELD = csv::parse_u64(v, "value"); }, \
            [](const ExperimentConfig& c) { return std::to_string(c.seeds.FIELD); }                \
    }

const std::vector<KeySpec>& registry() {
    static const std::vector<KeySpec> keys = {
        {"experiment.method", [](ExperimentConfig& c, std::string_view v) { c.method = parse_method(v); },
         [](const ExperimentConfig& c) { return std::string(to_string(c.method)); }},
        {"experiment.mode", [](ExperimentConfig& c, std::string_view v) { c.mode = parse_mode(v); },
         [](const ExperimentConfig& c) { return std::string(to_string(c.mode)); }},
        TRUTHRL_INT("experiment.workers", workers),

        {"bank.path", [](ExperimentConfig& c, std::string_view v) { c.bank_path = std::string(v); },
         [](const ExperimentConfig& c) { return c.bank_path; }},
        TRUTHRL_INT("bank.simple", bank.simple),
        TRUTHRL_INT("bank.comparison", bank.comparison),
        TRUTHRL_INT("bank.false_premise", bank.false_premise),
        TRUTHRL_INT("bank.k_min", bank.k_min),
        TRUTHRL_INT("bank.k_max", bank.k_max),
        {"bank.kappa", [](ExperimentConfig& c, std::string_view v) { c.bank.kappa_mix = to_kappa_mix(v); },
         [](const ExperimentConfig& c) {
             std::string out;
             for (std::size_t i = 0; i < c.bank.kappa_mix.size(); ++i) {
                 if (i) out += ", ";
                 out += fmt(c.bank.kappa_mix[i].value) + ":" + fmt(c.bank.kappa_mix[i].fraction);
             }
             return out;
         }},
        TRUTHRL_DOUBLE("bank.rho", bank.rho),

        TRUTHRL_DOUBLE("prior.gold_bias", prior.gold_bias),
        TRUTHRL_DOUBLE("prior.confab_bias", prior.confab_bias),
        TRUTHRL_DOUBLE("prior.abstain_bias", prior.abstain_bias),
        TRUTHRL_DOUBLE("prior.background_shift", prior.background_shift),
        TRUTHRL_DOUBLE("prior.noise", prior.noise),

        {"reward.base", [](ExperimentConfig& c, std::string_view v) { c.reward.base = parse_base_reward(v); },
         [](const ExperimentConfig& c) { return std::string(to_string(c.reward.base)); }},
        {"reward.knowledge_enhanced",
         [](ExperimentConfig& c, std::string_view v) { c.reward.knowledge_enhanced = to_bool(v); },
         [](const ExperimentConfig& c) { return std::string(c.reward.knowledge_enhanced ? "true" : "false"); }},
        {"reward.reasoning", [](ExperimentConfig& c, std::string_view v) { c.reward.reasoning = parse_reasoning_mode(v); },
         [](const ExperimentConfig& c) { return std::string(to_string(c.reward.reasoning)); }},
        TRUTHRL_DOUBLE("reward.lambda", reward.lambda),

        TRUTHRL_DOUBLE("reasoning.p_correct", reasoning.p_correct),
        TRUTHRL_DOUBLE("reasoning.p_uncertain", reasoning.p_uncertain),
        TRUTHRL_DOUBLE("reasoning.p_hallucinated", reasoning.p_hallucinated),

        TRUTHRL_INT("grpo.group_size", grpo.group_size),
        TRUTHRL_DOUBLE("grpo.epsilon", grpo.epsilon),
        TRUTHRL_DOUBLE("grpo.beta", grpo.beta),
        TRUTHRL_DOUBLE("grpo.learning_rate", grpo.learning_rate),
        TRUTHRL_INT("grpo.steps", grpo.steps),
        TRUTHRL_INT("grpo.batch_size", grpo.batch_size),
        TRUTHRL_INT("grpo.inner_epochs", grpo.inner_epochs),
        TRUTHRL_DOUBLE("grpo.std_guard", grpo.std_guard),
        {"grpo.std",
         [](ExperimentConfig& c, std::string_view v) {
             if (v != "population" && v != "sample") throw ValidationError("value", "expected population or sample");
             c.grpo.population_std = v == "population";
         },
         [](const ExperimentConfig& c) { return std::string(c.grpo.population_std ? "population" : "sample"); }},
        {"grpo.reference", [](ExperimentConfig& c, std::string_view v) { c.grpo.reference = parse_reference_policy(v); },
         [](const ExperimentConfig& c) { return std::string(to_string(c.grpo.reference)); }},
        TRUTHRL_INT("grpo.checkpoint_every", grpo.checkpoint_every),

        TRUTHRL_DOUBLE("sft.learning_rate", sft.learning_rate),
        TRUTHRL_INT("sft.epochs", sft.epochs),

        TRUTHRL_INT("probe.samples", probe_samples),
        {"probe.mode", [](ExperimentConfig& c, std::string_view v) { c.probe_mode = parse_mode(v); },
         [](const ExperimentConfig& c) { return std::string(to_string(c.probe_mode)); }},

        TRUTHRL_INT("rft.samples", rft.samples),
        TRUTHRL_DOUBLE("rft.temperature", rft.temperature),

        TRUTHRL_DOUBLE("dpo.beta", dpo.beta),
        TRUTHRL_DOUBLE("dpo.learning_rate", dpo.learning_rate),
        TRUTHRL_INT("dpo.epochs", dpo.epochs),
        TRUTHRL_INT("dpo.iterations", dpo_iterations),
        {"dpo.reference", [](ExperimentConfig& c, std::string_view v) { c.dpo.reference = parse_dpo_reference(v); },
         [](const ExperimentConfig& c) { return std::string(to_string(c.dpo.reference)); }},

        {"verifier.kind", [](ExperimentConfig& c, std::string_view v) { c.verifier.kind = parse_verifier_kind(v); },
         [](const ExperimentConfig& c) { return std::string(to_string(c.verifier.kind)); }},
        TRUTHRL_DOUBLE("verifier.phi", verifier.phi),
        {"verifier.host", [](ExperimentConfig& c, std::string_view v) { c.verifier.endpoint.host = std::string(v); },
         [](const ExperimentConfig& c) { return c.verifier.endpoint.host; }},
        TRUTHRL_INT("verifier.port", verifier.endpoint.port),
        {"verifier.path", [](ExperimentConfig& c, std::string_view v) { c.verifier.endpoint.path = std::string(v); },
         [](const ExperimentConfig& c) { return c.verifier.endpoint.path; }},
        TRUTHRL_INT("verifier.attempts", verifier.endpoint.max_attempts),
        TRUTHRL_DOUBLE("verifier.backoff_ms", verifier.endpoint.backoff_base_ms),
        TRUTHRL_INT("verifier.max_in_flight", verifier.endpoint.max_in_flight),
        TRUTHRL_DOUBLE("verifier.timeout_s", verifier.endpoint.timeout_s),

        TRUTHRL_DOUBLE("eval.w1", weights.w1),
        TRUTHRL_DOUBLE("eval.w2", weights.w2),
        TRUTHRL_DOUBLE("eval.w3", weights.w3),
        {"eval.judge",
         [](ExperimentConfig& c, std::string_view v) {
             if (v != "exact" && v != "training") throw ValidationError("value", "expected exact or training");
             c.eval_judge = v == "exact" ? EvalJudge::exact : EvalJudge::training;
         },
         [](const ExperimentConfig& c) { return std::string(c.eval_judge == EvalJudge::exact ? "exact" : "training"); }},
        {"eval.confidence_edges", [](ExperimentConfig& c, std::string_view v) { c.confidence_edges = to_doubles(v); },
         [](const ExperimentConfig& c) { return join(c.confidence_edges); }},

        {"majority.k", [](ExperimentConfig& c, std::string_view v) { c.majority_k = to_ints(v); },
         [](const ExperimentConfig& c) { return join(c.majority_k); }},
        {"majority.rule", [](ExperimentConfig& c, std::string_view v) { c.majority_rule = parse_majority_rule(v); },
         [](const ExperimentConfig& c) { return std::string(to_string(c.majority_rule)); }},
        {"majority.shared_episodes",
         [](ExperimentConfig& c, std::string_view v) { c.majority_shared_episodes = to_bool(v); },
         [](const ExperimentConfig& c) { return std::string(c.majority_shared_episodes ? "true" : "false"); }},

        TRUTHRL_SEED("seeds.bank", bank),
        TRUTHRL_SEED("seeds.train", train),
        TRUTHRL_SEED("seeds.probe", probe),
        TRUTHRL_SEED("seeds.eval", eval),
    };
    return keys;
}

#undef TRUTHRL_DOUBLE
#undef TRUTHRL_INT
#undef TRUTHRL_SEED

const KeySpec* find_key(std::string_view key) {
    for (const auto& k : registry())
        if (k.key == key) return &k;
    return nullptr;
}

void apply(ExperimentConfig& c, std::string_view key, std::string_view value, int line) {
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError(line, std::string(key), "unknown key");
    try {
        spec->set(c, value);
    } catch (const ValidationError& e) {
        throw ConfigError(line, std::string(key), e.field() == key ? e.message() : std::string(e.what()));
    }
    c.explicit_keys.insert(std::string(key));
}

template <class F>
void check(const char* section, F&& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        std::string key = e.field();
        if (key.find('.') == std::string::npos) key = std::string(section) + "." + key;
        throw ConfigError(0, key, e.field() == key || key.ends_with("." + e.field()) ? e.message() : std::string(e.what()));
    }
}

void finalize(ExperimentConfig& c) {
    for (const char* s : {"seeds.bank", "seeds.train", "seeds.probe", "seeds.eval"})
        if (!c.explicit_keys.count(s)) throw ConfigError(0, s, "required seed is missing");

    if (c.is_grpo()) {
        if (c.explicit_keys.count("reward.base"))
            c.method = c.reward.base == BaseReward::binary ? Method::truthrl_binary : Method::truthrl_ternary;
        else
            c.reward.base = c.method == Method::truthrl_binary ? BaseReward::binary : BaseReward::ternary;
    }

    c.bank.seed = c.seeds.bank;
    c.grpo.seed = c.seeds.train;
    c.dpo.seed = c.seeds.train;
    c.grpo.workers = c.workers;

    if (c.workers < 1) throw ConfigError(0, "experiment.workers", "must be >= 1");
    if (c.bank_path.empty()) check("bank", [&] { c.bank.validate(); });
    check("prior", [&] { c.prior.validate(); });
    check("reward", [&] { c.reward.validate(); });
    check("reasoning", [&] { c.reasoning.validate(); });
    check("grpo", [&] { c.grpo.validate(); });
    check("sft", [&] { c.sft.validate(); });
    check("rft", [&] { c.rft.validate(); });
    check("dpo", [&] { c.dpo.validate(); });
    check("verifier", [&] { c.verifier.validate(); });
    check("eval", [&] { c.weights.validate(); });
    if (c.probe_samples < 1) throw ConfigError(0, "probe.samples", "must be >= 1");
    if (c.dpo_iterations < 1) throw ConfigError(0, "dpo.iterations", "must be >= 1");
    const auto& e = c.confidence_edges;
    if (e.size() < 2 || e.front() != 0.0 || e.back() != 1.0)
        throw ConfigError(0, "eval.confidence_edges", "must span [0, 1]");
    for (std::size_t i = 1; i < e.size(); ++i)
        if (!(e[i] > e[i - 1])) throw ConfigError(0, "eval.confidence_edges", "must be strictly increasing");
    for (int k : c.majority_k)
        if (k < 1) throw ConfigError(0, "majority.k", "entries must be >= 1");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig c;
    std::string section;
    auto ls = csv::lines(text);
    for (std::size_t i = 0; i < ls.size(); ++i) {
        const int line = static_cast<int>(i + 1);
        std::string_view raw = ls[i];
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        raw = csv::trim(raw);
        if (raw.empty()) continue;
        if (raw.front() == '[') {
            if (raw.back() != ']') throw ConfigError(line, "", "malformed section header");
            section = std::string(csv::trim(raw.substr(1, raw.size() - 2)));
            if (section.empty()) throw ConfigError(line, "", "empty section name");
            continue;
        }
        auto eq = raw.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line, "", "expected key = value");
        auto name = csv::trim(raw.substr(0, eq));
        auto value = csv::trim(raw.substr(eq + 1));
        if (name.empty()) throw ConfigError(line, "", "empty key");
        if (section.empty()) throw ConfigError(line, std::string(name), "key outside of a section");
        std::string key = section + "." + std::string(name);
        if (c.explicit_keys.count(key)) throw ConfigError(line, key, "duplicate key");
        apply(c, key, value, line);
    }
    finalize(c);
    return c;
}

void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value) {
    apply(config, key, csv::trim(value), 0);
    finalize(config);
}

std::string resolved_config(const ExperimentConfig& config) {
    std::string out;
    std::string section;
    for (const auto& k : registry()) {
        auto dot = k.key.find('.');
        std::string sec = k.key.substr(0, dot);
        if (k.key == "bank.path" && config.bank_path.empty()) continue;
        if (sec != section) {
            if (!section.empty()) out += '\n';
            out += "[" + sec + "]\n";
            section = sec;
        }
        out += k.key.substr(dot + 1) + " = " + k.get(config) + "\n";
    }
    return out;
}

std::vector<std::string> known_config_keys() {
    std::vector<std::string> out;
    for (const auto& k : registry()) out.push_back(k.key);
    return out;
}

}  // namespace truthrl
