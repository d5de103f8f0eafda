#include "truthrl/world.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "truthrl/csv.hpp"
#include "truthrl/errors.hpp"

namespace truthrl {

std::string_view to_string(QType t) {
    switch (t) {
        case QType::simple: return "simple";
        case QType::comparison: return "comparison";
        case QType::false_premise: return "false_premise";
    }
    return "?";
}

std::string_view to_string(Mode m) { return m == Mode::retrieval ? "retrieval" : "no_retrieval"; }

QType parse_qtype(std::string_view s) {
    if (s == "simple") return QType::simple;
    if (s == "comparison") return QType::comparison;
    if (s == "false_premise") return QType::false_premise;
    throw ValidationError("qtype", "unknown question type '" + std::string(s) + "'");
}

Mode parse_mode(std::string_view s) {
    if (s == "no_retrieval") return Mode::no_retrieval;
    if (s == "retrieval") return Mode::retrieval;
    throw ValidationError("mode", "unknown mode '" + std::string(s) + "'");
}

void Question::validate() const {
    if (num_candidates < 2) throw ValidationError("K", "must be >= 2");
    if (gold_index < 0 || gold_index >= num_candidates) throw ValidationError("gold_index", "out of [0, K)");
    if (!(kappa >= 0.0 && kappa <= 1.0)) throw ValidationError("kappa", "must lie in [0, 1]");
    if (!(rho >= 0.0 && rho <= 1.0)) throw ValidationError("rho", "must lie in [0, 1]");
    if (qtype == QType::false_premise && gold_index != num_candidates - 1)
        throw ValidationError("gold_index", "false_premise questions use the reserved index K-1");
}

void BankSpec::validate() const {
    if (simple < 0) throw ValidationError("simple", "count must be >= 0");
    if (comparison < 0) throw ValidationError("comparison", "count must be >= 0");
    if (false_premise < 0) throw ValidationError("false_premise", "count must be >= 0");
    if (k_min < 2) throw ValidationError("k_min", "must be >= 2");
    if (k_max < k_min) throw ValidationError("k_max", "must be >= k_min");
    if (!(rho >= 0.0 && rho <= 1.0)) throw ValidationError("rho", "must lie in [0, 1]");
    if (kappa_mix.empty()) throw ValidationError("kappa", "mixture is empty");
    double sum = 0.0;
    for (const auto& s : kappa_mix) {
        if (!(s.value >= 0.0 && s.value <= 1.0)) throw ValidationError("kappa", "value must lie in [0, 1]");
        if (!(s.fraction >= 0.0)) throw ValidationError("kappa", "fraction must be >= 0");
        sum += s.fraction;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("kappa", "fractions must sum to 1");
}

QuestionBank::QuestionBank(std::vector<Question> questions, std::uint64_t seed, std::optional<BankSpec> spec)
    : questions_(std::move(questions)), seed_(seed), spec_(std::move(spec)) {
    for (std::size_t i = 0; i < questions_.size(); ++i) {
        if (questions_[i].id != static_cast<int>(i))
            throw ValidationError("id", "ids must be contiguous from 0");
        questions_[i].validate();
    }
    fingerprint_ = fnv1a64(to_csv());
}

const Question& QuestionBank::at(int id) const {
    if (id < 0 || id >= size()) throw LookupError("unknown question id " + std::to_string(id));
    return questions_[static_cast<std::size_t>(id)];
}

std::string QuestionBank::to_csv() const {
    std::string out = "id,K,gold_index,kappa,rho,qtype\n";
    for (const auto& q : questions_) {
        out += std::to_string(q.id);
        out += ',';
        out += std::to_string(q.num_candidates);
        out += ',';
        out += std::to_string(q.gold_index);
        out += ',';
        out += csv::format_double(q.kappa);
        out += ',';
        out += csv::format_double(q.rho);
        out += ',';
        out += to_string(q.qtype);
        out += '\n';
    }
    return out;
}

QuestionBank QuestionBank::from_csv(std::string_view text, std::uint64_t seed) {
    auto rows = csv::lines(text);
    if (rows.empty() || csv::trim(rows[0]) != "id,K,gold_index,kappa,rho,qtype")
        throw ValidationError("bank", "missing or malformed header");
    std::vector<Question> qs;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (csv::trim(rows[i]).empty()) continue;
        auto f = csv::split(rows[i]);
        if (f.size() != 6) throw ValidationError("bank", "line " + std::to_string(i + 1) + ": expected 6 fields");
        Question q;
        q.id = static_cast<int>(csv::parse_int(f[0], "id"));
        q.num_candidates = static_cast<int>(csv::parse_int(f[1], "K"));
        q.gold_index = static_cast<int>(csv::parse_int(f[2], "gold_index"));
        q.kappa = csv::parse_double(f[3], "kappa");
        q.rho = csv::parse_double(f[4], "rho");
        q.qtype = parse_qtype(csv::trim(f[5]));
        qs.push_back(q);
    }
    return QuestionBank(std::move(qs), seed);
}

namespace {

// Largest-remainder apportionment of n slots; ties go to the earlier entry.
std::vector<int> apportion(const std::vector<KappaShare>& mix, int n) {
    std::vector<int> counts(mix.size());
    std::vector<std::pair<double, std::size_t>> rem;
    int assigned = 0;
    for (std::size_t i = 0; i < mix.size(); ++i) {
        double exact = mix[i].fraction * n;
        counts[i] = static_cast<int>(std::floor(exact + 1e-9));
        assigned += counts[i];
        rem.emplace_back(exact - counts[i], i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (std::size_t j = 0; assigned < n; ++j, ++assigned) counts[rem[j % rem.size()].second]++;
    return counts;
}

}  // namespace

QuestionBank generate_bank(const BankSpec& spec) {
    spec.validate();
    const int n = spec.total();
    Rng rng = derive_stream(spec.seed, {tag("bank")});

    std::vector<double> kappas;
    kappas.reserve(static_cast<std::size_t>(n));
    auto counts = apportion(spec.kappa_mix, n);
    for (std::size_t i = 0; i < counts.size(); ++i)
        kappas.insert(kappas.end(), static_cast<std::size_t>(counts[i]), spec.kappa_mix[i].value);
    shuffle(std::span<double>(kappas), rng);

    std::vector<Question> qs;
    qs.reserve(static_cast<std::size_t>(n));
    auto emit = [&](int count, QType t) {
        for (int i = 0; i < count; ++i) {
            Question q;
            q.id = static_cast<int>(qs.size());
            auto span = static_cast<std::uint64_t>(spec.k_max - spec.k_min + 1);
            q.num_candidates = spec.k_min + static_cast<int>(rng.index(span));
            int drawn = static_cast<int>(rng.index(static_cast<std::uint64_t>(q.num_candidates)));
            q.gold_index = t == QType::false_premise ? q.num_candidates - 1 : drawn;
            q.kappa = kappas[static_cast<std::size_t>(q.id)];
            q.rho = spec.rho;
            q.qtype = t;
            qs.push_back(q);
        }
    };
    emit(spec.simple, QType::simple);
    emit(spec.comparison, QType::comparison);
    emit(spec.false_premise, QType::false_premise);
    return QuestionBank(std::move(qs), spec.seed, spec);
}

double effective_knowability(const Question& q, Mode mode) {
    if (mode == Mode::no_retrieval) return q.kappa;
    return q.kappa + (1.0 - q.kappa) * q.rho;
}

Episode realize_episode(const Question& q, Mode mode, Rng& rng) {
    double u = rng.uniform();
    int resample = static_cast<int>(rng.index(static_cast<std::uint64_t>(q.num_candidates)));
    Episode e;
    e.question_id = q.id;
    e.mode = mode;
    e.num_candidates = q.num_candidates;
    e.realized_gold = u < effective_knowability(q, mode) ? q.gold_index : resample;
    return e;
}

double gold_ceiling(const Question& q, Mode mode) {
    double e = effective_knowability(q, mode);
    return e + (1.0 - e) / q.num_candidates;
}

}  // namespace truthrl
