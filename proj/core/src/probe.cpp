#include "truthrl/probe.hpp"

#include <algorithm>

#include "parallel.hpp"
#include "truthrl/csv.hpp"
#include "truthrl/errors.hpp"

namespace truthrl {

int OokReport::count_ook() const { return static_cast<int>(std::count(is_ook.begin(), is_ook.end(), true)); }

std::string OokReport::to_csv() const {
    std::string out = "question_id,is_ook,hits,N\n";
    for (std::size_t i = 0; i < is_ook.size(); ++i)
        out += std::to_string(i) + ',' + (is_ook[i] ? "1" : "0") + ',' + std::to_string(hits[i]) + ',' +
               std::to_string(samples) + '\n';
    return out;
}

OokReport OokReport::from_csv(std::string_view text) {
    auto ls = csv::lines(text);
    if (ls.empty() || csv::trim(ls[0]) != "question_id,is_ook,hits,N")
        throw ValidationError("ook", "missing or malformed header");
    OokReport r;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        if (csv::trim(ls[i]).empty()) continue;
        auto f = csv::split(ls[i]);
        if (f.size() != 4) throw ValidationError("ook", "line " + std::to_string(i + 1) + ": expected 4 fields");
        if (csv::parse_int(f[0], "question_id") != static_cast<long long>(r.is_ook.size()))
            throw ValidationError("ook", "question ids must be contiguous from 0");
        int hits = static_cast<int>(csv::parse_int(f[2], "hits"));
        bool flag = csv::parse_int(f[1], "is_ook") != 0;
        if (flag != (hits == 0)) throw ValidationError("ook", "is_ook must equal (hits == 0)");
        r.is_ook.push_back(flag);
        r.hits.push_back(hits);
        r.samples = static_cast<int>(csv::parse_int(f[3], "N"));
    }
    return r;
}

OokReport probe_ook(const Policy& policy, const QuestionBank& bank, int samples, Mode mode, const Verifier& verifier,
                    std::uint64_t seed, int workers) {
    if (samples < 1) throw ValidationError("probe.samples", "must be >= 1");
    if (policy.num_questions() != bank.size()) throw ShapeError("policy does not cover the bank");
    OokReport r;
    r.samples = samples;
    r.hits.assign(static_cast<std::size_t>(bank.size()), 0);
    detail::parallel_for(bank.size(), workers, [&](int id) {
        const auto& q = bank.at(id);
        auto p = action_distribution(policy, id);
        Rng rng = derive_stream(seed, {tag("probe"), static_cast<std::uint64_t>(id)});
        int hits = 0;
        for (int s = 0; s < samples; ++s) {
            int a = sample_index(p, rng);
            Episode e = realize_episode(q, mode, rng);
            hits += verifier.judge(q, e, a, rng).label == Label::correct;
        }
        r.hits[static_cast<std::size_t>(id)] = hits;
    });
    r.is_ook.resize(r.hits.size());
    for (std::size_t i = 0; i < r.hits.size(); ++i) r.is_ook[i] = r.hits[i] == 0;
    return r;
}

}  // namespace truthrl
