// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "truthrl/baselines.hpp"
#include "truthrl/config.hpp"
#include "truthrl/csv.hpp"
#include "truthrl/experiment.hpp"
#include "truthrl/grpo.hpp"
#include "truthrl/metrics.hpp"
#include "truthrl/policy.hpp"
#include "truthrl/reward.hpp"

using namespace truthrl;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

const fs::path kRoot = fs::temp_directory_path() / "truthrl-acceptance";

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string seeds_block(int s) {
    std::ostringstream o;
    o << "[seeds]\nbank = " << s << "\ntrain = " << 100 + s << "\nprobe = " << 200 + s << "\neval = " << 300 + s
      << "\n";
    return o.str();
}

RunResult run(const std::string& name, const std::string& text) {
    auto dir = kRoot / name;
    fs::remove_all(dir);
    return run_experiment(parse_config(text), dir.string());
}

const Scoreboard& last_board(const RunResult& r) { return r.scoreboard.back().board; }

// --- analytic criteria -------------------------------------------------------

Verdict reward_tables() {
    Verdict v;
    auto expect = [&](bool ok, const std::string& what) {
        if (!ok) {
            v.pass = false;
            v.detail += what + "; ";
        }
    };
    const Label C = Label::correct, U = Label::uncertain, H = Label::hallucinated;
    expect(reward_binary(C) == 1 && reward_binary(U) == -1 && reward_binary(H) == -1, "binary table");
    expect(reward_ternary(C) == 1 && reward_ternary(U) == 0 && reward_ternary(H) == -1, "ternary table");
    for (BaseReward b : {BaseReward::binary, BaseReward::ternary}) {
        expect(reward_knowledge_enhanced(U, true, b) == 1, "ook uncertain");
        expect(reward_knowledge_enhanced(C, true, b) == -1 && reward_knowledge_enhanced(H, true, b) == -1,
               "ook other");
        for (Label l : {C, U, H})
            expect(reward_knowledge_enhanced(l, false, b) ==
                       (b == BaseReward::binary ? reward_binary(l) : reward_ternary(l)),
                   "non-ook falls back to base");
    }
    const double lambda = 0.5;
    int cells = 0;
    for (double r : {-1.0, 0.0, 1.0})
        for (int bit : {0, 1}) {
            double rr = bit;
            expect(combine_reasoning(r, bit, ReasoningMode::multiplicative, lambda) == r * (1 + rr), "multiplicative");
            expect(combine_reasoning(r, bit, ReasoningMode::additive, lambda) == r + lambda * rr, "additive");
            expect(combine_reasoning(r, bit, ReasoningMode::conditional, lambda) == (r == 1 ? r * rr : r),
                   "conditional");
            cells += 3;
        }
    if (v.pass) v.detail = "tables exact; " + std::to_string(cells) + " reasoning cells exact";
    return v;
}

Verdict advantage_ordering() {
    Rng rng(20251);
    int trials = 0;
    double min_gap = 1e300, max_binary = 0;
    while (trials < 1000) {
        int g = 2 + static_cast<int>(rng.index(15));
        std::vector<Label> labels(static_cast<std::size_t>(g));
        for (auto& l : labels) l = static_cast<Label>(rng.index(3));
        bool has_u = std::count(labels.begin(), labels.end(), Label::uncertain) > 0;
        bool has_h = std::count(labels.begin(), labels.end(), Label::hallucinated) > 0;
        if (!has_u || !has_h) continue;
        ++trials;
        std::vector<double> rt, rb;
        for (Label l : labels) {
            rt.push_back(reward_ternary(l));
            rb.push_back(reward_binary(l));
        }
        auto at = group_advantages(rt), ab = group_advantages(rb);
        for (std::size_t i = 0; i < labels.size(); ++i)
            for (std::size_t j = 0; j < labels.size(); ++j)
                if (labels[i] == Label::uncertain && labels[j] == Label::hallucinated) {
                    min_gap = std::min(min_gap, at[i] - at[j]);
                    max_binary = std::max(max_binary, std::abs(ab[i] - ab[j]));
                }
    }
    Verdict v;
    v.pass = min_gap > 0 && max_binary <= 1e-12;
    v.detail = "1000 groups; min ternary gap " + fmt(min_gap) + ", max binary gap " + std::to_string(max_binary);
    return v;
}

Verdict advantage_hand_cases() {
    auto a = group_advantages(std::vector<double>{0, -1});
    auto b = group_advantages(std::vector<double>{1, 0, -1});
    auto z = group_advantages(std::vector<double>{1, 1, 1, 1});
    auto z2 = group_advantages(std::vector<double>{-1, -1});
    const double s = std::sqrt(1.5);
    Verdict v;
    v.pass = a[0] == 1 && a[1] == -1 && std::abs(b[0] - 1.2247) <= 1e-4 && std::abs(b[2] + 1.2247) <= 1e-4 &&
             std::abs(b[0] - s) < 1e-12 && b[1] == 0 &&
             std::all_of(z.begin(), z.end(), [](double x) { return x == 0; }) && z2[0] == 0 && z2[1] == 0;
    v.detail = "(0,-1)->(" + fmt(a[0]) + "," + fmt(a[1]) + "); (1,0,-1)->(" + fmt(b[0]) + "," + fmt(b[1]) + "," +
               fmt(b[2]) + "); constant groups -> 0";
    return v;
}

std::vector<double> log_softmax_of(const std::vector<double>& x) {
    double m = *std::max_element(x.begin(), x.end()), z = 0;
    for (double v : x) z += std::exp(v - m);
    std::vector<double> out;
    for (double v : x) out.push_back(v - m - std::log(z));
    return out;
}

double oracle_surrogate(const std::vector<double>& th, const std::vector<double>& old, const std::vector<double>& ref,
                        const GroupRollout& g, double eps, double beta) {
    auto lp = log_softmax_of(th), lo = log_softmax_of(old), lr = log_softmax_of(ref);
    double v = 0;
    for (const auto& s : g.samples) {
        double w = std::exp(lp[s.action] - lo[s.action]);
        v += std::min(w * s.advantage, std::clamp(w, 1 - eps, 1 + eps) * s.advantage);
    }
    v /= static_cast<double>(g.samples.size());
    double kl = 0;
    for (std::size_t j = 0; j < lp.size(); ++j) kl += std::exp(lp[j]) * (lp[j] - lr[j]);
    return v - beta * kl;
}

double oracle_dpo(const std::vector<double>& th, const std::vector<double>& ref, int w, int l, double beta) {
    auto lp = log_softmax_of(th), lr = log_softmax_of(ref);
    double m = beta * ((lp[w] - lr[w]) - (lp[l] - lr[l]));
    return std::log1p(std::exp(-m));
}

QuestionBank single_question_bank(int k) {
    Question q;
    q.num_candidates = k;
    return QuestionBank({q}, 0);
}

// Norm-wise relative error between an analytic gradient and central differences.
double fd_error(const std::vector<double>& grad, const std::vector<double>& theta,
                const std::function<double(const std::vector<double>&)>& f) {
    const double h = 1e-5;
    double num = 0, den = 0;
    for (std::size_t j = 0; j < theta.size(); ++j) {
        auto tp = theta, tm = theta;
        tp[j] += h;
        tm[j] -= h;
        double fd = (f(tp) - f(tm)) / (2 * h);
        num += (grad[j] - fd) * (grad[j] - fd);
        den += std::max(grad[j] * grad[j], fd * fd);
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

Verdict gradient_checks() {
    Rng rng(4242);
    double worst_s = 0, worst_d = 0;
    int done = 0, skipped = 0;
    while (done < 100) {
        int k = 2 + static_cast<int>(rng.index(7));
        auto bank = single_question_bank(k);
        Policy th(bank), old(bank), ref(bank);
        for (int j = 0; j <= k; ++j) {
            old.row(0)[j] = rng.normal();
            th.row(0)[j] = old.row(0)[j] + 0.3 * rng.normal();
            ref.row(0)[j] = rng.normal();
        }
        GroupRollout g;
        int G = 2 + static_cast<int>(rng.index(7));
        std::vector<double> rewards;
        for (int i = 0; i < G; ++i) {
            RolloutSample s;
            s.action = static_cast<int>(rng.index(static_cast<std::uint64_t>(k + 1)));
            g.samples.push_back(s);
            rewards.push_back(static_cast<double>(rng.index(3)) - 1);
        }
        auto adv = group_advantages(rewards);
        for (std::size_t i = 0; i < adv.size(); ++i) g.samples[i].advantage = adv[i];
        const double eps = 0.2, beta = 0.5 * rng.uniform();
        std::vector<double> tv(th.row(0).begin(), th.row(0).end()), ov(old.row(0).begin(), old.row(0).end()),
            rv(ref.row(0).begin(), ref.row(0).end());
        auto lp = log_softmax_of(tv), lo = log_softmax_of(ov);
        bool boundary = false;
        for (const auto& s : g.samples) {
            double w = std::exp(lp[s.action] - lo[s.action]);
            boundary = boundary || std::abs(w - (1 - eps)) < 1e-3 || std::abs(w - (1 + eps)) < 1e-3;
        }
        if (boundary) {
            ++skipped;
            continue;
        }
        auto grad = surrogate_gradient(th, snapshot(old, SnapshotTag::old), snapshot(ref, SnapshotTag::reference), g,
                                       eps, beta);
        worst_s = std::max(worst_s, fd_error(grad, tv, [&](const std::vector<double>& x) {
                               return oracle_surrogate(x, ov, rv, g, eps, beta);
                           }));
        ++done;
    }
    for (int t = 0; t < 100; ++t) {
        int k = 2 + static_cast<int>(rng.index(7));
        auto bank = single_question_bank(k);
        Policy th(bank), ref(bank);
        for (int j = 0; j <= k; ++j) {
            th.row(0)[j] = 2 * rng.normal();
            ref.row(0)[j] = 2 * rng.normal();
        }
        int w = static_cast<int>(rng.index(static_cast<std::uint64_t>(k + 1)));
        int l = (w + 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(k)))) % (k + 1);
        double beta = 0.05 + rng.uniform();
        auto res = dpo_gradient(th, snapshot(ref, SnapshotTag::reference), PreferencePair{0, w, l}, beta);
        std::vector<double> tv(th.row(0).begin(), th.row(0).end()), rv(ref.row(0).begin(), ref.row(0).end());
        worst_d = std::max(worst_d, fd_error(res.gradient, tv, [&](const std::vector<double>& x) {
                               return oracle_dpo(x, rv, w, l, beta);
                           }));
    }
    Verdict v;
    v.pass = worst_s <= 1e-4 && worst_d <= 1e-4;
    char buf[160];
    std::snprintf(buf, sizeof buf, "max rel err surrogate %.2e (%d boundary configs skipped), dpo %.2e", worst_s,
                  skipped, worst_d);
    v.detail = buf;
    return v;
}

Verdict metric_identity() {
    Rng rng(77);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        Tally t;
        t.correct = static_cast<long>(rng.index(1000));
        t.uncertain = static_cast<long>(rng.index(1000));
        t.hallucinated = static_cast<long>(rng.index(1000)) + 1;
        auto s = make_scoreboard(t, Weights{1, 0, 1});
        worst = std::max(worst, std::abs(s.truthfulness - (s.acc - s.hall)));
    }
    double table = truthfulness(0.488, 0.077, 0.435, Weights{1, 0, 1});
    Verdict v;
    v.pass = worst <= 1e-12 && table == 0.488 - 0.435 && fmt(table) == "0.053";
    v.detail = "max |T-(acc-hall)| " + std::to_string(worst) + "; 0.488-0.435 -> " + fmt(table);
    return v;
}

Verdict kl_dpo_anchors() {
    Rng rng(99);
    bool kl_zero = true;
    double worst = 0;
    for (int t = 0; t < 200; ++t) {
        int k = 2 + static_cast<int>(rng.index(30));
        auto bank = single_question_bank(k);
        Policy p(bank);
        for (int j = 0; j <= k; ++j) p.row(0)[j] = 5 * rng.normal();
        kl_zero = kl_zero && kl_divergence(p, snapshot(p, SnapshotTag::reference), 0) == 0.0;
        int w = static_cast<int>(rng.index(static_cast<std::uint64_t>(k + 1)));
        int l = (w + 1) % (k + 1);
        double loss = dpo_gradient(p, snapshot(p, SnapshotTag::reference), PreferencePair{0, w, l}, 0.1).loss;
        worst = std::max(worst, std::abs(loss - std::log(2.0)));
    }
    Verdict v;
    v.pass = kl_zero && worst <= 1e-12;
    v.detail = std::string("KL(pi,pi) ") + (kl_zero ? "exactly 0" : "nonzero") + " on 200 policies; max |loss-ln2| " +
               std::to_string(worst);
    return v;
}

// --- pipeline criteria -------------------------------------------------------

constexpr int kSeeds = 5;

const std::string kMixed = "[bank]\nsimple = 150\nk_min = 256\nk_max = 256\nkappa = 0:1/3, 0.5:1/3, 1:1/3\nrho = 0.6\n";

std::string method_cfg(const std::string& method, const std::string& mode, int seed, const std::string& extra = "") {
    return "[experiment]\nmethod = " + method + "\nmode = " + mode + "\n" + kMixed + extra + seeds_block(seed);
}

struct MixedRuns {
    // method -> per-seed results in no_retrieval mode
    std::map<std::string, std::vector<RunResult>> nr;
    std::map<std::string, std::vector<RunResult>> ret;
    std::vector<RunResult> noisy;
};

MixedRuns run_mixed() {
    MixedRuns m;
    const std::vector<std::string> methods{"prompting", "sft", "rft", "rtuning", "dpo", "iterative_dpo",
                                           "truthrl_binary", "truthrl_ternary"};
    for (int s = 1; s <= kSeeds; ++s) {
        for (const auto& method : methods)
            m.nr[method].push_back(
                run("mixed-" + method + "-" + std::to_string(s), method_cfg(method, "no_retrieval", s)));
        for (const std::string method : {"sft", "rtuning", "truthrl_ternary"})
            m.ret[method].push_back(
                run("retrieval-" + method + "-" + std::to_string(s), method_cfg(method, "retrieval", s)));
        m.noisy.push_back(run("noisy-" + std::to_string(s),
                              method_cfg("truthrl_ternary", "no_retrieval", s,
                                         "[verifier]\nkind = noisy_strict\nphi = 0.9\n")));
    }
    return m;
}

double med(const std::vector<RunResult>& rs, const std::function<double(const RunResult&)>& f) {
    std::vector<double> v;
    for (const auto& r : rs) v.push_back(f(r));
    return median(v);
}

double acc_of(const RunResult& r) { return last_board(r).acc; }
double unc_of(const RunResult& r) { return last_board(r).unc; }
double hall_of(const RunResult& r) { return last_board(r).hall; }
double t_of(const RunResult& r) { return last_board(r).truthfulness; }
double best_t(const RunResult& r) {
    double b = -2;
    for (const auto& row : r.scoreboard) b = std::max(b, row.board.truthfulness);
    return b;
}
double kappa0_hall(const RunResult& r) { return last_board(r).slices.at("kappa:[0,0.1)").hall; }

Verdict abstention_incentive() {
    auto start = std::chrono::steady_clock::now();
    const std::string bank = "[bank]\nsimple = 50\nk_min = 4\nk_max = 4\nkappa = 0:1\n";
    std::vector<double> tu, th, bu, bh;
    for (int s = 1; s <= kSeeds; ++s) {
        auto t = run("c5-ternary-" + std::to_string(s), "[experiment]\nmethod = truthrl_ternary\n" + bank + seeds_block(s));
        auto b = run("c5-binary-" + std::to_string(s), "[experiment]\nmethod = truthrl_binary\n" + bank + seeds_block(s));
        tu.push_back(unc_of(t));
        th.push_back(hall_of(t));
        bu.push_back(unc_of(b));
        bh.push_back(hall_of(b));
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Verdict v;
    v.pass = median(tu) >= 0.95 && median(th) <= 0.05 && median(bu) <= 0.05 && median(bh) >= 0.70 && secs < 60;
    v.detail = "ternary unc " + fmt(median(tu)) + " hall " + fmt(median(th)) + "; binary unc " + fmt(median(bu)) +
               " hall " + fmt(median(bh)) + "; " + fmt(secs) + " s";
    return v;
}

Verdict truthfulness_ordering(const MixedRuns& m) {
    double ter = med(m.nr.at("truthrl_ternary"), t_of), bin = med(m.nr.at("truthrl_binary"), t_of),
           sft = med(m.nr.at("sft"), t_of);
    double bin_acc = med(m.nr.at("truthrl_binary"), acc_of);
    double best_other = -1;
    std::string best_name;
    for (const std::string name : {"sft", "rft", "rtuning", "dpo", "iterative_dpo", "truthrl_ternary"}) {
        double a = med(m.nr.at(name), acc_of);
        if (a > best_other) {
            best_other = a;
            best_name = name;
        }
    }
    Verdict v;
    v.pass = ter > bin && ter > sft && bin_acc >= best_other;
    v.detail = "T ternary " + fmt(ter) + " binary " + fmt(bin) + " sft " + fmt(sft) + "; acc binary " + fmt(bin_acc) +
               " vs best other " + best_name + " " + fmt(best_other);
    return v;
}

Verdict sft_amplification(const MixedRuns& m) {
    double unc = med(m.nr.at("sft"), unc_of);
    double h_sft = med(m.nr.at("sft"), kappa0_hall), h_base = med(m.nr.at("prompting"), kappa0_hall);
    Verdict v;
    v.pass = unc < 0.01 && h_sft > h_base;
    v.detail = "sft unc " + fmt(unc) + "; kappa=0 hall sft " + fmt(h_sft) + " vs untrained " + fmt(h_base);
    return v;
}

Verdict rtuning_tradeoff(const MixedRuns& m) {
    double rt_h = med(m.ret.at("rtuning"), hall_of), sft_h = med(m.ret.at("sft"), hall_of);
    double rt_a = med(m.ret.at("rtuning"), acc_of), ter_a = med(m.ret.at("truthrl_ternary"), acc_of);
    Verdict v;
    v.pass = rt_h < sft_h && rt_a < ter_a;
    v.detail = "retrieval: hall rtuning " + fmt(rt_h) + " < sft " + fmt(sft_h) + "; acc rtuning " + fmt(rt_a) +
               " < ternary " + fmt(ter_a);
    return v;
}

Verdict verifier_collapse(const MixedRuns& m) {
    double unc = med(m.noisy, unc_of), t = med(m.noisy, t_of), exact = med(m.nr.at("truthrl_ternary"), t_of);
    Verdict v;
    v.pass = unc >= 0.90 && t >= -0.05 && t <= 0.05 && exact >= 0.3;
    v.detail = "phi=0.9: unc " + fmt(unc) + " T " + fmt(t) + "; exact judge T " + fmt(exact);
    return v;
}

Verdict dpo_ladder(const MixedRuns& m) {
    double unt = med(m.nr.at("prompting"), t_of), dpo = med(m.nr.at("dpo"), t_of),
           idpo = med(m.nr.at("iterative_dpo"), best_t), ter = med(m.nr.at("truthrl_ternary"), t_of);
    Verdict v;
    v.pass = unt < dpo && dpo < idpo && idpo < ter;
    v.detail = "T untrained " + fmt(unt) + " < dpo " + fmt(dpo) + " < iterative best " + fmt(idpo) + " < ternary " +
               fmt(ter);
    return v;
}

Verdict majority_monotone() {
    const std::vector<int> ks{1, 2, 4, 8, 16};
    std::vector<std::vector<double>> hall(ks.size());
    for (int s = 1; s <= 10; ++s) {
        auto r = run("c11-" + std::to_string(s),
                     "[experiment]\nmethod = prompting\n" + kMixed + "[majority]\nk = 1, 2, 4, 8, 16\n" + seeds_block(s));
        for (std::size_t i = 0; i < ks.size(); ++i) hall[i].push_back(r.majority[i].board.hall);
    }
    std::vector<double> h;
    for (auto& v : hall) h.push_back(median(v));
    int inversions = 0;
    bool small = true;
    for (std::size_t i = 1; i < h.size(); ++i)
        if (h[i] > h[i - 1]) {
            ++inversions;
            small = small && h[i] - h[i - 1] <= 0.02;
        }
    Verdict v;
    v.pass = h.back() <= h.front() && inversions <= 1 && small;
    v.detail = "median hall at k=1..16: ";
    for (double x : h) v.detail += fmt(x) + " ";
    v.detail += "(" + std::to_string(inversions) + " inversions)";
    return v;
}

Verdict determinism() {
    const std::vector<std::string> methods{"prompting", "sft", "rft", "rtuning", "dpo", "iterative_dpo",
                                           "truthrl_binary", "truthrl_ternary"};
    const std::string small =
        "[bank]\nsimple = 30\ncomparison = 5\nfalse_premise = 5\nk_min = 4\nk_max = 12\nkappa = 0:0.5, 1:0.5\n"
        "[grpo]\nsteps = 60\ncheckpoint_every = 20\n[majority]\nk = 1, 3\n";
    int files = 0;
    std::string bad;
    for (const auto& method : methods) {
        std::string text = "[experiment]\nmethod = " + method + "\n" + small + seeds_block(7);
        auto a = run("c13-a-" + method, text);
        auto b = run("c13-b-" + method, text);
        if (a.file_hashes != b.file_hashes) bad += method + " hashes; ";
        for (const auto& [name, h] : a.file_hashes) {
            (void)h;
            ++files;
            auto fa = csv::read_file((kRoot / ("c13-a-" + method) / name).string());
            auto fb = csv::read_file((kRoot / ("c13-b-" + method) / name).string());
            if (fa != fb) bad += method + "/" + name + "; ";
        }
        auto ma = csv::read_file((kRoot / ("c13-a-" + method) / "manifest.json").string());
        auto mb = csv::read_file((kRoot / ("c13-b-" + method) / "manifest.json").string());
        if (ma != mb) bad += method + "/manifest.json; ";
    }
    Verdict v;
    v.pass = bad.empty();
    v.detail = bad.empty() ? std::to_string(methods.size()) + " pipelines, " + std::to_string(files) +
                                 " artifacts byte-identical across reruns"
                           : "differs: " + bad;
    return v;
}

}  // namespace

// --known-red 6,9: those criteria still print FAIL but do not fail the exit status.
std::set<int> parse_known_red(int argc, char** argv) {
    std::set<int> out;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string_view(argv[i]) != "--known-red") continue;
        for (const auto& f : truthrl::csv::split(argv[i + 1])) {
            auto t = truthrl::csv::trim(f);
            if (!t.empty()) out.insert(static_cast<int>(truthrl::csv::parse_int(t, "--known-red")));
        }
    }
    return out;
}

int main(int argc, char** argv) {
    const auto known_red = parse_known_red(argc, argv);
    fs::create_directories(kRoot);
    int failed = 0;
    std::vector<int> unexpected, red;
    auto report = [&](int id, const std::string& name, const std::function<Verdict()>& fn) {
        auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !v.pass;
        if (!v.pass) (known_red.count(id) ? red : unexpected).push_back(id);
        std::printf("%s %2d %-28s %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str(), secs);
        std::fflush(stdout);
    };

    report(1, "reward-definitions", reward_tables);
    report(2, "advantage-ordering", advantage_ordering);
    report(3, "advantage-hand-cases", advantage_hand_cases);
    report(4, "gradient-checks", gradient_checks);
    report(5, "abstention-incentive", abstention_incentive);

    MixedRuns mixed;
    std::string mixed_error;
    try {
        mixed = run_mixed();
    } catch (const std::exception& e) {
        mixed_error = e.what();
    }
    auto on_mixed = [&](const std::function<Verdict(const MixedRuns&)>& f) {
        return [&, f] {
            if (!mixed_error.empty()) return Verdict{false, "mixed-bank runs failed: " + mixed_error};
            return f(mixed);
        };
    };
    report(6, "truthfulness-ordering", on_mixed(truthfulness_ordering));
    report(7, "sft-hallucination", on_mixed(sft_amplification));
    report(8, "rtuning-tradeoff", on_mixed(rtuning_tradeoff));
    report(9, "verifier-collapse", on_mixed(verifier_collapse));
    report(10, "dpo-ladder", on_mixed(dpo_ladder));
    report(11, "majority-monotonicity", majority_monotone);
    report(12, "metric-identity", metric_identity);
    report(13, "determinism", determinism);
    report(14, "kl-dpo-anchors", kl_dpo_anchors);

    std::printf("%d/14 criteria passed\n", 14 - failed);
    for (int id : red) std::printf("known red: %d\n", id);
    for (int id : known_red)
        if (std::find(red.begin(), red.end(), id) == red.end()) std::printf("known red %d passed this run\n", id);
    fs::remove_all(kRoot);
    return unexpected.empty() ? 0 : 1;
}
