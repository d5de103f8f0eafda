#pragma once

#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "truthrl/rng.hpp"
#include "truthrl/world.hpp"

namespace truthrl {

enum class Label { correct, uncertain, hallucinated };
std::string_view to_string(Label l);

struct Outcome {
    Label label = Label::hallucinated;
    std::optional<bool> reasoning_ok;
};

struct ReasoningProfile {
    double p_correct = 0.92;
    double p_uncertain = 0.0;
    double p_hallucinated = 0.121;

    double probability(Label l) const;
    void validate() const;
};

Outcome judge_exact(const Episode& episode, int action);
// Downgrades Correct to Hallucinated with probability phi; draws only on Correct.
Outcome judge_noisy_strict(const Episode& episode, int action, double phi, Rng& rng);
// One draw.
bool reasoning_score(const Outcome& outcome, const ReasoningProfile& profile, Rng& rng);

enum class JudgeTemplate { outcome, reasoning };

struct JudgeRequest {
    std::string question;
    std::string reference;
    std::string prediction;
    std::string reasoning;
    std::string examples;
    JudgeTemplate template_id = JudgeTemplate::outcome;
};

std::string_view judge_template(JudgeTemplate id);
std::string render_prompt(const JudgeRequest& request);

// Maps a judge reply body to an Outcome or throws JudgeProtocolError.
Outcome parse_judge_reply(std::string_view body, std::string_view prediction);
bool is_abstention_marker(std::string_view prediction);

struct EndpointConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string path = "/judge";
    int max_attempts = 3;
    double backoff_base_ms = 100.0;
    int max_in_flight = 4;
    double timeout_s = 10.0;
    void validate() const;
};

// HTTP client for an external judge. Thread-safe; at most max_in_flight
// requests are outstanding at once.
class JudgeClient {
public:
    using Sleeper = std::function<void(double ms)>;

    explicit JudgeClient(EndpointConfig config, Sleeper sleeper = {});

    Outcome judge(const JudgeRequest& request);
    const EndpointConfig& config() const { return config_; }
    int peak_in_flight() const;

private:
    std::string post(const std::string& body);

    EndpointConfig config_;
    Sleeper sleep_;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    int in_flight_ = 0;
    int peak_ = 0;
};

enum class VerifierKind { exact, noisy_strict, external };
std::string_view to_string(VerifierKind k);
VerifierKind parse_verifier_kind(std::string_view s);

struct VerifierConfig {
    VerifierKind kind = VerifierKind::exact;
    double phi = 0.0;
    EndpointConfig endpoint;
    std::optional<ReasoningProfile> reasoning;
    void validate() const;
};

// Text the external judge sees for an action.
std::string answer_text(const Question& q, int action);

class Verifier {
public:
    Verifier() : Verifier(VerifierConfig{}) {}
    explicit Verifier(VerifierConfig config);

    // Draws: noisy_strict consumes one on Correct; a reasoning profile adds one.
    Outcome judge(const Question& q, const Episode& episode, int action, Rng& rng) const;

    const VerifierConfig& config() const { return config_; }
    static Verifier exact() { return Verifier(); }

private:
    VerifierConfig config_;
    std::shared_ptr<JudgeClient> client_;
};

}  // namespace truthrl
