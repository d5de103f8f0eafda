#include <chrono>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "truthrl/errors.hpp"
#include "truthrl/verifier.hpp"

namespace truthrl {

Outcome parse_judge_reply(std::string_view body, std::string_view prediction) {
    auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw JudgeProtocolError("judge reply is not a JSON object", std::string(body));
    auto it = j.find("score");
    if (it == j.end() || !it->is_number()) throw JudgeProtocolError("judge reply lacks a numeric score", std::string(body));
    double score = it->get<double>();
    if (score != 0.0 && score != 1.0) throw JudgeProtocolError("judge score must be 0 or 1", std::string(body));
    if (auto e = j.find("explanation"); e != j.end() && !e->is_string())
        throw JudgeProtocolError("judge explanation must be a string", std::string(body));
    if (score == 1.0) return {Label::correct, {}};
    return {is_abstention_marker(prediction) ? Label::uncertain : Label::hallucinated, {}};
}

JudgeClient::JudgeClient(EndpointConfig config, Sleeper sleeper) : config_(std::move(config)), sleep_(std::move(sleeper)) {
    config_.validate();
    if (!sleep_)
        sleep_ = [](double ms) { std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms)); };
}

int JudgeClient::peak_in_flight() const {
    std::lock_guard lock(mu_);
    return peak_;
}

std::string JudgeClient::post(const std::string& body) {
    httplib::Client cli(config_.host, config_.port);
    auto secs = static_cast<time_t>(config_.timeout_s);
    auto usecs = static_cast<time_t>((config_.timeout_s - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);

    std::string last_error;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        if (attempt > 1) sleep_(config_.backoff_base_ms * std::ldexp(1.0, attempt - 2));
        auto res = cli.Post(config_.path, body, "text/plain");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) return res->body;
        if (res->status >= 500 || res->status == 429) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        throw JudgeProtocolError("judge returned HTTP " + std::to_string(res->status), res->body);
    }
    throw JudgeUnavailableError("judge unreachable after " + std::to_string(config_.max_attempts) +
                                    " attempts: " + last_error,
                                config_.max_attempts);
}

Outcome JudgeClient::judge(const JudgeRequest& request) {
    if (request.question.empty() || request.reference.empty() ||
        (request.template_id == JudgeTemplate::outcome ? request.prediction.empty() : request.reasoning.empty()))
        throw ValidationError("judge_request", "fields must be non-empty");
    std::string prompt = render_prompt(request);
    {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
        ++in_flight_;
        peak_ = std::max(peak_, in_flight_);
    }
    struct Release {
        JudgeClient* c;
        ~Release() {
            {
                std::lock_guard lock(c->mu_);
                --c->in_flight_;
            }
            c->cv_.notify_one();
        }
    } release{this};
    std::string reply = post(prompt);
    return parse_judge_reply(reply, request.prediction);
}

}  // namespace truthrl
