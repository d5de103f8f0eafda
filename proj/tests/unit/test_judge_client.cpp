#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <regex>
#include <thread>
#include <vector>

#include <httplib.h>

#include "support.hpp"
#include "truthrl/errors.hpp"
#include "truthrl/verifier.hpp"

using namespace truthrl;

namespace {

// Local judge double. Scores 1 when the rendered prompt's prediction equals its ground truth.
class FakeJudge {
public:
    FakeJudge() {
        server_.Post("/judge", [this](const httplib::Request& req, httplib::Response& res) {
            int n = ++calls_;
            int now = ++active_;
            int seen = peak_.load();
            while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
            }
            if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
            --active_;
            if (n <= fail_first_) {
                res.status = fail_status_;
                return;
            }
            if (!raw_reply_.empty()) {
                res.set_content(raw_reply_, "application/json");
                return;
            }
            std::smatch g, p;
            static const std::regex gt("Ground Truth: ([^\n]*)"), pred("Prediction: ([^\n]*)");
            bool ok = std::regex_search(req.body, g, gt) && std::regex_search(req.body, p, pred) && g[1] == p[1];
            res.set_content(ok ? R"({"explanation":"match","score":1})" : R"({"explanation":"no","score":0})",
                            "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeJudge() {
        server_.stop();
        thread_.join();
    }

    EndpointConfig endpoint(int in_flight = 4) const {
        EndpointConfig c;
        c.port = port_;
        c.max_in_flight = in_flight;
        c.timeout_s = 5;
        return c;
    }

    int calls() const { return calls_; }
    int peak() const { return peak_; }

    int fail_first_ = 0;
    int fail_status_ = 503;
    int delay_ms_ = 0;
    std::string raw_reply_;

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> calls_{0}, active_{0}, peak_{0};
};

JudgeRequest request(const std::string& gold, const std::string& pred) {
    JudgeRequest r;
    r.question = "question 0";
    r.reference = gold;
    r.prediction = pred;
    return r;
}

}  // namespace

TEST(JudgeClient, ScoresThroughServer) {
    FakeJudge judge;
    JudgeClient c(judge.endpoint());
    EXPECT_EQ(c.judge(request("candidate 1", "candidate 1")).label, Label::correct);
    EXPECT_EQ(c.judge(request("candidate 1", "candidate 2")).label, Label::hallucinated);
    EXPECT_EQ(c.judge(request("candidate 1", "I don't know")).label, Label::uncertain);
}

TEST(JudgeClient, RetriesTransientFailuresWithBackoff) {
    FakeJudge judge;
    judge.fail_first_ = 2;
    std::vector<double> sleeps;
    JudgeClient c(judge.endpoint(), [&](double ms) { sleeps.push_back(ms); });
    EXPECT_EQ(c.judge(request("candidate 0", "candidate 0")).label, Label::correct);
    EXPECT_EQ(judge.calls(), 3);
    EXPECT_EQ(sleeps, (std::vector<double>{100.0, 200.0}));
}

TEST(JudgeClient, GivesUpAfterMaxAttempts) {
    FakeJudge judge;
    judge.fail_first_ = 100;
    JudgeClient c(judge.endpoint(), [](double) {});
    try {
        c.judge(request("candidate 0", "candidate 0"));
        FAIL() << "expected JudgeUnavailableError";
    } catch (const JudgeUnavailableError& e) {
        EXPECT_EQ(e.attempts(), 3);
    }
    EXPECT_EQ(judge.calls(), 3);
}

TEST(JudgeClient, UnreachableEndpoint) {
    int port = 0;
    {
        FakeJudge judge;
        port = judge.endpoint().port;
    }
    EndpointConfig cfg;
    cfg.port = port;
    cfg.timeout_s = 1;
    JudgeClient c(cfg, [](double) {});
    EXPECT_THROW(c.judge(request("candidate 0", "candidate 0")), JudgeUnavailableError);
}

TEST(JudgeClient, ClientErrorIsProtocolError) {
    FakeJudge judge;
    judge.fail_first_ = 100;
    judge.fail_status_ = 400;
    JudgeClient c(judge.endpoint(), [](double) {});
    EXPECT_THROW(c.judge(request("candidate 0", "candidate 0")), JudgeProtocolError);
    EXPECT_EQ(judge.calls(), 1);
}

TEST(JudgeClient, MalformedReplyKeepsRawBody) {
    FakeJudge judge;
    judge.raw_reply_ = "not json";
    JudgeClient c(judge.endpoint());
    try {
        c.judge(request("candidate 0", "candidate 0"));
        FAIL() << "expected JudgeProtocolError";
    } catch (const JudgeProtocolError& e) {
        EXPECT_EQ(e.raw_reply(), "not json");
    }
}

TEST(JudgeClient, RejectsEmptyFields) {
    FakeJudge judge;
    JudgeClient c(judge.endpoint());
    EXPECT_THROW(c.judge(request("", "candidate 0")), ValidationError);
    EXPECT_EQ(judge.calls(), 0);
}

TEST(JudgeClient, ConcurrencyCap) {
    FakeJudge judge;
    judge.delay_ms_ = 30;
    JudgeClient c(judge.endpoint(2));
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) threads.emplace_back([&] { c.judge(request("candidate 0", "candidate 0")); });
    for (auto& t : threads) t.join();
    EXPECT_EQ(judge.calls(), 8);
    EXPECT_LE(c.peak_in_flight(), 2);
    EXPECT_LE(judge.peak(), 2);
}

TEST(ExternalVerifier, MatchesExactJudge) {
    FakeJudge judge;
    VerifierConfig cfg;
    cfg.kind = VerifierKind::external;
    cfg.endpoint = judge.endpoint();
    Verifier external(cfg);
    auto q = truthrl::testing::make_question(3, 4, 1, 1.0);
    Episode e;
    e.question_id = 3;
    e.realized_gold = 1;
    e.num_candidates = 4;
    Rng r(1);
    for (int a = 0; a <= 4; ++a) EXPECT_EQ(external.judge(q, e, a, r).label, judge_exact(e, a).label) << a;
}
