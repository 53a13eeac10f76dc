#include "ontoeval/backend.hpp"
#include "ontoeval/error.hpp"

#include "support.hpp"

#include <doctest.h>

#include <httplib.h>

#include <cstdlib>
#include <mutex>
#include <thread>

using namespace ontoeval;
using testing::fixture;

namespace {

const ConceptPair kPair{"Poor housing", "Pest infested house", "", "", Stratum::Child};

/// Minimal chat endpoint that records requests and answers from a queue of statuses.
class StubModel {
public:
    StubModel()
    {
        server_.Post("/v1/chat", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mutex_);
            bodies_.push_back(nlohmann::json::parse(req.body));
            auth_.push_back(req.get_header_value("Authorization"));
            res.status = status_;
            res.set_content(reply_, "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
    }
    ~StubModel()
    {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat"; }
    void answer(int status, std::string body)
    {
        std::lock_guard lock(mutex_);
        status_ = status;
        reply_ = std::move(body);
    }
    std::vector<nlohmann::json> bodies() const
    {
        std::lock_guard lock(mutex_);
        return bodies_;
    }
    std::vector<std::string> auth() const
    {
        std::lock_guard lock(mutex_);
        return auth_;
    }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    mutable std::mutex mutex_;
    int status_ = 200;
    std::string reply_ = R"({"choices": [{"message": {"content": "Yes, this is a valid IS-A relationship."}}]})";
    std::vector<nlohmann::json> bodies_;
    std::vector<std::string> auth_;
};

AdapterManifest manifest_for(const StubModel& stub)
{
    return adapter_from_json({{"id", "stub-chat"},
                              {"endpoint", stub.url()},
                              {"auth_header", "Authorization"},
                              {"auth_env", "ONTOEVAL_TEST_KEY"},
                              {"auth_prefix", "Bearer "},
                              {"request_template", {{"model", "m"}, {"messages", "{{messages}}"}}},
                              {"response_pointer", "/choices/0/message/content"},
                              {"timeout_seconds", 5}});
}

} // namespace

TEST_CASE("HTTP backend drives a full session against a stub endpoint")
{
    ::setenv("ONTOEVAL_TEST_KEY", "k-123", 1);
    StubModel stub;
    HttpBackend backend(manifest_for(stub));
    CHECK(backend.id() == "stub-chat");
    const auto t = run_session(kPair, 1, ProtocolConfig{}, backend, logical_clock());
    CHECK(t.status == SessionStatus::Complete);
    CHECK(classify_outcome(t) == Outcome::AgreedChild);
    const auto bodies = stub.bodies();
    REQUIRE(bodies.size() == 1);
    CHECK(bodies[0]["model"] == "m");
    REQUIRE(bodies[0]["messages"].size() == 1);
    CHECK(bodies[0]["messages"][0]["role"] == "user");
    CHECK(bodies[0]["messages"][0]["content"] == t.turns[0].text);
    CHECK(stub.auth()[0] == "Bearer k-123");
}

TEST_CASE("request template carries the chat history")
{
    ::setenv("ONTOEVAL_TEST_KEY", "k", 1);
    StubModel stub;
    stub.answer(200, R"({"choices": [{"message": {"content": "No, not a valid IS-A relationship."}}]})");
    HttpBackend backend(manifest_for(stub));
    run_session(kPair, 1, ProtocolConfig{}, backend, logical_clock());
    const auto bodies = stub.bodies();
    REQUIRE(bodies.size() >= 2);
    const auto& second = bodies[1]["messages"];
    REQUIRE(second.size() == 3);
    CHECK(second[1]["role"] == "assistant");
    CHECK(second[1]["content"] == "No, not a valid IS-A relationship.");

    auto plain = manifest_for(stub);
    plain.request_template = {{"input", "Q: {{prompt}}"}};
    std::vector<Turn> history;
    const std::string prompt = "hello";
    const auto body = HttpBackend(plain).build_request(PromptContext{kPair, 1, Step::Assert, history, prompt});
    CHECK(body == nlohmann::json{{"input", "Q: hello"}});
}

TEST_CASE("HTTP errors surface as backend errors")
{
    ::setenv("ONTOEVAL_TEST_KEY", "k", 1);
    StubModel stub;
    HttpBackend backend(manifest_for(stub));
    std::vector<Turn> history;
    const std::string prompt = "p";
    const PromptContext ctx{kPair, 1, Step::Assert, history, prompt};

    stub.answer(500, "{}");
    CHECK_THROWS_AS(backend.respond(ctx), BackendError);
    stub.answer(200, "not json");
    CHECK_THROWS_AS(backend.respond(ctx), BackendError);
    stub.answer(200, R"({"choices": []})");
    CHECK_THROWS_AS(backend.respond(ctx), BackendError);
    stub.answer(200, R"({"choices": [{"message": {"content": 3}}]})");
    CHECK_THROWS_AS(backend.respond(ctx), BackendError);

    auto m = manifest_for(stub);
    m.endpoint = "http://127.0.0.1:1/v1/chat";
    m.timeout_seconds = 1;
    CHECK_THROWS_AS(HttpBackend(m).respond(ctx), BackendError);

    stub.answer(503, "{}");
    const auto t = run_session(kPair, 1, ProtocolConfig{}, backend, logical_clock());
    CHECK(t.status == SessionStatus::BackendError);
    CHECK(t.note.find("503") != std::string::npos);
}

TEST_CASE("adapter manifest validation")
{
    CHECK_THROWS_AS(adapter_from_json({{"endpoint", "ftp://x"}}), ConfigError);
    CHECK_THROWS_AS(adapter_from_json(nlohmann::json::object()), ConfigError);
    CHECK_THROWS_AS(adapter_from_json({{"endpoint", "http://x"}, {"auth_env", "K"}}), ConfigError);
    CHECK_THROWS_AS(adapter_from_json({{"endpoint", "http://x"}, {"timeout_seconds", 0}}), ConfigError);
    const auto m = adapter_from_json({{"endpoint", "https://x/y"}});
    CHECK(m.response_pointer == "/reply");
    CHECK(m.request_template == nlohmann::json{{"prompt", "{{prompt}}"}});

    ::unsetenv("ONTOEVAL_MISSING_KEY");
    auto needs_key = adapter_from_json({{"endpoint", "http://x"}, {"auth_header", "A"}, {"auth_env", "ONTOEVAL_MISSING_KEY"}});
    CHECK_THROWS_AS(HttpBackend{needs_key}, ConfigError);
    CHECK_THROWS_AS(load_adapter(fixture("missing.json")), ConfigError);
}

TEST_CASE("scripted backend")
{
    auto b = ScriptedBackend::from_json({{"backend_id", "s"},
                                         {"sessions", {{{"parent", "Poor housing"},
                                                        {"child", "Pest infested house"},
                                                        {"responses", {"Yes, valid."}}}}}});
    CHECK(b.id() == "s");
    std::vector<Turn> history;
    const std::string prompt = "p";
    CHECK(b.respond(PromptContext{kPair, 1, Step::Assert, history, prompt}) == "Yes, valid.");
    history.push_back({Turn::Role::Asker, Step::Assert, "p", ""});
    history.push_back({Turn::Role::Responder, Step::Assert, "Yes, valid.", ""});
    CHECK_THROWS_AS(b.respond(PromptContext{kPair, 1, Step::Clarify, history, prompt}), BackendError);
    ConceptPair other{"A", "B", "", "", Stratum::Child};
    CHECK_THROWS_AS(b.respond(PromptContext{other, 1, Step::Assert, {}, prompt}), BackendError);
    CHECK_THROWS_AS(ScriptedBackend::from_json({{"sessions", 3}}), ConfigError);
}

TEST_CASE("recorded corpus replay rejects a changed prompt")
{
    const auto corpus = read_corpus(fixture("concordance/corpus"));
    auto replay = ScriptedBackend::from_corpus(corpus);
    CHECK(replay.id() == "recorded:recorded-reconstruction");
    const auto& t = corpus.front();
    std::vector<Turn> history;
    CHECK(replay.respond(PromptContext{t.pair, 1, Step::Assert, history, t.turns[0].text}) == t.turns[1].text);
    const std::string changed = t.turns[0].text + " Please be brief.";
    CHECK_THROWS_AS(replay.respond(PromptContext{t.pair, 1, Step::Assert, history, changed}), BackendError);

    ProtocolConfig altered;
    altered.assertion_template = "Is \"{child}\" a kind of \"{parent}\"?";
    const auto rerun = run_session(t.pair, 1, altered, replay, logical_clock());
    CHECK(rerun.status == SessionStatus::BackendError);
}
