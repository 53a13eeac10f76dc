#pragma once

#include "ontoeval/pairs.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace httplib {
class Server;
}

namespace ontoeval {

/// Judgments collected for one sheet. Every accepted update is written to
/// `path` (when set) before the call returns; updates are serialized.
class JudgmentStore {
public:
    JudgmentStore(PairSheet sheet, std::string path);

    const PairSheet& sheet() const { return sheet_; }

    struct Result {
        int status = 200;  // 200, 400, 404 or 422
        nlohmann::json body;
    };

    /// Validates and stores {pair_index, is_child, farther_away, reason};
    /// re-posting an index overwrites it.
    Result post(const nlohmann::json& body);

    nlohmann::json sheet_view() const;
    nlohmann::json progress() const;
    std::string export_csv() const;
    std::vector<Judgment> judgments() const;

private:
    void persist_locked() const;

    PairSheet sheet_;
    std::string path_;
    mutable std::mutex mutex_;
    std::map<std::size_t, Judgment> judgments_;
};

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;               // 0 picks a free port
    std::string token;             // empty: generated
    std::string static_dir;        // optional UI build to serve at /
};

/// Random hex token from the system CSPRNG.
std::string random_token(std::size_t bytes = 16);

/// JSON API over a JudgmentStore. Requests must carry the session token in
/// an X-Session-Token header or a `token` query parameter.
class ReviewServer {
public:
    ReviewServer(std::shared_ptr<JudgmentStore> store, ServerOptions options);
    ~ReviewServer();

    /// Binds and returns the port; throws ConfigError on failure.
    int bind();
    /// Blocks until stop().
    void listen();
    void stop();

    const std::string& token() const { return options_.token; }

private:
    std::shared_ptr<JudgmentStore> store_;
    ServerOptions options_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace ontoeval
