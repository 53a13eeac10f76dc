#pragma once

#include "ontoeval/validator.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace ontoeval {

struct PromptContext {
    const ConceptPair& pair;
    std::size_t session;
    Step step;
    const std::vector<Turn>& history;  // turns before this prompt
    const std::string& prompt;
};

/// Responder side of the dialogue. Implementations must be safe to call from
/// several sessions at once. Failures are reported as BackendError.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string id() const = 0;
    virtual std::string respond(const PromptContext& context) = 0;
};

class FunctionBackend : public Backend {
public:
    using Fn = std::function<std::string(const PromptContext&)>;

    FunctionBackend(std::string id, Fn fn) : id_(std::move(id)), fn_(std::move(fn)) {}
    std::string id() const override { return id_; }
    std::string respond(const PromptContext& context) override { return fn_(context); }

private:
    std::string id_;
    Fn fn_;
};

/// Answers every prompt with an unconditional affirmation.
std::unique_ptr<Backend> make_affirming_backend();

/// Canned responses per concept pair, served in order. The n-th responder
/// turn of a session gets the n-th response, so the backend holds no
/// per-session state. When expected prompts are present (recorded corpora),
/// a differing prompt raises BackendError instead of replaying out of step.
class ScriptedBackend : public Backend {
public:
    struct Session {
        std::vector<std::string> responses;
        std::vector<std::string> expected_prompts;
    };

    explicit ScriptedBackend(std::string id) : id_(std::move(id)) {}

    void add(const std::string& parent_label, const std::string& child_label, Session session);

    /// {"backend_id": ..., "sessions": [{"parent", "child", "responses": [...]}]}
    static ScriptedBackend from_json(const nlohmann::json& j);
    static ScriptedBackend from_file(const std::string& path);
    /// Replays the responder turns of stored transcripts.
    static ScriptedBackend from_corpus(const std::vector<Transcript>& corpus);

    std::string id() const override { return id_; }
    std::string respond(const PromptContext& context) override;

private:
    std::string id_;
    std::map<std::string, Session> sessions_;
};

/// HTTP transport for a live model, described by an adapter manifest:
///   endpoint         full URL (http or https)
///   auth_header      header carrying the credential (optional)
///   auth_env         environment variable holding the credential
///   auth_prefix      prepended to the credential, e.g. "Bearer "
///   headers          extra static headers
///   request_template JSON body; the string "{{messages}}" becomes the chat
///                    history array and "{{prompt}}" inside strings the prompt
///   response_pointer JSON pointer to the reply text
///   timeout_seconds
struct AdapterManifest {
    std::string id = "http";
    std::string endpoint;
    std::string auth_header;
    std::string auth_env;
    std::string auth_prefix;
    std::map<std::string, std::string> headers;
    nlohmann::json request_template;
    std::string response_pointer = "/reply";
    int timeout_seconds = 60;
};

AdapterManifest adapter_from_json(const nlohmann::json& j);
AdapterManifest load_adapter(const std::string& path);

class HttpBackend : public Backend {
public:
    /// Reads the credential from the environment; throws ConfigError if
    /// auth_env is set but the variable is missing.
    explicit HttpBackend(AdapterManifest manifest);

    std::string id() const override { return manifest_.id; }
    std::string respond(const PromptContext& context) override;

    /// Request body for a prompt; exposed for tests.
    nlohmann::json build_request(const PromptContext& context) const;

private:
    AdapterManifest manifest_;
    std::string credential_;
    std::string base_;  // scheme://host[:port]
    std::string path_;
};

} // namespace ontoeval
