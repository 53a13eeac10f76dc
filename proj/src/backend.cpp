#include "ontoeval/backend.hpp"

#include "ontoeval/error.hpp"

#include <httplib.h>

#include <cstdlib>
#include <fstream>

namespace ontoeval {

namespace {

std::string session_key(const std::string& parent, const std::string& child) { return parent + '\x1f' + child; }

void substitute(nlohmann::json& node, const nlohmann::json& messages, const std::string& prompt)
{
    if (node.is_string()) {
        auto s = node.get<std::string>();
        if (s == "{{messages}}") {
            node = messages;
            return;
        }
        for (std::size_t pos = 0; (pos = s.find("{{prompt}}", pos)) != std::string::npos; pos += prompt.size()) {
            s.replace(pos, 10, prompt);
        }
        node = s;
    } else if (node.is_array() || node.is_object()) {
        for (auto& child : node) substitute(child, messages, prompt);
    }
}

} // namespace

std::unique_ptr<Backend> make_affirming_backend()
{
    return std::make_unique<FunctionBackend>(
        "affirm-stub", [](const PromptContext&) { return std::string("Yes, this is a valid IS-A relationship."); });
}

void ScriptedBackend::add(const std::string& parent_label, const std::string& child_label, Session session)
{
    sessions_[session_key(parent_label, child_label)] = std::move(session);
}

ScriptedBackend ScriptedBackend::from_json(const nlohmann::json& j)
{
    try {
        ScriptedBackend b(j.value("backend_id", std::string("scripted")));
        for (const auto& s : j.at("sessions")) {
            Session session;
            session.responses = s.at("responses").get<std::vector<std::string>>();
            b.add(s.at("parent").get<std::string>(), s.at("child").get<std::string>(), std::move(session));
        }
        return b;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed backend script: ") + e.what());
    }
}

ScriptedBackend ScriptedBackend::from_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open backend script " + path);
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("backend script " + path + " is not valid JSON: " + e.what());
    }
}

ScriptedBackend ScriptedBackend::from_corpus(const std::vector<Transcript>& corpus)
{
    ScriptedBackend b(corpus.empty() ? std::string("recorded") : "recorded:" + corpus.front().backend_id);
    for (const auto& t : corpus) {
        Session s;
        for (const auto& turn : t.turns) {
            (turn.role == Turn::Role::Asker ? s.expected_prompts : s.responses).push_back(turn.text);
        }
        b.add(t.pair.parent_label, t.pair.child_label, std::move(s));
    }
    return b;
}

std::string ScriptedBackend::respond(const PromptContext& context)
{
    auto it = sessions_.find(session_key(context.pair.parent_label, context.pair.child_label));
    if (it == sessions_.end()) {
        throw BackendError("no scripted session for (" + context.pair.parent_label + ", " +
                           context.pair.child_label + ")");
    }
    std::size_t index = 0;
    for (const auto& turn : context.history) index += turn.role == Turn::Role::Responder ? 1 : 0;
    const auto& s = it->second;
    if (index < s.expected_prompts.size() && s.expected_prompts[index] != context.prompt) {
        throw BackendError("prompt " + std::to_string(index + 1) + " differs from the recording");
    }
    if (index >= s.responses.size()) {
        throw BackendError("script exhausted after " + std::to_string(s.responses.size()) + " responses");
    }
    return s.responses[index];
}

AdapterManifest adapter_from_json(const nlohmann::json& j)
{
    AdapterManifest m;
    try {
        m.id = j.value("id", m.id);
        m.endpoint = j.at("endpoint").get<std::string>();
        m.auth_header = j.value("auth_header", std::string());
        m.auth_env = j.value("auth_env", std::string());
        m.auth_prefix = j.value("auth_prefix", std::string());
        m.headers = j.value("headers", std::map<std::string, std::string>{});
        m.request_template = j.value("request_template", nlohmann::json{{"prompt", "{{prompt}}"}});
        m.response_pointer = j.value("response_pointer", m.response_pointer);
        m.timeout_seconds = j.value("timeout_seconds", m.timeout_seconds);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed adapter manifest: ") + e.what());
    }
    if (m.endpoint.rfind("http://", 0) != 0 && m.endpoint.rfind("https://", 0) != 0) {
        throw ConfigError("adapter endpoint must be an http(s) URL: " + m.endpoint);
    }
    if (!m.auth_env.empty() && m.auth_header.empty()) throw ConfigError("auth_env given without auth_header");
    if (m.timeout_seconds <= 0) throw ConfigError("timeout_seconds must be positive");
    return m;
}

AdapterManifest load_adapter(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open adapter manifest " + path);
    try {
        return adapter_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("adapter manifest " + path + " is not valid JSON: " + e.what());
    }
}

HttpBackend::HttpBackend(AdapterManifest manifest) : manifest_(std::move(manifest))
{
    if (!manifest_.auth_env.empty()) {
        const char* value = std::getenv(manifest_.auth_env.c_str());
        if (value == nullptr || *value == '\0') {
            throw ConfigError("environment variable " + manifest_.auth_env + " holding the backend credential is not set");
        }
        credential_ = value;
    }
    const auto scheme_end = manifest_.endpoint.find("://") + 3;
    const auto path_start = manifest_.endpoint.find('/', scheme_end);
    base_ = manifest_.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : manifest_.endpoint.substr(path_start);
}

nlohmann::json HttpBackend::build_request(const PromptContext& context) const
{
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& turn : context.history) {
        messages.push_back({{"role", turn.role == Turn::Role::Asker ? "user" : "assistant"}, {"content", turn.text}});
    }
    messages.push_back({{"role", "user"}, {"content", context.prompt}});
    nlohmann::json body = manifest_.request_template;
    substitute(body, messages, context.prompt);
    return body;
}

std::string HttpBackend::respond(const PromptContext& context)
{
    httplib::Client client(base_);
    client.set_connection_timeout(manifest_.timeout_seconds, 0);
    client.set_read_timeout(manifest_.timeout_seconds, 0);
    client.set_write_timeout(manifest_.timeout_seconds, 0);
    httplib::Headers headers;
    for (const auto& [k, v] : manifest_.headers) headers.emplace(k, v);
    if (!manifest_.auth_header.empty()) headers.emplace(manifest_.auth_header, manifest_.auth_prefix + credential_);

    const auto result = client.Post(path_, headers, build_request(context).dump(), "application/json");
    if (!result) throw BackendError("request to " + manifest_.endpoint + " failed: " + httplib::to_string(result.error()));
    if (result->status < 200 || result->status >= 300) {
        throw BackendError("backend answered HTTP " + std::to_string(result->status));
    }
    try {
        const auto reply = nlohmann::json::parse(result->body);
        const auto& text = reply.at(nlohmann::json::json_pointer(manifest_.response_pointer));
        if (!text.is_string()) throw BackendError("response field " + manifest_.response_pointer + " is not a string");
        return text.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw BackendError("cannot read " + manifest_.response_pointer + " from backend response: " + e.what());
    }
}

} // namespace ontoeval
