#include "ontoeval/server.hpp"

#include "ontoeval/error.hpp"
#include "ontoeval/manifest.hpp"

#include <httplib.h>
#include <openssl/rand.h>

#include <filesystem>

namespace ontoeval {

namespace {

Answer parse_answer(const nlohmann::json& v)
{
    if (v.is_null()) return Answer::Blank;
    if (v.is_boolean()) return v.get<bool>() ? Answer::Yes : Answer::No;
    if (!v.is_string()) throw ConfigError("is_child must be \"yes\", \"no\" or blank");
    auto s = v.get<std::string>();
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "yes") return Answer::Yes;
    if (s == "no") return Answer::No;
    if (s.empty()) return Answer::Blank;
    throw ConfigError("is_child must be \"yes\", \"no\" or blank");
}

bool parse_farther(const nlohmann::json& v)
{
    if (v.is_null()) return false;
    if (v.is_boolean()) return v.get<bool>();
    if (!v.is_string()) throw ConfigError("farther_away must be \"yes\" or blank");
    auto s = v.get<std::string>();
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "yes") return true;
    if (s.empty() || s == "no") return false;
    throw ConfigError("farther_away must be \"yes\" or blank");
}

const char* answer_name(Answer a) { return a == Answer::Yes ? "yes" : a == Answer::No ? "no" : ""; }

nlohmann::json judgment_json(const Judgment& j)
{
    return {{"pair_index", j.pair_index},
            {"is_child", answer_name(j.is_child)},
            {"farther_away", j.farther_away ? "yes" : ""},
            {"reason", j.reason}};
}

bool answered(const Judgment& j) { return j.is_child != Answer::Blank || j.farther_away; }

} // namespace

JudgmentStore::JudgmentStore(PairSheet sheet, std::string path) : sheet_(std::move(sheet)), path_(std::move(path))
{
    if (path_.empty() || !std::filesystem::exists(path_)) return;
    try {
        const auto j = nlohmann::json::parse(read_file(path_));
        for (const auto& item : j.at("judgments")) {
            Judgment jd;
            jd.pair_index = item.at("pair_index").get<std::size_t>();
            jd.is_child = parse_answer(item.value("is_child", nlohmann::json()));
            jd.farther_away = parse_farther(item.value("farther_away", nlohmann::json()));
            jd.reason = item.value("reason", std::string());
            if (jd.pair_index >= sheet_.pairs.size()) throw ConfigError("judgment index outside the sheet");
            judgments_[jd.pair_index] = std::move(jd);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot resume judgments from " + path_ + ": " + e.what());
    }
}

JudgmentStore::Result JudgmentStore::post(const nlohmann::json& body)
{
    if (!body.is_object() || !body.contains("pair_index") || !body["pair_index"].is_number_integer()) {
        return {400, {{"error", "body must be an object with an integer pair_index"}}};
    }
    const auto index = body["pair_index"].get<std::int64_t>();
    if (index < 0 || static_cast<std::size_t>(index) >= sheet_.pairs.size()) {
        return {404, {{"error", "unknown pair_index " + std::to_string(index)}}};
    }
    Judgment j;
    j.pair_index = static_cast<std::size_t>(index);
    try {
        j.is_child = parse_answer(body.value("is_child", nlohmann::json()));
        j.farther_away = parse_farther(body.value("farther_away", nlohmann::json()));
        const auto reason = body.value("reason", nlohmann::json(""));
        if (!reason.is_string()) throw ConfigError("reason must be a string");
        j.reason = reason.get<std::string>();
    } catch (const ConfigError& e) {
        return {400, {{"error", e.what()}}};
    }
    if (j.is_child == Answer::Yes && j.farther_away) {
        return {422, {{"error", "Child? and Farther away cannot both be Yes"}}};
    }
    std::lock_guard lock(mutex_);
    judgments_[j.pair_index] = j;
    persist_locked();
    return {200, {{"ok", true}, {"judgment", judgment_json(j)}}};
}

nlohmann::json JudgmentStore::sheet_view() const
{
    nlohmann::json rows = nlohmann::json::array();
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < sheet_.pairs.size(); ++i) {
        const auto& p = sheet_.pairs[i];
        nlohmann::json row = {{"pair_index", i},
                              {"parent", p.parent_label},
                              {"relation", kRelationColumn},
                              {"child", p.child_label},
                              {"training", i < sheet_.training_prefix}};
        if (i < sheet_.training_prefix) row["prefilled"] = judgment_json(training_answer(p, i));
        if (auto it = judgments_.find(i); it != judgments_.end()) row["judgment"] = judgment_json(it->second);
        rows.push_back(std::move(row));
    }
    return {{"rows", rows}, {"training_prefix", sheet_.training_prefix}, {"count", sheet_.pairs.size()}};
}

nlohmann::json JudgmentStore::progress() const
{
    std::lock_guard lock(mutex_);
    const std::size_t total = sheet_.pairs.size() - sheet_.training_prefix;
    std::size_t done = 0;
    for (const auto& [i, j] : judgments_) {
        if (i >= sheet_.training_prefix && answered(j)) ++done;
    }
    std::size_t next = sheet_.training_prefix;
    while (next < sheet_.pairs.size()) {
        auto it = judgments_.find(next);
        if (it == judgments_.end() || !answered(it->second)) break;
        ++next;
    }
    nlohmann::json j = {{"answered", done}, {"total", total}, {"complete", done == total}};
    j["next_pair_index"] = next < sheet_.pairs.size() ? nlohmann::json(next) : nlohmann::json(nullptr);
    return j;
}

std::vector<Judgment> JudgmentStore::judgments() const
{
    std::lock_guard lock(mutex_);
    std::vector<Judgment> out;
    for (const auto& [i, j] : judgments_) out.push_back(j);
    return out;
}

std::string JudgmentStore::export_csv() const { return export_judgments(sheet_, judgments()); }

void JudgmentStore::persist_locked() const
{
    if (path_.empty()) return;
    nlohmann::json items = nlohmann::json::array();
    for (const auto& [i, j] : judgments_) items.push_back(judgment_json(j));
    write_file_atomic(path_, nlohmann::json{{"judgments", items}}.dump(2) + "\n");
}

std::string random_token(std::size_t bytes)
{
    std::vector<unsigned char> buf(bytes);
    if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1) throw Error("system random source unavailable");
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (auto b : buf) {
        out += digits[b >> 4];
        out += digits[b & 0xF];
    }
    return out;
}

ReviewServer::ReviewServer(std::shared_ptr<JudgmentStore> store, ServerOptions options)
    : store_(std::move(store)), options_(std::move(options)), server_(std::make_unique<httplib::Server>())
{
    if (options_.token.empty()) options_.token = random_token();
    auto& srv = *server_;
    const std::string token = options_.token;

    srv.set_pre_routing_handler([token](const httplib::Request& req, httplib::Response& res) {
        if (req.path.rfind("/api/", 0) != 0) return httplib::Server::HandlerResponse::Unhandled;
        const auto header = req.get_header_value("X-Session-Token");
        const auto query = req.get_param_value("token");
        if (header == token || query == token) return httplib::Server::HandlerResponse::Unhandled;
        res.status = 401;
        res.set_content(R"({"error":"missing or wrong session token"})", "application/json");
        return httplib::Server::HandlerResponse::Handled;
    });
    auto send = [](httplib::Response& res, int status, const nlohmann::json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    };
    srv.Get("/api/sheet", [this, send](const httplib::Request&, httplib::Response& res) {
        send(res, 200, store_->sheet_view());
    });
    srv.Get("/api/progress", [this, send](const httplib::Request&, httplib::Response& res) {
        send(res, 200, store_->progress());
    });
    srv.Post("/api/judgment", [this, send](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::exception&) {
            send(res, 400, {{"error", "request body is not JSON"}});
            return;
        }
        auto result = store_->post(body);
        if (result.status == 200) result.body["progress"] = store_->progress();
        send(res, result.status, result.body);
    });
    srv.Get("/api/export", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(store_->export_csv(), "text/csv; charset=utf-8");
        res.set_header("Content-Disposition", "attachment; filename=\"judgments.csv\"");
    });
    if (!options_.static_dir.empty() && !srv.set_mount_point("/", options_.static_dir)) {
        throw ConfigError("cannot serve static files from " + options_.static_dir);
    }
}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::bind()
{
    int port = options_.port;
    if (port == 0) {
        port = server_->bind_to_any_port(options_.host);
    } else if (!server_->bind_to_port(options_.host, port)) {
        port = -1;
    }
    if (port < 0) throw ConfigError("cannot listen on " + options_.host + ":" + std::to_string(options_.port));
    options_.port = port;
    return port;
}

void ReviewServer::listen() { server_->listen_after_bind(); }

void ReviewServer::stop()
{
    if (server_) server_->stop();
}

} // namespace ontoeval
