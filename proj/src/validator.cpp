#include "ontoeval/validator.hpp"

#include "ontoeval/backend.hpp"
#include "ontoeval/error.hpp"
#include "ontoeval/taxonomy.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

namespace ontoeval {

namespace {

namespace fs = std::filesystem;

std::string ascii_lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

bool is_word_byte(char c)
{
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u >= 0x80;
}

/// Lower-cased text with typographic apostrophes folded to ASCII.
std::string fold_text(std::string_view text)
{
    std::string s(text);
    for (std::size_t pos; (pos = s.find("\xE2\x80\x99")) != std::string::npos;) s.replace(pos, 3, "'");
    return ascii_lower(s);
}

/// Position of the first whole-word occurrence of `phrase`, or npos.
std::size_t find_phrase(const std::string& text, const std::string& phrase)
{
    if (phrase.empty()) return std::string::npos;
    for (std::size_t pos = text.find(phrase); pos != std::string::npos; pos = text.find(phrase, pos + 1)) {
        const bool left = pos == 0 || !is_word_byte(text[pos - 1]) || !is_word_byte(phrase.front());
        const auto end = pos + phrase.size();
        const bool right = end >= text.size() || !is_word_byte(text[end]) || !is_word_byte(phrase.back());
        if (left && right) return pos;
    }
    return std::string::npos;
}

std::string first_sentence(std::string_view text)
{
    const auto t = trim(text);
    const auto end = t.find_first_of(".!?\n");
    return end == std::string::npos ? t : t.substr(0, end);
}

std::string strip_decoration(std::string s)
{
    s = trim(s);
    for (const char* token : {"**", "__"}) {
        for (std::size_t pos; (pos = s.find(token)) != std::string::npos;) s.erase(pos, 2);
    }
    for (const char* q : {"\xE2\x80\x9C", "\xE2\x80\x9D"}) {
        for (std::size_t pos; (pos = s.find(q)) != std::string::npos;) s.erase(pos, 3);
    }
    s = trim(s);
    while (!s.empty() && (s.back() == '.' || s.back() == ',' || s.back() == ';' || s.back() == '"')) s.pop_back();
    while (!s.empty() && s.front() == '"') s.erase(0, 1);
    return trim(s);
}

std::string cut_explanation(std::string item)
{
    for (const char* sep : {":", " - ", " \xE2\x80\x93 ", " \xE2\x80\x94 ", " ("}) {
        if (auto pos = item.find(sep); pos != std::string::npos && pos > 0) item.resize(pos);
    }
    return strip_decoration(item);
}

std::vector<std::string> list_items(std::string_view text)
{
    static const std::regex marker(R"(^\s*(?:\d+[\.\)]|[-*]|\xE2\x80\xA2)\s+(.*)$)");
    std::vector<std::string> items;
    std::istringstream in{std::string(text)};
    std::string line;
    std::smatch m;
    while (std::getline(in, line)) {
        if (std::regex_match(line, m, marker)) {
            auto item = cut_explanation(m[1].str());
            if (!item.empty()) items.push_back(std::move(item));
        }
    }
    return items;
}

const std::set<std::string>& stopwords()
{
    static const std::set<std::string> words = {"a",    "an",   "the",  "of",   "in",   "on",    "at",
                                                "to",   "for",  "and",  "or",   "with", "by",    "from",
                                                "as",   "is",   "are",  "be",   "its",  "their", "into",
                                                "due",  "about", "that", "this", "which"};
    return words;
}

std::string stem(std::string w)
{
    for (const char* suffix : {"ations", "ation", "ings", "ing", "ed", "es", "s"}) {
        const std::string_view sfx(suffix);
        if (w.size() >= sfx.size() + 3 && w.compare(w.size() - sfx.size(), sfx.size(), sfx) == 0) {
            w.resize(w.size() - sfx.size());
            break;
        }
    }
    if (w.size() > 3 && w.back() == 'e') w.pop_back();
    return w;
}

std::string format_utc(std::time_t t)
{
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

constexpr const char* kSteps[] = {"assert", "clarify", "relation", "challenge", "modify", "reassert"};
constexpr const char* kOutcomes[] = {"agreed_child",          "type_of",          "recovered_child",
                                     "not_recovered",         "part_of",          "grandparent_confirmed",
                                     "unrelated_confirmed",   "unparseable"};

ClaimedRelation combine_claims(const std::string& denial, const std::optional<std::string>& relation_reply)
{
    if (relation_reply) {
        if (auto r = parse_relation(*relation_reply); r != ClaimedRelation::Other) return r;
    }
    return parse_relation(denial);
}

nlohmann::json pair_to_json(const ConceptPair& p)
{
    return {{"parent_label", p.parent_label},
            {"parent_iri", p.parent_iri},
            {"child_label", p.child_label},
            {"child_iri", p.child_iri},
            {"stratum", to_string(p.stratum)}};
}

ConceptPair pair_from_json(const nlohmann::json& j)
{
    return {j.at("parent_label").get<std::string>(), j.at("child_label").get<std::string>(),
            j.value("parent_iri", std::string()), j.value("child_iri", std::string()),
            parse_stratum(j.at("stratum").get<std::string>())};
}

nlohmann::json header_record(const Transcript& t)
{
    return {{"record", "session"},
            {"session", t.session},
            {"pair", pair_to_json(t.pair)},
            {"backend", t.backend_id},
            {"protocol_version", t.protocol_version}};
}

nlohmann::json turn_record(const Turn& turn)
{
    return {{"record", "turn"},
            {"role", turn.role == Turn::Role::Asker ? "asker" : "responder"},
            {"step", to_string(turn.step)},
            {"text", turn.text},
            {"timestamp", turn.timestamp}};
}

nlohmann::json end_record(const Transcript& t)
{
    return {{"record", "end"}, {"status", to_string(t.status)}, {"note", t.note}, {"prompt_count", t.prompt_count()}};
}

SessionStatus parse_status(const std::string& s)
{
    if (s == "complete") return SessionStatus::Complete;
    if (s == "unparseable") return SessionStatus::Unparseable;
    if (s == "backend_error") return SessionStatus::BackendError;
    throw ConfigError("unknown session status '" + s + "'");
}

} // namespace

void ProtocolConfig::validate() const
{
    auto require = [](const std::string& name, const std::string& templ, std::initializer_list<const char*> slots) {
        for (const char* slot : slots) {
            if (templ.find(slot) == std::string::npos) {
                throw ConfigError(name + " must contain the " + slot + " slot");
            }
        }
    };
    require("assertion_template", assertion_template, {"{parent}", "{child}"});
    require("clarify_template", clarify_template, {"{parent}", "{child}"});
    require("relation_template", relation_template, {"{parent}", "{child}"});
    require("challenge_template", challenge_template, {"{parent}"});
    require("modification_template", modification_template, {"{child}"});
    if (match_threshold <= Ratio(0) || match_threshold > Ratio(1)) throw ConfigError("match_threshold must lie in (0, 1]");
    if (affirm_phrases.empty() || negate_phrases.empty()) throw ConfigError("verdict phrase lists must be non-empty");
}

ProtocolConfig protocol_from_json(const nlohmann::json& j)
{
    ProtocolConfig c;
    try {
        c.protocol_version = j.value("protocol_version", c.protocol_version);
        c.assertion_template = j.value("assertion_template", c.assertion_template);
        c.clarify_template = j.value("clarify_template", c.clarify_template);
        c.relation_template = j.value("relation_template", c.relation_template);
        c.challenge_template = j.value("challenge_template", c.challenge_template);
        c.modification_template = j.value("modification_template", c.modification_template);
        c.max_children_requested = j.value("max_children_requested", c.max_children_requested);
        c.retry_limit = j.value("retry_limit", c.retry_limit);
        c.clarify_limit = j.value("clarify_limit", c.clarify_limit);
        c.ask_relation = j.value("ask_relation", c.ask_relation);
        c.force_challenge = j.value("force_challenge", c.force_challenge);
        c.ask_modification = j.value("ask_modification", c.ask_modification);
        c.reassert_modification = j.value("reassert_modification", c.reassert_modification);
        c.affirm_phrases = j.value("affirm_phrases", c.affirm_phrases);
        c.negate_phrases = j.value("negate_phrases", c.negate_phrases);
        if (j.contains("match_threshold")) {
            const auto t = j.at("match_threshold").get<std::vector<std::int64_t>>();
            if (t.size() != 2 || t[1] <= 0) throw ConfigError("match_threshold must be [numerator, denominator]");
            c.match_threshold = Ratio(t[0], t[1]);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed protocol configuration: ") + e.what());
    }
    c.validate();
    return c;
}

nlohmann::json to_json(const ProtocolConfig& c)
{
    return {{"protocol_version", c.protocol_version},
            {"assertion_template", c.assertion_template},
            {"clarify_template", c.clarify_template},
            {"relation_template", c.relation_template},
            {"challenge_template", c.challenge_template},
            {"modification_template", c.modification_template},
            {"max_children_requested", c.max_children_requested},
            {"retry_limit", c.retry_limit},
            {"clarify_limit", c.clarify_limit},
            {"ask_relation", c.ask_relation},
            {"force_challenge", c.force_challenge},
            {"ask_modification", c.ask_modification},
            {"reassert_modification", c.reassert_modification},
            {"affirm_phrases", c.affirm_phrases},
            {"negate_phrases", c.negate_phrases},
            {"match_threshold", {c.match_threshold.numerator(), c.match_threshold.denominator()}}};
}

std::string to_string(VerdictSignal v)
{
    return v == VerdictSignal::Yes ? "yes" : v == VerdictSignal::No ? "no" : "unparseable";
}

std::string to_string(ClaimedRelation r)
{
    switch (r) {
    case ClaimedRelation::Grandchild: return "grandchild";
    case ClaimedRelation::PartOf: return "part-of";
    case ClaimedRelation::TypeOf: return "type-of";
    case ClaimedRelation::Other: return "other";
    }
    return "other";
}

std::string to_string(Step s) { return kSteps[static_cast<int>(s)]; }

Step parse_step(std::string_view text)
{
    for (int i = 0; i < 6; ++i) {
        if (text == kSteps[i]) return static_cast<Step>(i);
    }
    throw ConfigError("unknown dialogue step '" + std::string(text) + "'");
}

std::string to_string(SessionStatus s)
{
    return s == SessionStatus::Complete ? "complete" : s == SessionStatus::Unparseable ? "unparseable" : "backend_error";
}

std::size_t Transcript::prompt_count() const
{
    return static_cast<std::size_t>(
        std::count_if(turns.begin(), turns.end(), [](const Turn& t) { return t.role == Turn::Role::Asker; }));
}

VerdictSignal parse_verdict(std::string_view text, const ProtocolConfig& config)
{
    const auto sentence = fold_text(first_sentence(text));
    auto spans = [&](const std::vector<std::string>& phrases) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& p : phrases) {
            const auto phrase = ascii_lower(p);
            for (std::size_t from = 0; from < sentence.size();) {
                const auto pos = find_phrase(sentence.substr(from), phrase);
                if (pos == std::string::npos) break;
                const auto at = from + pos;
                from = at + 1;
                if (at > 0 && is_word_byte(sentence[at - 1]) && is_word_byte(phrase.front())) continue;
                out.emplace_back(at, at + phrase.size());
            }
        }
        return out;
    };
    const auto negations = spans(config.negate_phrases);
    // "not correct" negates; the "correct" inside it is not an affirmation.
    const auto affirmations = spans(config.affirm_phrases);
    const bool yes = std::any_of(affirmations.begin(), affirmations.end(), [&](const auto& a) {
        return std::none_of(negations.begin(), negations.end(),
                            [&](const auto& n) { return n.first <= a.first && a.second <= n.second; });
    });
    const bool no = !negations.empty();
    if (yes == no) return VerdictSignal::Unparseable;
    return yes ? VerdictSignal::Yes : VerdictSignal::No;
}

ClaimedRelation parse_relation(std::string_view text)
{
    static const std::vector<std::pair<std::string, ClaimedRelation>> cues = {
        {"distant hierarchical", ClaimedRelation::Grandchild},
        {"distant relationship", ClaimedRelation::Grandchild},
        {"indirect", ClaimedRelation::Grandchild},
        {"grandchild", ClaimedRelation::Grandchild},
        {"grandparent", ClaimedRelation::Grandchild},
        {"ancestor", ClaimedRelation::Grandchild},
        {"part of", ClaimedRelation::PartOf},
        {"part-of", ClaimedRelation::PartOf},
        {"component of", ClaimedRelation::PartOf},
        {"type of", ClaimedRelation::TypeOf},
        {"type-of", ClaimedRelation::TypeOf},
        {"kind of", ClaimedRelation::TypeOf},
        {"unrelated", ClaimedRelation::Other},
        {"not related", ClaimedRelation::Other},
    };
    const auto folded = fold_text(text);
    std::size_t best = std::string::npos;
    ClaimedRelation result = ClaimedRelation::Other;
    for (const auto& [cue, rel] : cues) {
        const auto pos = find_phrase(folded, cue);
        if (pos < best) {
            best = pos;
            result = rel;
        }
    }
    return result;
}

std::vector<std::string> parse_enumeration(std::string_view text)
{
    auto items = list_items(text);
    if (!items.empty()) return items;
    std::string body(text);
    if (auto colon = body.rfind(':'); colon != std::string::npos) body = body.substr(colon + 1);
    for (const char* sep : {";", " and "}) {
        for (std::size_t pos; (pos = body.find(sep)) != std::string::npos;) body.replace(pos, std::strlen(sep), ",");
    }
    std::istringstream in(body);
    std::string part;
    while (std::getline(in, part, ',')) {
        auto item = strip_decoration(part);
        if (!item.empty()) items.push_back(std::move(item));
    }
    return items;
}

std::optional<std::string> parse_modification(std::string_view text)
{
    const std::string s(text);
    for (auto [open, close] : {std::pair<std::string, std::string>{"\xE2\x80\x9C", "\xE2\x80\x9D"},
                               std::pair<std::string, std::string>{"\"", "\""}}) {
        if (auto b = s.find(open); b != std::string::npos) {
            const auto start = b + open.size();
            if (auto e = s.find(close, start); e != std::string::npos && e > start) {
                return trim(s.substr(start, e - start));
            }
        }
    }
    auto items = list_items(text);
    if (!items.empty()) return items.front();
    return std::nullopt;
}

std::vector<std::string> content_tokens(std::string_view label)
{
    const auto norm = normalize_label(label);
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && !stopwords().contains(cur)) out.push_back(stem(cur));
        cur.clear();
    };
    for (char c : norm) {
        if (is_word_byte(c)) {
            cur += c;
        } else {
            flush();
        }
    }
    flush();
    return out;
}

bool enumeration_matches(std::string_view child_label, std::string_view item, const Ratio& threshold)
{
    const auto child = normalize_label(child_label);
    if (!child.empty() && normalize_label(item).find(child) != std::string::npos) return true;
    const auto child_tokens = content_tokens(child_label);
    const std::set<std::string> wanted(child_tokens.begin(), child_tokens.end());
    if (wanted.empty()) return false;
    const auto item_tokens = content_tokens(item);
    const std::set<std::string> have(item_tokens.begin(), item_tokens.end());
    std::int64_t overlap = 0;
    for (const auto& w : wanted) overlap += have.contains(w) ? 1 : 0;
    return Ratio(overlap, static_cast<std::int64_t>(wanted.size())) >= threshold;
}

ParsedSignals parse_signals(const Transcript& t, const ProtocolConfig& config)
{
    ParsedSignals s;
    Step phase = Step::Assert;
    std::string denial;
    std::optional<std::string> relation_reply;
    for (const auto& turn : t.turns) {
        if (turn.role == Turn::Role::Asker) {
            if (turn.step != Step::Clarify) phase = turn.step;
            continue;
        }
        switch (phase) {
        case Step::Assert:
        case Step::Clarify:
            s.initial_verdict = parse_verdict(turn.text, config);
            denial = turn.text;
            break;
        case Step::Relation:
            relation_reply = turn.text;
            break;
        case Step::Challenge:
            s.enumeration = parse_enumeration(turn.text);
            break;
        case Step::Modify:
            s.modification = parse_modification(turn.text);
            break;
        case Step::Reassert:
            s.reassert_verdict = parse_verdict(turn.text, config);
            break;
        }
    }
    if (s.initial_verdict == VerdictSignal::No) s.claimed_relation = combine_claims(denial, relation_reply);
    return s;
}

std::string render_template(std::string_view templ, const ConceptPair& pair, std::size_t n)
{
    std::string out(templ);
    auto replace = [&](const std::string& slot, const std::string& value) {
        for (std::size_t pos = 0; (pos = out.find(slot, pos)) != std::string::npos; pos += value.size()) {
            out.replace(pos, slot.size(), value);
        }
    };
    replace("{parent}", pair.parent_label);
    replace("{child}", pair.child_label);
    replace("{n}", std::to_string(n));
    return out;
}

Clock system_clock()
{
    return [](std::size_t, std::size_t) {
        return format_utc(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now()));
    };
}

Clock logical_clock(std::int64_t start_epoch)
{
    return [start_epoch](std::size_t session, std::size_t turn) {
        return format_utc(static_cast<std::time_t>(start_epoch + static_cast<std::int64_t>(session) * 3600 +
                                                   static_cast<std::int64_t>(turn)));
    };
}

Transcript run_session(const ConceptPair& pair, std::size_t session, const ProtocolConfig& config, Backend& backend,
                       const Clock& clock, TranscriptSink* sink)
{
    Transcript t;
    t.session = session;
    t.pair = pair;
    t.backend_id = backend.id();
    t.protocol_version = config.protocol_version;
    if (sink) sink->begin(t);

    auto record = [&](Turn::Role role, Step step, std::string text) {
        t.turns.push_back({role, step, std::move(text), clock(session, t.turns.size())});
        if (sink) sink->turn(t.turns.back());
    };
    auto ask = [&](Step step, const std::string& prompt) -> std::optional<std::string> {
        const std::vector<Turn> history = t.turns;
        record(Turn::Role::Asker, step, prompt);
        std::string last_error;
        std::optional<std::string> reply;
        for (std::size_t attempt = 0; attempt <= config.retry_limit && !reply; ++attempt) {
            try {
                reply = backend.respond(PromptContext{pair, session, step, history, prompt});
            } catch (const std::exception& e) {
                last_error = e.what();
            }
        }
        if (!reply) {
            t.status = SessionStatus::BackendError;
            t.note = "backend failed after " + std::to_string(config.retry_limit + 1) + " attempts: " + last_error;
            return std::nullopt;
        }
        record(Turn::Role::Responder, step, *reply);
        return reply;
    };
    auto ask_verdict = [&](Step step, const ConceptPair& asked) -> std::optional<std::pair<VerdictSignal, std::string>> {
        auto reply = ask(step, render_template(config.assertion_template, asked));
        if (!reply) return std::nullopt;
        auto verdict = parse_verdict(*reply, config);
        for (std::size_t k = 0; verdict == VerdictSignal::Unparseable && k < config.clarify_limit; ++k) {
            reply = ask(Step::Clarify, render_template(config.clarify_template, asked));
            if (!reply) return std::nullopt;
            verdict = parse_verdict(*reply, config);
        }
        return std::make_pair(verdict, *reply);
    };
    auto finish = [&] {
        if (sink) sink->end(t);
        return t;
    };

    const auto initial = ask_verdict(Step::Assert, pair);
    if (!initial) return finish();
    if (initial->first == VerdictSignal::Unparseable) {
        t.status = SessionStatus::Unparseable;
        t.note = "no yes/no verdict after " + std::to_string(config.clarify_limit) + " clarification prompts";
        return finish();
    }
    if (initial->first == VerdictSignal::Yes) return finish();

    std::optional<std::string> relation_reply;
    if (config.ask_relation) {
        relation_reply = ask(Step::Relation, render_template(config.relation_template, pair));
        if (!relation_reply) return finish();
    }
    const auto claimed = combine_claims(initial->second, relation_reply);
    // The enumeration challenge targets pairs the ontology holds to be direct
    // IS-A links that the responder demoted to a distant relation.
    const bool challenge =
        config.force_challenge || (claimed == ClaimedRelation::Grandchild && pair.stratum == Stratum::Child);
    if (challenge) {
        if (!ask(Step::Challenge, render_template(config.challenge_template, pair, config.max_children_requested))) {
            return finish();
        }
    }
    if (config.ask_modification) {
        const auto reply = ask(Step::Modify, render_template(config.modification_template, pair));
        if (!reply) return finish();
        if (auto suggestion = parse_modification(*reply); suggestion && config.reassert_modification) {
            ConceptPair modified = pair;
            modified.child_label = *suggestion;
            if (!ask_verdict(Step::Reassert, modified)) return finish();
        }
    }
    return finish();
}

std::vector<Transcript> run_sessions(const std::vector<ConceptPair>& pairs, const ProtocolConfig& config,
                                     Backend& backend, const Clock& clock, const std::string& out_dir,
                                     std::size_t parallelism)
{
    config.validate();
    if (!out_dir.empty()) fs::create_directories(out_dir);
    std::vector<Transcript> results(pairs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < pairs.size();) {
            try {
                if (out_dir.empty()) {
                    results[i] = run_session(pairs[i], i + 1, config, backend, clock, nullptr);
                } else {
                    JsonlDirectorySink sink(out_dir);
                    results[i] = run_session(pairs[i], i + 1, config, backend, clock, &sink);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const auto n = std::max<std::size_t>(1, std::min(parallelism, pairs.size()));
    std::vector<std::thread> threads;
    for (std::size_t k = 0; k < n; ++k) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

std::string to_string(Outcome o) { return kOutcomes[static_cast<int>(o)]; }

std::vector<Outcome> all_outcomes()
{
    std::vector<Outcome> out;
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<Outcome>(i));
    return out;
}

Outcome classify_outcome(const Transcript& t, const ProtocolConfig& config)
{
    if (t.status != SessionStatus::Complete) return Outcome::Unparseable;
    const auto s = parse_signals(t, config);
    if (s.initial_verdict == VerdictSignal::Unparseable) return Outcome::Unparseable;
    const bool yes = s.initial_verdict == VerdictSignal::Yes;
    const auto claim = s.claimed_relation.value_or(ClaimedRelation::Other);
    switch (t.pair.stratum) {
    case Stratum::Child:
        if (yes) return Outcome::AgreedChild;
        if (s.enumeration) {
            const bool found = std::any_of(s.enumeration->begin(), s.enumeration->end(), [&](const std::string& item) {
                return enumeration_matches(t.pair.child_label, item, config.match_threshold);
            });
            return found ? Outcome::RecoveredChild : Outcome::NotRecovered;
        }
        if (claim == ClaimedRelation::PartOf) return Outcome::PartOf;
        if (claim == ClaimedRelation::TypeOf) return Outcome::TypeOf;
        return Outcome::NotRecovered;
    case Stratum::Grandparent:
        if (yes || claim == ClaimedRelation::Grandchild) return Outcome::GrandparentConfirmed;
        if (claim == ClaimedRelation::PartOf) return Outcome::PartOf;
        if (claim == ClaimedRelation::TypeOf) return Outcome::TypeOf;
        return Outcome::NotRecovered;
    case Stratum::Unrelated:
        if (yes) return Outcome::AgreedChild;
        if (claim == ClaimedRelation::PartOf) return Outcome::PartOf;
        if (claim == ClaimedRelation::TypeOf) return Outcome::TypeOf;
        if (claim == ClaimedRelation::Grandchild) return Outcome::NotRecovered;
        return Outcome::UnrelatedConfirmed;
    }
    return Outcome::Unparseable;
}

ConcordanceReport aggregate(const std::vector<Transcript>& transcripts, const std::vector<Outcome>& outcomes)
{
    if (transcripts.size() != outcomes.size()) {
        throw StatsError(std::to_string(outcomes.size()) + " outcomes for " + std::to_string(transcripts.size()) +
                         " transcripts");
    }
    ConcordanceReport r;
    for (auto o : all_outcomes()) r.counts[o] = 0;
    for (auto s : {Stratum::Child, Stratum::Grandparent, Stratum::Unrelated}) {
        r.stratum_totals[s] = 0;
        for (auto o : all_outcomes()) r.by_stratum[s][o] = 0;
    }
    for (std::size_t i = 0; i < transcripts.size(); ++i) {
        const auto& t = transcripts[i];
        ++r.counts[outcomes[i]];
        ++r.by_stratum[t.pair.stratum][outcomes[i]];
        ++r.stratum_totals[t.pair.stratum];
        r.prompt_count += t.prompt_count();
        if (std::any_of(t.turns.begin(), t.turns.end(), [](const Turn& turn) {
                return turn.role == Turn::Role::Asker && turn.step == Step::Challenge;
            })) {
            ++r.challenged;
        }
    }
    r.pair_count = transcripts.size();
    return r;
}

ConcordanceReport aggregate(const std::vector<Transcript>& transcripts, const std::vector<Outcome>& outcomes,
                            const PairSheet& sheet)
{
    auto r = aggregate(transcripts, outcomes);
    if (r.pair_count != sheet.pairs.size()) {
        throw StatsError(std::to_string(r.pair_count) + " sessions for a sheet of " +
                         std::to_string(sheet.pairs.size()) + " pairs");
    }
    for (auto s : {Stratum::Child, Stratum::Grandparent, Stratum::Unrelated}) {
        if (r.stratum_totals[s] != sheet.quota[s]) {
            throw StatsError("stratum " + to_string(s) + " has " + std::to_string(r.stratum_totals[s]) +
                             " sessions but the sheet quota is " + std::to_string(sheet.quota[s]));
        }
    }
    return r;
}

nlohmann::json to_json(const ConcordanceReport& r)
{
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [o, n] : r.counts) counts[to_string(o)] = n;
    nlohmann::json strata = nlohmann::json::object();
    for (const auto& [s, m] : r.by_stratum) {
        nlohmann::json row = nlohmann::json::object();
        for (const auto& [o, n] : m) {
            if (n > 0) row[to_string(o)] = n;
        }
        strata[to_string(s)] = {{"total", r.stratum_totals.at(s)}, {"outcomes", row}};
    }
    return {{"pair_count", r.pair_count},
            {"prompt_count", r.prompt_count},
            {"challenged", r.challenged},
            {"outcomes", counts},
            {"by_stratum", strata},
            {"notes",
             {{"type_of", "listed next to agreed_child as a near-IS-A answer; not added to agreed_child"}}}};
}

std::string transcript_file_name(std::size_t session)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "session-%04zu.jsonl", session);
    return buf;
}

std::string transcript_to_jsonl(const Transcript& t)
{
    std::string out = header_record(t).dump() + "\n";
    for (const auto& turn : t.turns) out += turn_record(turn).dump() + "\n";
    out += end_record(t).dump() + "\n";
    return out;
}

Transcript transcript_from_jsonl(std::string_view text)
{
    Transcript t;
    bool seen_header = false;
    bool seen_end = false;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    try {
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            const auto j = nlohmann::json::parse(line);
            const auto kind = j.at("record").get<std::string>();
            if (seen_end) throw ConfigError("record after end of session");
            if (kind == "session") {
                if (seen_header) throw ConfigError("duplicate session header");
                seen_header = true;
                t.session = j.at("session").get<std::size_t>();
                t.pair = pair_from_json(j.at("pair"));
                t.backend_id = j.value("backend", std::string());
                t.protocol_version = j.value("protocol_version", std::string());
            } else if (kind == "turn") {
                if (!seen_header) throw ConfigError("turn before session header");
                Turn turn;
                const auto role = j.at("role").get<std::string>();
                if (role != "asker" && role != "responder") throw ConfigError("unknown role '" + role + "'");
                turn.role = role == "asker" ? Turn::Role::Asker : Turn::Role::Responder;
                const auto expected = t.turns.size() % 2 == 0 ? Turn::Role::Asker : Turn::Role::Responder;
                if (turn.role != expected) throw ConfigError("turns must alternate starting with the asker");
                turn.step = parse_step(j.at("step").get<std::string>());
                turn.text = j.at("text").get<std::string>();
                turn.timestamp = j.value("timestamp", std::string());
                t.turns.push_back(std::move(turn));
            } else if (kind == "end") {
                seen_end = true;
                t.status = parse_status(j.at("status").get<std::string>());
                t.note = j.value("note", std::string());
            } else {
                throw ConfigError("unknown record type '" + kind + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed transcript line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError("transcript line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen_header) throw ConfigError("transcript has no session header");
    if (!seen_end) {
        t.status = SessionStatus::BackendError;
        t.note = "transcript ends without an end record";
    }
    return t;
}

void write_transcript(const Transcript& t, const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write transcript " + path);
    out << transcript_to_jsonl(t);
}

Transcript read_transcript(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open transcript " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return transcript_from_jsonl(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::vector<Transcript> read_corpus(const std::string& dir)
{
    if (!fs::is_directory(dir)) throw ConfigError("transcript corpus " + dir + " is not a directory");
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    std::vector<Transcript> out;
    for (const auto& f : files) out.push_back(read_transcript(f));
    std::stable_sort(out.begin(), out.end(), [](const Transcript& a, const Transcript& b) { return a.session < b.session; });
    return out;
}

void JsonlDirectorySink::begin(const Transcript& header)
{
    path_ = (fs::path(dir_) / transcript_file_name(header.session)).string();
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write transcript " + path_);
    out << header_record(header).dump() << '\n';
}

void JsonlDirectorySink::turn(const Turn& turn) { append(turn_record(turn).dump()); }

void JsonlDirectorySink::end(const Transcript& transcript) { append(end_record(transcript).dump()); }

void JsonlDirectorySink::append(const std::string& line)
{
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw ConfigError("cannot append to transcript " + path_);
    out << line << '\n';
    out.flush();
}

} // namespace ontoeval
