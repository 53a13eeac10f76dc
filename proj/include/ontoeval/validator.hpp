#pragma once

#include "ontoeval/metrics.hpp"
#include "ontoeval/pairs.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ontoeval {

class Backend;

/// Prompts and parsing rules for the IS-A concordance dialogue. Templates use
/// {parent}, {child} and {n} slots.
struct ProtocolConfig {
    std::string protocol_version = "isa-concordance/1";
    std::string assertion_template = "\"{parent}\" \xE2\x86\x90IS-A\xE2\x80\x94 \"{child}\" is this a valid IS-A relationship?";
    std::string clarify_template =
        "Please answer yes or no first: is \"{child}\" a child concept (IS-A) of \"{parent}\"?";
    std::string relation_template =
        "How would you define the relationship between \"{parent}\" and \"{child}\"?";
    std::string challenge_template = "Return {n} concepts that have IS-A relationships to \"{parent}\".";
    std::string modification_template =
        "How could the concept \"{child}\" be modified so that it is a child of \"{parent}\"?";
    std::size_t max_children_requested = 10;
    std::size_t retry_limit = 2;       // extra attempts after a failed backend call
    std::size_t clarify_limit = 2;     // clarification prompts per verdict question
    bool ask_relation = true;
    bool force_challenge = false;      // challenge every denial, not only distant-hierarchy claims
    bool ask_modification = true;
    bool reassert_modification = true;
    std::vector<std::string> affirm_phrases = {"yes", "this is a valid", "it is a valid", "that is a valid",
                                               "correct", "is indeed"};
    std::vector<std::string> negate_phrases = {"no", "not a valid", "not valid", "not a strict", "do not share",
                                               "does not share", "is not", "isn't", "incorrect", "not correct"};
    /// Fraction of the child's content tokens an enumerated item must contain.
    Ratio match_threshold{2, 3};

    /// Throws ConfigError when a template lacks a required slot.
    void validate() const;
};

ProtocolConfig protocol_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProtocolConfig& config);

enum class VerdictSignal { Yes, No, Unparseable };
enum class ClaimedRelation { Grandchild, PartOf, TypeOf, Other };

std::string to_string(VerdictSignal v);
std::string to_string(ClaimedRelation r);

enum class Step { Assert, Clarify, Relation, Challenge, Modify, Reassert };
std::string to_string(Step s);
Step parse_step(std::string_view text);

struct Turn {
    enum class Role { Asker, Responder };
    Role role = Role::Asker;
    Step step = Step::Assert;
    std::string text;
    std::string timestamp;

    friend bool operator==(const Turn&, const Turn&) = default;
};

enum class SessionStatus { Complete, Unparseable, BackendError };
std::string to_string(SessionStatus s);

struct ParsedSignals {
    VerdictSignal initial_verdict = VerdictSignal::Unparseable;
    std::optional<ClaimedRelation> claimed_relation;
    std::optional<std::vector<std::string>> enumeration;
    std::optional<std::string> modification;
    std::optional<VerdictSignal> reassert_verdict;

    friend bool operator==(const ParsedSignals&, const ParsedSignals&) = default;
};

struct Transcript {
    std::size_t session = 0;  // 1-based row in the sheet
    ConceptPair pair;
    std::vector<Turn> turns;
    SessionStatus status = SessionStatus::Complete;
    std::string note;  // failure detail
    std::string backend_id;
    std::string protocol_version;

    std::size_t prompt_count() const;
    friend bool operator==(const Transcript&, const Transcript&) = default;
};

/// First-sentence verdict. Both or neither phrase lists matching yields
/// Unparseable.
VerdictSignal parse_verdict(std::string_view text, const ProtocolConfig& config);

/// Earliest relation cue in the text; Other when none is found.
ClaimedRelation parse_relation(std::string_view text);

/// List items (numbered, bulleted, or one per line) with explanations after
/// ':' or " - " removed; falls back to comma-separated phrases.
std::vector<std::string> parse_enumeration(std::string_view text);

/// First quoted phrase, else the first list item.
std::optional<std::string> parse_modification(std::string_view text);

/// Lower-cased, stopword-free, lightly stemmed tokens.
std::vector<std::string> content_tokens(std::string_view label);

/// True when `item` contains the child label after normalization, or holds
/// at least `threshold` of the child's content tokens.
bool enumeration_matches(std::string_view child_label, std::string_view item, const Ratio& threshold);

/// Signals recomputed from the responder turns.
ParsedSignals parse_signals(const Transcript& t, const ProtocolConfig& config);

std::string render_template(std::string_view templ, const ConceptPair& pair, std::size_t n = 0);

/// Receives every turn before the next prompt is sent.
class TranscriptSink {
public:
    virtual ~TranscriptSink() = default;
    virtual void begin(const Transcript& header) = 0;
    virtual void turn(const Turn& turn) = 0;
    virtual void end(const Transcript& transcript) = 0;
};

/// Timestamp source, called with the session number and turn index.
using Clock = std::function<std::string(std::size_t session, std::size_t turn)>;
/// UTC wall-clock time.
Clock system_clock();
/// Deterministic: `start_epoch` plus one hour per session plus one second
/// per turn, so concurrent runs stamp identically.
Clock logical_clock(std::int64_t start_epoch = 1677628800);

/// Runs the dialogue for one pair. Backend failures and unparseable answers
/// end the session with the partial transcript; they are never thrown.
Transcript run_session(const ConceptPair& pair, std::size_t session, const ProtocolConfig& config,
                       Backend& backend, const Clock& clock, TranscriptSink* sink = nullptr);

/// Runs every pair, up to `parallelism` sessions at once, and writes one
/// JSONL transcript per session into `out_dir` when non-empty.
std::vector<Transcript> run_sessions(const std::vector<ConceptPair>& pairs, const ProtocolConfig& config,
                                     Backend& backend, const Clock& clock, const std::string& out_dir,
                                     std::size_t parallelism = 4);

enum class Outcome {
    AgreedChild,
    TypeOf,
    RecoveredChild,
    NotRecovered,
    PartOf,
    GrandparentConfirmed,
    UnrelatedConfirmed,
    Unparseable
};

std::string to_string(Outcome o);
std::vector<Outcome> all_outcomes();

Outcome classify_outcome(const Transcript& t, const ProtocolConfig& config = {});

struct ConcordanceReport {
    std::map<Outcome, std::size_t> counts;
    std::map<Stratum, std::map<Outcome, std::size_t>> by_stratum;
    std::map<Stratum, std::size_t> stratum_totals;
    std::size_t pair_count = 0;
    std::size_t prompt_count = 0;
    std::size_t challenged = 0;
};

/// Throws StatsError when the number of outcomes differs from the number
/// of transcripts.
ConcordanceReport aggregate(const std::vector<Transcript>& transcripts, const std::vector<Outcome>& outcomes);

/// Additionally checks that stratum totals equal the sheet's quotas.
ConcordanceReport aggregate(const std::vector<Transcript>& transcripts, const std::vector<Outcome>& outcomes,
                            const PairSheet& sheet);

nlohmann::json to_json(const ConcordanceReport& report);

// Transcript storage: one JSON-lines file per session.
std::string transcript_file_name(std::size_t session);
std::string transcript_to_jsonl(const Transcript& t);
Transcript transcript_from_jsonl(std::string_view text);
void write_transcript(const Transcript& t, const std::string& path);
Transcript read_transcript(const std::string& path);
/// Every *.jsonl file in the directory, ordered by session number.
std::vector<Transcript> read_corpus(const std::string& dir);

/// Appends each record to `<dir>/<session file>` as it arrives.
class JsonlDirectorySink : public TranscriptSink {
public:
    explicit JsonlDirectorySink(std::string dir) : dir_(std::move(dir)) {}
    void begin(const Transcript& header) override;
    void turn(const Turn& turn) override;
    void end(const Transcript& transcript) override;

private:
    void append(const std::string& line);
    std::string dir_;
    std::string path_;
};

} // namespace ontoeval
