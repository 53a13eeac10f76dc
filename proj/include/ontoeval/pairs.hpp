#pragma once

#include "ontoeval/taxonomy.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace ontoeval {

enum class Stratum { Child, Grandparent, Unrelated };

std::string to_string(Stratum s);
/// Throws ConfigError for anything but child / grandparent / unrelated.
Stratum parse_stratum(std::string_view text);

struct ConceptPair {
    std::string parent_label;
    std::string child_label;
    std::string parent_iri;
    std::string child_iri;
    Stratum stratum = Stratum::Child;

    friend bool operator==(const ConceptPair&, const ConceptPair&) = default;
};

struct Quota {
    std::size_t child = 0;
    std::size_t grandparent = 0;
    std::size_t unrelated = 0;

    std::size_t total() const noexcept { return child + grandparent + unrelated; }
    std::size_t& operator[](Stratum s);
    std::size_t operator[](Stratum s) const;

    friend bool operator==(const Quota&, const Quota&) = default;
};

/// "32,14,44" -> {32, 14, 44}. Throws ConfigError otherwise.
Quota parse_quota(std::string_view text);

/// Largest-remainder split of `n` rows across the strata of `quota`
/// (ties go to the earlier stratum).
Quota proportional_split(const Quota& quota, std::size_t n);

/// Uniform integers from mt19937_64 by rejection, so sequences do not
/// depend on the standard library's distribution implementations.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n);

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

struct SamplingOptions {
    std::size_t grandparent_min_distance = 2;
    std::size_t grandparent_max_distance = 4;
    /// Training rows placed first with pre-filled answers. Unset means none.
    std::optional<Quota> training;
    std::size_t rejection_attempts_per_pair = 64;
};

struct CandidateCounts {
    std::size_t child = 0;
    std::size_t grandparent = 0;
    std::size_t unrelated = 0;  // unordered pairs
};

CandidateCounts count_candidates(const TaxonomyGraph& graph, const SamplingOptions& options = {});

struct PairSheet {
    std::vector<ConceptPair> pairs;
    std::size_t training_prefix = 0;
    std::uint64_t seed = 0;
    Quota quota;
    std::size_t grandparent_max_distance = 4;
    std::string source_ontology;
    std::string source_sha256;

    friend bool operator==(const PairSheet&, const PairSheet&) = default;
};

/// Draws exactly quota-many pairs per stratum without replacement and
/// shuffles them. Throws QuotaError naming the available counts when a
/// stratum cannot be filled.
PairSheet sample_pairs(const TaxonomyGraph& graph, const Quota& quota, std::uint64_t seed,
                       const SamplingOptions& options = {});

enum class Answer { Blank, Yes, No };

struct Judgment {
    std::size_t pair_index = 0;
    Answer is_child = Answer::Blank;
    bool farther_away = false;
    std::string reason;

    friend bool operator==(const Judgment&, const Judgment&) = default;
};

inline constexpr const char* kRelationColumn = "\xE2\x86\x90IS-A-";
inline constexpr const char* kGrandparentReason = "The concepts share a grandparent-child relationship";

std::vector<std::string> sheet_header();

/// Pre-filled answer shown on a training row.
Judgment training_answer(const ConceptPair& pair, std::size_t index);

/// Blank sheet; training rows carry their pre-filled answers.
std::string export_sheet(const PairSheet& sheet);

/// Sheet with judgments filled in by pair_index (training rows keep their
/// pre-filled answers unless a judgment overrides them).
std::string export_judgments(const PairSheet& sheet, const std::vector<Judgment>& judgments);

struct ImportResult {
    std::vector<Judgment> judgments;
    std::vector<std::string> warnings;
};

/// Validates header, row count and pair labels, then reads one judgment per
/// row. Throws ImportError with the offending row.
ImportResult import_judgments(std::string_view csv_text, const PairSheet& sheet);

/// Sidecar manifest: seed, quotas, source hash and the row -> IRI map.
nlohmann::json sheet_to_json(const PairSheet& sheet);
PairSheet sheet_from_json(const nlohmann::json& j);

void save_sheet_sidecar(const PairSheet& sheet, const std::string& path);
PairSheet load_sheet_sidecar(const std::string& path);

} // namespace ontoeval
