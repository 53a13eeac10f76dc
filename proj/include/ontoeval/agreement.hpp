#pragma once

#include "ontoeval/metrics.hpp"
#include "ontoeval/pairs.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace ontoeval {

enum class Verdict { Include, Exclude };

using RatingVector = std::vector<Verdict>;
using BigRational = boost::multiprecision::cpp_rational;

/// Which answers count as "include".
enum class RatingBasis {
    Pooled,     // Child?=Yes or Farther away=Yes
    ChildOnly,  // Child?=Yes
};

std::string to_string(RatingBasis b);
/// Accepts "pooled" or "child"; throws ConfigError otherwise.
RatingBasis parse_rating_basis(std::string_view text);

Verdict verdict_of(const Judgment& j, RatingBasis basis = RatingBasis::Pooled);
RatingVector ratings_from_judgments(const std::vector<Judgment>& judgments, RatingBasis basis = RatingBasis::Pooled);

/// Throws StatsError on length mismatch or empty input.
Ratio percent_agreement(const RatingVector& r1, const RatingVector& r2);

struct AgreementTable {
    std::int64_t both_include = 0;
    std::int64_t both_exclude = 0;
    std::int64_t only_first = 0;   // first includes, second excludes
    std::int64_t only_second = 0;

    std::int64_t total() const noexcept { return both_include + both_exclude + only_first + only_second; }
    friend bool operator==(const AgreementTable&, const AgreementTable&) = default;
};

struct KappaResult {
    /// Unset when p_e == 1 (both raters constant and equal).
    std::optional<Ratio> kappa;
    Ratio observed;  // p_o
    Ratio expected;  // p_e
    AgreementTable table;

    bool degenerate() const noexcept { return !kappa.has_value(); }
};

KappaResult kappa_from_table(const AgreementTable& table);
KappaResult cohens_kappa(const RatingVector& r1, const RatingVector& r2);

/// Rows are the evaluator's verdict (include, exclude); columns the pooled
/// ground truth (related, unrelated).
struct Matrix2x2 {
    std::int64_t a = 0;  // include, related
    std::int64_t b = 0;  // include, unrelated
    std::int64_t c = 0;  // exclude, related
    std::int64_t d = 0;  // exclude, unrelated

    std::int64_t total() const noexcept { return a + b + c + d; }
    friend bool operator==(const Matrix2x2&, const Matrix2x2&) = default;
};

/// `related[i]` is true for child and grandparent pairs.
Matrix2x2 confusion_matrix(const RatingVector& ratings, const std::vector<bool>& related);

std::vector<bool> pooled_truth(const std::vector<ConceptPair>& pairs);

struct FisherOptions {
    /// Tables with more observations than this use log-space probabilities.
    std::int64_t exact_total_limit = 20000;
};

struct FisherResult {
    /// Exact two-tailed p; unset when the log-space path was taken.
    std::optional<BigRational> exact;
    double p = 1.0;
};

/// Two-tailed Fisher exact test: sum of the hypergeometric probabilities of
/// every table with the observed margins that is no more likely than the
/// observed one. Throws StatsError for negative cells or an empty table.
FisherResult fisher_exact(const Matrix2x2& m, const FisherOptions& options = {});

} // namespace ontoeval
