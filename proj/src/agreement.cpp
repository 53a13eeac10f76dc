#include "ontoeval/agreement.hpp"

#include "ontoeval/error.hpp"

#include <algorithm>
#include <cmath>

namespace ontoeval {

namespace {

using boost::multiprecision::cpp_int;

void check_lengths(std::size_t n1, std::size_t n2)
{
    if (n1 != n2) {
        throw StatsError("rating vectors differ in length (" + std::to_string(n1) + " vs " + std::to_string(n2) + ")");
    }
    if (n1 == 0) throw StatsError("rating vectors are empty");
}

/// C(n, k) by the multiplicative formula; exact at every step.
cpp_int binomial(std::int64_t n, std::int64_t k)
{
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    cpp_int r = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

double log_binomial(std::int64_t n, std::int64_t k)
{
    return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
           std::lgamma(static_cast<double>(n - k) + 1);
}

} // namespace

std::string to_string(RatingBasis b) { return b == RatingBasis::Pooled ? "pooled" : "child"; }

RatingBasis parse_rating_basis(std::string_view text)
{
    if (text == "pooled") return RatingBasis::Pooled;
    if (text == "child") return RatingBasis::ChildOnly;
    throw ConfigError("rating basis must be \"pooled\" or \"child\", got '" + std::string(text) + "'");
}

Verdict verdict_of(const Judgment& j, RatingBasis basis)
{
    const bool include = j.is_child == Answer::Yes || (basis == RatingBasis::Pooled && j.farther_away);
    return include ? Verdict::Include : Verdict::Exclude;
}

RatingVector ratings_from_judgments(const std::vector<Judgment>& judgments, RatingBasis basis)
{
    RatingVector out;
    out.reserve(judgments.size());
    for (const auto& j : judgments) out.push_back(verdict_of(j, basis));
    return out;
}

Ratio percent_agreement(const RatingVector& r1, const RatingVector& r2)
{
    check_lengths(r1.size(), r2.size());
    std::int64_t same = 0;
    for (std::size_t i = 0; i < r1.size(); ++i) same += r1[i] == r2[i] ? 1 : 0;
    return Ratio(same, static_cast<std::int64_t>(r1.size()));
}

KappaResult kappa_from_table(const AgreementTable& t)
{
    if (t.both_include < 0 || t.both_exclude < 0 || t.only_first < 0 || t.only_second < 0) {
        throw StatsError("agreement table has negative counts");
    }
    const auto n = t.total();
    if (n == 0) throw StatsError("agreement table is empty");
    KappaResult r;
    r.table = t;
    r.observed = Ratio(t.both_include + t.both_exclude, n);
    const auto first_inc = t.both_include + t.only_first;
    const auto second_inc = t.both_include + t.only_second;
    r.expected = Ratio(first_inc * second_inc + (n - first_inc) * (n - second_inc), n * n);
    if (r.expected != Ratio(1)) r.kappa = (r.observed - r.expected) / (Ratio(1) - r.expected);
    return r;
}

KappaResult cohens_kappa(const RatingVector& r1, const RatingVector& r2)
{
    check_lengths(r1.size(), r2.size());
    AgreementTable t;
    for (std::size_t i = 0; i < r1.size(); ++i) {
        const bool a = r1[i] == Verdict::Include;
        const bool b = r2[i] == Verdict::Include;
        if (a && b) {
            ++t.both_include;
        } else if (!a && !b) {
            ++t.both_exclude;
        } else if (a) {
            ++t.only_first;
        } else {
            ++t.only_second;
        }
    }
    return kappa_from_table(t);
}

Matrix2x2 confusion_matrix(const RatingVector& ratings, const std::vector<bool>& related)
{
    check_lengths(ratings.size(), related.size());
    Matrix2x2 m;
    for (std::size_t i = 0; i < ratings.size(); ++i) {
        const bool inc = ratings[i] == Verdict::Include;
        if (inc && related[i]) {
            ++m.a;
        } else if (inc) {
            ++m.b;
        } else if (related[i]) {
            ++m.c;
        } else {
            ++m.d;
        }
    }
    return m;
}

std::vector<bool> pooled_truth(const std::vector<ConceptPair>& pairs)
{
    std::vector<bool> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(p.stratum != Stratum::Unrelated);
    return out;
}

FisherResult fisher_exact(const Matrix2x2& m, const FisherOptions& options)
{
    if (m.a < 0 || m.b < 0 || m.c < 0 || m.d < 0) throw StatsError("contingency table has negative cells");
    const auto n = m.total();
    if (n == 0) throw StatsError("contingency table is empty");
    const auto row1 = m.a + m.b;
    const auto row2 = m.c + m.d;
    const auto col1 = m.a + m.c;
    const auto lo = std::max<std::int64_t>(0, col1 - row2);
    const auto hi = std::min(row1, col1);

    FisherResult result;
    if (n <= options.exact_total_limit) {
        // P(x) = C(row1, x) C(row2, col1 - x) / C(n, col1); compare numerators only.
        const cpp_int observed = binomial(row1, m.a) * binomial(row2, col1 - m.a);
        cpp_int tail = 0;
        for (auto x = lo; x <= hi; ++x) {
            cpp_int w = binomial(row1, x) * binomial(row2, col1 - x);
            if (w <= observed) tail += w;
        }
        BigRational p(tail, binomial(n, col1));
        result.p = p.convert_to<double>();
        result.exact = std::move(p);
        return result;
    }
    const double denom = log_binomial(n, col1);
    auto logp = [&](std::int64_t x) { return log_binomial(row1, x) + log_binomial(row2, col1 - x) - denom; };
    const double observed = logp(m.a);
    double sum = 0.0;
    for (auto x = lo; x <= hi; ++x) {
        const double lp = logp(x);
        if (lp <= observed + 1e-7 * std::abs(observed) + 1e-12) sum += std::exp(lp);
    }
    result.p = std::min(1.0, sum);
    return result;
}

} // namespace ontoeval
