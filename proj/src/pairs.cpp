#include "ontoeval/pairs.hpp"

#include "ontoeval/csv.hpp"
#include "ontoeval/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace ontoeval {

namespace {

using NodeId = TaxonomyGraph::NodeId;

/// Shortest upward distance to every proper ancestor, root excluded.
std::vector<std::vector<std::pair<NodeId, std::size_t>>> ancestor_distances(const TaxonomyGraph& g)
{
    std::vector<std::vector<std::pair<NodeId, std::size_t>>> out(g.node_count());
    std::vector<std::size_t> dist(g.node_count(), std::numeric_limits<std::size_t>::max());
    std::vector<NodeId> touched;
    for (NodeId n = 1; n < g.node_count(); ++n) {
        std::deque<NodeId> queue{n};
        dist[n] = 0;
        touched.assign(1, n);
        while (!queue.empty()) {
            auto x = queue.front();
            queue.pop_front();
            for (auto p : g.parents(x)) {
                if (dist[p] != std::numeric_limits<std::size_t>::max()) continue;
                dist[p] = dist[x] + 1;
                touched.push_back(p);
                queue.push_back(p);
                if (p != TaxonomyGraph::kRoot) out[n].emplace_back(p, dist[p]);
            }
        }
        for (auto t : touched) dist[t] = std::numeric_limits<std::size_t>::max();
        std::sort(out[n].begin(), out[n].end());
    }
    return out;
}

bool is_ancestor(const std::vector<std::pair<NodeId, std::size_t>>& ancestors, NodeId a)
{
    auto it = std::lower_bound(ancestors.begin(), ancestors.end(), std::make_pair(a, std::size_t{0}));
    return it != ancestors.end() && it->first == a;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s)
{
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

const char* answer_text(Answer a) { return a == Answer::Yes ? "Yes" : a == Answer::No ? "No" : ""; }

csv::Row sheet_row(const ConceptPair& p, const Judgment* j)
{
    return {p.parent_label,
            kRelationColumn,
            p.child_label,
            j ? answer_text(j->is_child) : "",
            j && j->farther_away ? "Yes" : "",
            j ? j->reason : ""};
}

constexpr const char* kStrata[] = {"child", "grandparent", "unrelated"};

} // namespace

std::string to_string(Stratum s) { return kStrata[static_cast<int>(s)]; }

Stratum parse_stratum(std::string_view text)
{
    for (int i = 0; i < 3; ++i) {
        if (text == kStrata[i]) return static_cast<Stratum>(i);
    }
    throw ConfigError("unknown stratum '" + std::string(text) + "'");
}

std::size_t& Quota::operator[](Stratum s)
{
    return s == Stratum::Child ? child : s == Stratum::Grandparent ? grandparent : unrelated;
}

std::size_t Quota::operator[](Stratum s) const
{
    return s == Stratum::Child ? child : s == Stratum::Grandparent ? grandparent : unrelated;
}

Quota parse_quota(std::string_view text)
{
    std::vector<std::size_t> values;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos || item.size() > 9) {
            throw ConfigError("quota must be three non-negative integers child,grandparent,unrelated: '" +
                              std::string(text) + "'");
        }
        values.push_back(std::stoul(item));
    }
    if (values.size() != 3) {
        throw ConfigError("quota must be three non-negative integers child,grandparent,unrelated: '" +
                          std::string(text) + "'");
    }
    return {values[0], values[1], values[2]};
}

Quota proportional_split(const Quota& quota, std::size_t n)
{
    const auto total = quota.total();
    if (n > total) throw ConfigError("cannot place " + std::to_string(n) + " training rows in a sheet of " +
                                     std::to_string(total));
    Quota out;
    if (n == 0) return out;
    std::vector<std::pair<std::size_t, int>> remainders;
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        const auto s = static_cast<Stratum>(i);
        out[s] = quota[s] * n / total;
        assigned += out[s];
        remainders.emplace_back(quota[s] * n % total, i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) out[static_cast<Stratum>(remainders[k].second)] += 1;
    return out;
}

std::uint64_t SeededRng::below(std::uint64_t n)
{
    if (n == 0) throw std::invalid_argument("SeededRng::below(0)");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - (max % n + 1) % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x > limit);
    return x % n;
}

CandidateCounts count_candidates(const TaxonomyGraph& graph, const SamplingOptions& options)
{
    const auto anc = ancestor_distances(graph);
    CandidateCounts c;
    std::size_t reachable = 0;
    for (NodeId n = 1; n < graph.node_count(); ++n) {
        reachable += anc[n].size();
        for (const auto& [a, d] : anc[n]) {
            if (d == 1) ++c.child;
            if (d >= std::max<std::size_t>(2, options.grandparent_min_distance) &&
                d <= options.grandparent_max_distance) {
                ++c.grandparent;
            }
        }
    }
    const std::size_t n = graph.size();
    c.unrelated = n * (n - (n > 0 ? 1 : 0)) / 2 - std::min(reachable, n * (n - (n > 0 ? 1 : 0)) / 2);
    return c;
}

PairSheet sample_pairs(const TaxonomyGraph& graph, const Quota& quota, std::uint64_t seed,
                       const SamplingOptions& options)
{
    if (!detect_cycles(graph, 1).empty()) throw ModelError("cannot sample pairs from a taxonomy with IS-A cycles");
    const auto anc = ancestor_distances(graph);
    const std::size_t min_gp = std::max<std::size_t>(2, options.grandparent_min_distance);

    std::vector<std::pair<NodeId, NodeId>> child_candidates;  // (parent, child)
    std::vector<std::pair<NodeId, NodeId>> gp_candidates;
    for (NodeId n = 1; n < graph.node_count(); ++n) {
        for (const auto& [a, d] : anc[n]) {
            if (d == 1) child_candidates.emplace_back(a, n);
            if (d >= min_gp && d <= options.grandparent_max_distance) gp_candidates.emplace_back(a, n);
        }
    }
    const auto counts = count_candidates(graph, options);
    if (child_candidates.size() < quota.child || gp_candidates.size() < quota.grandparent ||
        counts.unrelated < quota.unrelated) {
        throw QuotaError("quota " + std::to_string(quota.child) + "," + std::to_string(quota.grandparent) + "," +
                         std::to_string(quota.unrelated) + " is infeasible; available child=" +
                         std::to_string(child_candidates.size()) + " grandparent=" +
                         std::to_string(gp_candidates.size()) + " unrelated=" + std::to_string(counts.unrelated));
    }
    if (options.training) {
        for (auto s : {Stratum::Child, Stratum::Grandparent, Stratum::Unrelated}) {
            if ((*options.training)[s] > quota[s]) {
                throw ConfigError("training rows for stratum " + to_string(s) + " exceed its quota");
            }
        }
    }

    SeededRng rng(seed);
    auto draw = [&](std::vector<std::pair<NodeId, NodeId>>& pool, std::size_t k) {
        for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
        pool.resize(k);
    };
    draw(child_candidates, quota.child);
    draw(gp_candidates, quota.grandparent);

    auto related = [&](NodeId a, NodeId b) { return a == b || is_ancestor(anc[a], b) || is_ancestor(anc[b], a); };
    std::vector<std::pair<NodeId, NodeId>> unrelated;
    std::set<std::pair<NodeId, NodeId>> chosen;
    const std::size_t n = graph.size();
    const std::size_t attempts = options.rejection_attempts_per_pair * quota.unrelated;
    for (std::size_t t = 0; t < attempts && unrelated.size() < quota.unrelated; ++t) {
        const NodeId a = 1 + rng.below(n);
        const NodeId b = 1 + rng.below(n);
        if (related(a, b) || !chosen.emplace(std::min(a, b), std::max(a, b)).second) continue;
        unrelated.emplace_back(a, b);
    }
    if (unrelated.size() < quota.unrelated) {
        std::vector<std::pair<NodeId, NodeId>> rest;
        for (NodeId a = 1; a <= n; ++a) {
            for (NodeId b = a + 1; b <= n; ++b) {
                if (!related(a, b) && !chosen.contains({a, b})) rest.emplace_back(a, b);
            }
        }
        draw(rest, quota.unrelated - unrelated.size());
        for (auto [a, b] : rest) unrelated.push_back(rng.below(2) == 0 ? std::make_pair(a, b) : std::make_pair(b, a));
    }

    PairSheet sheet;
    sheet.seed = seed;
    sheet.quota = quota;
    sheet.grandparent_max_distance = options.grandparent_max_distance;
    auto emit = [&](const std::vector<std::pair<NodeId, NodeId>>& list, Stratum s) {
        for (auto [p, c] : list) {
            sheet.pairs.push_back({graph.label(p), graph.label(c), graph.iri(p), graph.iri(c), s});
        }
    };
    emit(child_candidates, Stratum::Child);
    emit(gp_candidates, Stratum::Grandparent);
    emit(unrelated, Stratum::Unrelated);
    rng.shuffle(sheet.pairs);

    if (options.training && options.training->total() > 0) {
        Quota remaining = *options.training;
        std::vector<ConceptPair> front;
        std::vector<ConceptPair> back;
        for (auto& p : sheet.pairs) {
            if (remaining[p.stratum] > 0) {
                --remaining[p.stratum];
                front.push_back(std::move(p));
            } else {
                back.push_back(std::move(p));
            }
        }
        sheet.training_prefix = front.size();
        front.insert(front.end(), std::make_move_iterator(back.begin()), std::make_move_iterator(back.end()));
        sheet.pairs = std::move(front);
    }

    for (const auto& p : sheet.pairs) {
        const auto rel = relation_between(graph, p.parent_iri, p.child_iri);
        const bool ok = (p.stratum == Stratum::Child && rel.kind == HierRelation::Kind::ParentChild) ||
                        (p.stratum == Stratum::Grandparent && rel.kind == HierRelation::Kind::Ancestor) ||
                        (p.stratum == Stratum::Unrelated && rel.kind == HierRelation::Kind::Unrelated);
        if (!ok) throw std::logic_error("sampled pair failed stratum re-verification: " + p.parent_iri + " / " +
                                        p.child_iri);
    }
    return sheet;
}

std::vector<std::string> sheet_header()
{
    return {"Parent", "Relation (same)", "Child", "Child?", "Farther away", "Reason if unrelated"};
}

Judgment training_answer(const ConceptPair& pair, std::size_t index)
{
    Judgment j;
    j.pair_index = index;
    switch (pair.stratum) {
    case Stratum::Child:
        j.is_child = Answer::Yes;
        break;
    case Stratum::Grandparent:
        j.farther_away = true;
        j.reason = kGrandparentReason;
        break;
    case Stratum::Unrelated:
        j.is_child = Answer::No;
        j.reason = "\"" + pair.child_label + "\" is not a kind of \"" + pair.parent_label + "\"";
        break;
    }
    return j;
}

std::string export_sheet(const PairSheet& sheet) { return export_judgments(sheet, {}); }

std::string export_judgments(const PairSheet& sheet, const std::vector<Judgment>& judgments)
{
    std::vector<std::optional<Judgment>> by_row(sheet.pairs.size());
    for (std::size_t i = 0; i < sheet.training_prefix && i < sheet.pairs.size(); ++i) {
        by_row[i] = training_answer(sheet.pairs[i], i);
    }
    for (const auto& j : judgments) {
        if (j.pair_index >= sheet.pairs.size()) {
            throw ImportError("judgment for pair index " + std::to_string(j.pair_index) + " outside the sheet", 0);
        }
        by_row[j.pair_index] = j;
    }
    std::string out = csv::format_row(sheet_header());
    for (std::size_t i = 0; i < sheet.pairs.size(); ++i) {
        out += csv::format_row(sheet_row(sheet.pairs[i], by_row[i] ? &*by_row[i] : nullptr));
    }
    return out;
}

ImportResult import_judgments(std::string_view csv_text, const PairSheet& sheet)
{
    auto rows = csv::parse(csv_text);
    while (!rows.empty() && rows.back().size() == 1 && trim(rows.back()[0]).empty()) rows.pop_back();
    if (rows.empty()) throw ImportError("empty judgment file", 0);
    std::vector<std::string> header;
    for (const auto& h : rows.front()) header.push_back(trim(h));
    if (header != sheet_header()) {
        std::string got;
        for (const auto& h : rows.front()) got += (got.empty() ? "" : ",") + h;
        throw ImportError("header mismatch: expected Parent,Relation (same),Child,Child?,Farther away,"
                          "Reason if unrelated but found " + got, 0);
    }
    if (rows.size() - 1 != sheet.pairs.size()) {
        throw ImportError("expected " + std::to_string(sheet.pairs.size()) + " rows, found " +
                          std::to_string(rows.size() - 1), 0);
    }

    ImportResult result;
    for (std::size_t i = 0; i < sheet.pairs.size(); ++i) {
        const std::size_t row_no = i + 1;
        auto row = rows[i + 1];
        if (row.size() < 3 || row.size() > 6) {
            throw ImportError("expected 6 columns, found " + std::to_string(row.size()), row_no);
        }
        row.resize(6);
        const auto& pair = sheet.pairs[i];
        if (trim(row[0]) != pair.parent_label || trim(row[2]) != pair.child_label) {
            throw ImportError("pair (" + row[0] + ", " + row[2] + ") does not match the sheet's (" +
                              pair.parent_label + ", " + pair.child_label + ")", row_no);
        }
        if (trim(row[1]) != kRelationColumn) throw ImportError("unexpected relation column '" + row[1] + "'", row_no);

        Judgment j;
        j.pair_index = i;
        const auto child = lower(trim(row[3]));
        if (child == "yes") {
            j.is_child = Answer::Yes;
        } else if (child == "no") {
            j.is_child = Answer::No;
        } else if (!child.empty()) {
            throw ImportError("Child? must be Yes, No or blank, found '" + row[3] + "'", row_no);
        }
        const auto farther = lower(trim(row[4]));
        if (farther == "yes") {
            j.farther_away = true;
        } else if (!farther.empty() && farther != "no") {
            throw ImportError("Farther away must be Yes or blank, found '" + row[4] + "'", row_no);
        }
        if (j.is_child == Answer::Yes && j.farther_away) {
            throw ImportError("both Child? and Farther away are Yes", row_no);
        }
        j.reason = row[5];
        if (j.is_child == Answer::No && trim(j.reason).empty()) {
            result.warnings.push_back("row " + std::to_string(row_no) +
                                      ": Child? is No but Reason if unrelated is empty");
        }
        result.judgments.push_back(std::move(j));
    }
    return result;
}

nlohmann::json sheet_to_json(const PairSheet& sheet)
{
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < sheet.pairs.size(); ++i) {
        const auto& p = sheet.pairs[i];
        rows.push_back({{"row", i + 1},
                        {"parent_iri", p.parent_iri},
                        {"parent_label", p.parent_label},
                        {"child_iri", p.child_iri},
                        {"child_label", p.child_label},
                        {"stratum", to_string(p.stratum)}});
    }
    return {{"format", "ontoeval-pair-sheet"},
            {"version", 1},
            {"seed", sheet.seed},
            {"quota", {{"child", sheet.quota.child},
                       {"grandparent", sheet.quota.grandparent},
                       {"unrelated", sheet.quota.unrelated}}},
            {"grandparent_max_distance", sheet.grandparent_max_distance},
            {"training_prefix", sheet.training_prefix},
            {"source", {{"ontology", sheet.source_ontology}, {"sha256", sheet.source_sha256}}},
            {"rows", std::move(rows)}};
}

PairSheet sheet_from_json(const nlohmann::json& j)
{
    try {
        if (j.value("format", std::string()) != "ontoeval-pair-sheet") {
            throw ConfigError("not a pair-sheet sidecar (format field missing or wrong)");
        }
        PairSheet s;
        s.seed = j.at("seed").get<std::uint64_t>();
        const auto& q = j.at("quota");
        s.quota = {q.at("child").get<std::size_t>(), q.at("grandparent").get<std::size_t>(),
                   q.at("unrelated").get<std::size_t>()};
        s.grandparent_max_distance = j.value("grandparent_max_distance", std::size_t{4});
        s.training_prefix = j.at("training_prefix").get<std::size_t>();
        s.source_ontology = j.at("source").value("ontology", std::string());
        s.source_sha256 = j.at("source").value("sha256", std::string());
        for (const auto& r : j.at("rows")) {
            s.pairs.push_back({r.at("parent_label").get<std::string>(), r.at("child_label").get<std::string>(),
                               r.at("parent_iri").get<std::string>(), r.at("child_iri").get<std::string>(),
                               parse_stratum(r.at("stratum").get<std::string>())});
        }
        if (s.training_prefix > s.pairs.size()) throw ConfigError("training_prefix exceeds the number of rows");
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed pair-sheet sidecar: ") + e.what());
    }
}

void save_sheet_sidecar(const PairSheet& sheet, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << sheet_to_json(sheet).dump(2) << '\n';
}

PairSheet load_sheet_sidecar(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open pair-sheet sidecar " + path);
    try {
        return sheet_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("pair-sheet sidecar " + path + " is not valid JSON: " + e.what());
    }
}

} // namespace ontoeval
