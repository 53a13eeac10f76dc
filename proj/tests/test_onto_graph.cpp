#include "ontoeval/error.hpp"
#include "ontoeval/taxonomy.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <deque>
#include <functional>
#include <random>
#include <set>

using namespace ontoeval;
using testing::fixture;

namespace {

std::string node(std::size_t i)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "http://example.org/g#N%03zu", i);
    return buf;
}

OntologyModel random_model(std::size_t n, double edge_probability, bool acyclic, std::uint32_t seed)
{
    std::mt19937 rng(seed);
    std::bernoulli_distribution coin(edge_probability);
    OntologyModel m;
    for (std::size_t i = 0; i < n; ++i) m.classes[node(i)] = ClassDecl{node(i), {}, {}, false};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || (acyclic && j >= i)) continue;  // acyclic: only edges to lower ids
            if (coin(rng)) m.subclass_axioms.emplace(node(i), node(j));
        }
    }
    return m;
}

/// Kahn's algorithm over subclass_axioms; true when every class gets sorted.
bool topologically_sortable(const OntologyModel& m)
{
    std::map<std::string, int> indegree;
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [iri, _] : m.classes) indegree[iri] = 0;
    for (const auto& [sub, sup] : m.subclass_axioms) {
        out[sub].push_back(sup);
        ++indegree[sup];
    }
    std::deque<std::string> ready;
    for (const auto& [iri, d] : indegree) if (d == 0) ready.push_back(iri);
    std::size_t sorted = 0;
    while (!ready.empty()) {
        auto v = ready.front();
        ready.pop_front();
        ++sorted;
        for (const auto& w : out[v]) if (--indegree[w] == 0) ready.push_back(w);
    }
    return sorted == indegree.size();
}

/// Every simple cycle, found by DFS from each start over larger-labelled nodes only.
std::vector<Cycle> brute_force_cycles(const OntologyModel& m)
{
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [sub, sup] : m.subclass_axioms) out[sub].push_back(sup);
    std::vector<Cycle> found;
    for (const auto& [start, _] : m.classes) {
        std::vector<std::string> path{start};
        std::set<std::string> on_path{start};
        std::function<void(const std::string&)> dfs = [&](const std::string& v) {
            for (const auto& w : out[v]) {
                if (w == start) {
                    found.push_back(path);
                } else if (w > start && !on_path.count(w)) {
                    path.push_back(w);
                    on_path.insert(w);
                    dfs(w);
                    on_path.erase(w);
                    path.pop_back();
                }
            }
        };
        dfs(start);
    }
    std::sort(found.begin(), found.end());
    return found;
}

/// Classes reachable downward from the roots (classes with no named superclass).
std::set<std::string> reachable_from_root(const OntologyModel& m)
{
    std::map<std::string, std::vector<std::string>> children;
    std::set<std::string> has_super;
    for (const auto& [sub, sup] : m.subclass_axioms) {
        has_super.insert(sub);
        children[sup].push_back(sub);
    }
    std::deque<std::string> queue;
    std::set<std::string> seen;
    for (const auto& [iri, _] : m.classes) {
        if (!has_super.count(iri)) {
            queue.push_back(iri);
            seen.insert(iri);
        }
    }
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (const auto& c : children[v]) {
            if (m.classes.count(c) && seen.insert(c).second) queue.push_back(c);
        }
    }
    return seen;
}

/// Shortest upward distance from `from` to `to` by BFS over subclass_axioms; 0 when unreachable.
std::size_t up_distance(const OntologyModel& m, const std::string& from, const std::string& to)
{
    std::map<std::string, std::vector<std::string>> parents;
    for (const auto& [sub, sup] : m.subclass_axioms) parents[sub].push_back(sup);
    std::map<std::string, std::size_t> dist{{from, 0}};
    std::deque<std::string> queue{from};
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (const auto& p : parents[v]) {
            if (dist.emplace(p, dist[v] + 1).second) queue.push_back(p);
        }
    }
    auto it = dist.find(to);
    return it == dist.end() ? 0 : it->second;
}

} // namespace

TEST_CASE("two-class cycle is reported once, starting at the smaller IRI")
{
    const auto m = load_ontology(fixture("owl/cycle.owl"));
    const auto cycles = detect_cycles(build_graph(m));
    REQUIRE(cycles.size() == 1);
    CHECK(cycles[0] == Cycle{"http://example.org/cycle#A", "http://example.org/cycle#B"});
}

TEST_CASE("200-node random DAG has no cycles, agreeing with a topological sort")
{
    const auto m = random_model(200, 0.03, true, 42);
    REQUIRE(topologically_sortable(m));
    CHECK(detect_cycles(build_graph(m)).empty());
}

TEST_CASE("property: cycle enumeration equals brute force on random small graphs")
{
    for (std::uint32_t seed = 1; seed <= 150; ++seed) {
        CAPTURE(seed);
        const auto m = random_model(3 + seed % 5, 0.3, false, seed);
        const auto cycles = detect_cycles(build_graph(m));
        CHECK(cycles == brute_force_cycles(m));
        CHECK(cycles.empty() == topologically_sortable(m));
    }
}

TEST_CASE("max_cycles bounds the enumeration")
{
    const auto m = random_model(7, 1.0, false, 3);  // complete digraph
    CHECK(detect_cycles(build_graph(m), 5).size() == 5);
}

TEST_CASE("graph shape: root attachment and edges")
{
    const auto g = build_graph(load_ontology(fixture("owl/three_classes.owl")));
    CHECK(g.size() == 3);
    CHECK(g.node_count() == 4);
    CHECK(g.edge_count() == 3);
    const auto housing = g.id("http://example.org/toy#Housing");
    CHECK(g.parents(housing) == std::vector<TaxonomyGraph::NodeId>{TaxonomyGraph::kRoot});
    CHECK(g.children(housing).size() == 2);
    CHECK_THROWS_AS(g.id("http://example.org/toy#Missing"), LookupError);
}

TEST_CASE("relation_between on hand-checked pairs")
{
    const auto g = build_graph(load_ontology(fixture("owl/three_classes.owl")));
    const std::string ns = "http://example.org/toy#";
    CHECK(relation_between(g, ns + "Housing", ns + "Housing") == HierRelation{HierRelation::Kind::Identical, 0});
    CHECK(relation_between(g, ns + "Housing", ns + "PoorHousing") ==
          HierRelation{HierRelation::Kind::ParentChild, 1});
    CHECK(relation_between(g, ns + "PoorHousing", ns + "Housing") ==
          HierRelation{HierRelation::Kind::DescendantInverse, 1});
    CHECK(relation_between(g, ns + "PoorHousing", ns + "HousingInstability").kind == HierRelation::Kind::Unrelated);
    CHECK(relation_between(g, g.root(), ns + "PoorHousing") == HierRelation{HierRelation::Kind::Ancestor, 2});
    CHECK_THROWS_AS(relation_between(g, ns + "Housing", ns + "Nope"), LookupError);
}

TEST_CASE("snippet pairs: parent-child and grandparent relations in the CDoH sample")
{
    const auto g = build_graph(load_ontology(fixture("owl/cdoh_sample.owl")));
    auto iri = [&](const char* label) {
        const auto hits = g.find_by_label(label);
        REQUIRE(hits.size() == 1);
        return hits[0];
    };
    CHECK(relation_between(g, iri("Eating related psychopathology"), iri("Binge eating disorder")).kind ==
          HierRelation::Kind::ParentChild);
    CHECK(relation_between(g, iri("Trade and globalisation effect on health disparities"),
                           iri("Violating labour standards")) == HierRelation{HierRelation::Kind::Ancestor, 2});
    CHECK(relation_between(g, iri("Effect of climatic changes"), iri("Marketing of unhealthy food products")).kind ==
          HierRelation::Kind::Unrelated);
    CHECK(relation_between(g, iri("Chemical risk in drinking water"), iri("Social media affected health outcomes"))
              .kind == HierRelation::Kind::Unrelated);
}

TEST_CASE("property: relation_between is antisymmetric and matches BFS distances")
{
    const auto m = random_model(40, 0.08, true, 9);
    const auto g = build_graph(m);
    for (std::size_t i = 0; i < 40; ++i) {
        for (std::size_t j = 0; j < 40; ++j) {
            const auto r = relation_between(g, node(i), node(j));
            const auto back = relation_between(g, node(j), node(i));
            const auto down = up_distance(m, node(j), node(i));  // i reached upward from j
            if (i == j) {
                CHECK(r.kind == HierRelation::Kind::Identical);
            } else if (down > 0) {
                CHECK(r.kind == (down == 1 ? HierRelation::Kind::ParentChild : HierRelation::Kind::Ancestor));
                CHECK(r.distance == down);
                CHECK(back == HierRelation{HierRelation::Kind::DescendantInverse, down});
            } else if (up_distance(m, node(i), node(j)) == 0) {
                CHECK(r.kind == HierRelation::Kind::Unrelated);
                CHECK(back.kind == HierRelation::Kind::Unrelated);
            }
        }
    }
}

TEST_CASE("label normalization")
{
    CHECK(normalize_label("  Poor   Housing ") == "poor housing");
    CHECK(normalize_label("\xC3\x89LAN") == "\xC3\xA9lan");  // É -> é
    CHECK(normalize_label("Poor\thousing") == "poor housing");
}

TEST_CASE("audit findings on defective fixtures")
{
    auto cycle = structural_audit(load_ontology(fixture("owl/cycle.owl")));
    CHECK_FALSE(cycle.passed);
    CHECK(cycle.cycles.size() == 1);
    CHECK(cycle.orphans == std::vector<std::string>{"http://example.org/cycle#A", "http://example.org/cycle#B"});

    auto dangling = structural_audit(load_ontology(fixture("owl/dangling.owl")));
    CHECK_FALSE(dangling.passed);
    CHECK(dangling.dangling_refs == std::vector<std::string>{"http://example.org/dangling#EnvironmentalHazard"});
    CHECK(dangling.orphans == std::vector<std::string>{"http://example.org/dangling#LeadPaintExposure"});

    auto dup = structural_audit(load_ontology(fixture("owl/duplicate_labels.owl")));
    CHECK_FALSE(dup.passed);
    REQUIRE(dup.duplicate_labels.size() == 1);
    CHECK(dup.duplicate_labels[0].first == "poor housing");
    CHECK(dup.duplicate_labels[0].second.size() == 2);
    CHECK(dup.orphans.empty());
}

TEST_CASE("clean fixtures pass the audit")
{
    for (const char* name : {"owl/three_classes.owl", "owl/instances.owl", "owl/cdoh_sample.owl",
                             "concordance/sdoh_sample.owl"}) {
        CAPTURE(name);
        const auto r = structural_audit(load_ontology(fixture(name)));
        CHECK(r.passed);
        CHECK(r.cycles.empty());
        CHECK(r.dangling_refs.empty());
    }
}

TEST_CASE("property: orphans equal the complement of a BFS from the top-level classes")
{
    for (std::uint32_t seed = 1; seed <= 40; ++seed) {
        CAPTURE(seed);
        auto m = random_model(15, 0.12, false, seed);
        m.subclass_axioms.emplace(node(0), "http://example.org/g#Undeclared");
        const auto reached = reachable_from_root(m);
        std::vector<std::string> expected;
        for (const auto& [iri, _] : m.classes) if (!reached.count(iri)) expected.push_back(iri);
        const auto r = structural_audit(m);
        CHECK(r.orphans == expected);
        CHECK(r.dangling_refs == std::vector<std::string>{"http://example.org/g#Undeclared"});
    }
}
