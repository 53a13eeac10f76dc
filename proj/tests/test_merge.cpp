#include "ontoeval/error.hpp"
#include "ontoeval/merge.hpp"
#include "ontoeval/rdfxml_writer.hpp"
#include "ontoeval/taxonomy.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace ontoeval;
using testing::fixture;

namespace {

OntologyModel load(const char* name) { return load_ontology(fixture(std::string("owl/") + name)); }

OntologyModel reparse(const OntologyModel& m)
{
    std::size_t skipped = 0;
    const auto text = write_rdfxml(m, &skipped);
    REQUIRE(skipped == 0);
    return build_model(parse_rdfxml(text), standard_prefixes());
}

} // namespace

TEST_CASE("disjoint merge: class count is the sum and the result round-trips")
{
    const auto a = load("merge_cdoh.owl");
    const auto b = load("merge_sdoh.owl");
    MergeSummary summary;
    const auto merged = merge({a, b}, load_merge_policy(fixture("policy/union.json")), &summary);
    CHECK(merged.classes.size() == a.classes.size() + b.classes.size());
    CHECK(summary.merged_classes == merged.classes.size());
    CHECK(summary.input_classes == std::vector<std::size_t>{a.classes.size(), b.classes.size()});
    CHECK(summary.shared_iris == 0);
    CHECK(merged.ontology_iri == "http://example.org/ncodh");
    CHECK(merged.object_properties.size() == a.object_properties.size() + b.object_properties.size());
    CHECK(merged.classes.at("http://example.org/sdoh#NeighborhoodEnvironment").curie == "sdoh:NeighborhoodEnvironment");
    CHECK(structural_audit(merged).passed);
    CHECK(reparse(merged) == merged);
}

TEST_CASE("inputs are left untouched by merge")
{
    const auto a = load("merge_cdoh.owl");
    const auto b = load("merge_sdoh.owl");
    const auto a_copy = a;
    const auto b_copy = b;
    merge({a, b}, load_merge_policy(fixture("policy/union.json")));
    CHECK(a == a_copy);
    CHECK(b == b_copy);
}

TEST_CASE("union-by-iri shares one class")
{
    const auto a = load("merge_cdoh.owl");
    const auto c = load("merge_overlap.owl");
    MergeSummary summary;
    const auto merged = merge({a, c}, MergePolicy{}, &summary);
    CHECK(merged.classes.size() == a.classes.size() + c.classes.size() - 1);
    CHECK(summary.shared_iris == 1);
    CHECK(merged.subclass_axioms.count({"http://example.org/overlap#TobaccoAdvertising",
                                        "http://example.org/cdoh#CommercialFactor"}) == 1);
}

TEST_CASE("rename-with-prefix moves colliding IRIs into the source namespace")
{
    const auto a = load("merge_cdoh.owl");
    const auto c = load("merge_overlap.owl");
    MergePolicy policy;
    policy.collision_rule = CollisionRule::RenameWithPrefix;
    policy.sources = {SourcePolicy{"cdoh", "http://example.org/cdoh#", {}},
                      SourcePolicy{"ov", "http://example.org/overlap#", {}}};
    MergeSummary summary;
    const auto merged = merge({a, c}, policy, &summary);
    CHECK(merged.classes.size() == a.classes.size() + c.classes.size());
    CHECK(summary.renamed.at("http://example.org/cdoh#CommercialFactor") == "http://example.org/overlap#CommercialFactor");
    CHECK(merged.subclass_axioms.count({"http://example.org/overlap#TobaccoAdvertising",
                                        "http://example.org/overlap#CommercialFactor"}) == 1);

    policy.sources[1].namespace_iri = "http://example.org/cdoh#";
    policy.sources[1].curie_prefix = "ov2";
    CHECK_THROWS_AS(merge({a, c}, policy), PolicyError);
}

TEST_CASE("root alignment that closes a loop is rejected with the chain named")
{
    const auto left = load("cycle_left.owl");
    const auto right = load("cycle_right.owl");
    try {
        merge({left, right}, load_merge_policy(fixture("policy/cycle.json")));
        FAIL("expected MergeCycleError");
    } catch (const MergeCycleError& e) {
        const std::string msg = e.what();
        for (const char* iri : {"http://example.org/left#A0", "http://example.org/left#A1",
                                "http://example.org/right#B0", "http://example.org/right#B1"}) {
            CHECK(msg.find(iri) != std::string::npos);
        }
        CHECK(msg.find(" -> ") != std::string::npos);
    }
    // Without the alignment the same inputs merge cleanly.
    CHECK_NOTHROW(merge({left, right}, MergePolicy{}));
}

TEST_CASE("policy validation")
{
    const auto a = load("merge_cdoh.owl");
    CHECK_THROWS_AS(merge({a}, MergePolicy{}), PolicyError);
    CHECK_THROWS_AS(parse_merge_policy("[1,2]"), PolicyError);
    CHECK_THROWS_AS(parse_merge_policy("{\"collision_rule\": \"coin-flip\"}"), PolicyError);
    CHECK_THROWS_AS(parse_merge_policy("not json"), PolicyError);

    MergePolicy dup;
    dup.sources = {SourcePolicy{"x", "http://example.org/cdoh#", {}}, SourcePolicy{"x", "http://example.org/sdoh#", {}}};
    CHECK_THROWS_AS(merge({a, load("merge_sdoh.owl")}, dup), PolicyError);

    MergePolicy missing_root;
    missing_root.sources = {SourcePolicy{}, SourcePolicy{"sdoh", "http://example.org/sdoh#", {{"sdoh:Nope", "owl:Thing"}}}};
    CHECK_THROWS_AS(merge({a, load("merge_sdoh.owl")}, missing_root), PolicyError);

    MergePolicy bad_target;
    bad_target.sources = {SourcePolicy{},
                          SourcePolicy{"sdoh", "http://example.org/sdoh#", {{"sdoh:NeighborhoodEnvironment", "sdoh:Nope"}}}};
    CHECK_THROWS_AS(merge({a, load("merge_sdoh.owl")}, bad_target), PolicyError);
}

TEST_CASE("alignment under a class of the other source")
{
    MergePolicy policy;
    policy.sources = {SourcePolicy{"cdoh", "http://example.org/cdoh#", {}},
                      SourcePolicy{"sdoh", "http://example.org/sdoh#",
                                   {{"sdoh:NeighborhoodEnvironment", "cdoh:CommercialFactor"}}}};
    const auto merged = merge({load("merge_cdoh.owl"), load("merge_sdoh.owl")}, policy);
    CHECK(merged.subclass_axioms.count({"http://example.org/sdoh#NeighborhoodEnvironment",
                                        "http://example.org/cdoh#CommercialFactor"}) == 1);
    const auto g = build_graph(merged);
    CHECK(relation_between(g, "http://example.org/cdoh#CommercialFactor", "http://example.org/sdoh#ProximityToIndustry")
              .kind == HierRelation::Kind::Ancestor);
}

TEST_CASE("annotate_curies: example CURIE, idempotence and failures")
{
    OntologyModel m;
    m.classes["http://example.org/ncodh#Obesity"] = ClassDecl{"http://example.org/ncodh#Obesity", {}, {}, false};
    const PrefixMap prefixes = {{"ncodh", "http://example.org/ncodh#"}};
    const auto once = annotate_curies(m, prefixes);
    CHECK(once.classes.at("http://example.org/ncodh#Obesity").curie == "ncodh:Obesity");
    CHECK(once.prefixes.at("ncodh") == "http://example.org/ncodh#");
    CHECK(annotate_curies(once, prefixes) == once);

    m.classes["http://other.org/x#Thing2"] = ClassDecl{"http://other.org/x#Thing2", {}, {}, false};
    CHECK_THROWS_AS(annotate_curies(m, prefixes), AnnotationError);
    const auto generated = annotate_curies(m, prefixes, std::string("ns"));
    CHECK(generated.classes.at("http://other.org/x#Thing2").curie == "ns1:Thing2");
    CHECK(annotate_curies(generated, prefixes, std::string("ns")) == generated);

    CHECK(annotate_curies(OntologyModel{}, prefixes).classes.empty());
}

TEST_CASE("longest namespace wins in annotate_curies")
{
    OntologyModel m;
    m.classes["http://example.org/a/b#C"] = ClassDecl{"http://example.org/a/b#C", {}, {}, false};
    const auto out = annotate_curies(m, {{"short", "http://example.org/"}, {"long", "http://example.org/a/b#"}});
    CHECK(out.classes.at("http://example.org/a/b#C").curie == "long:C");
}

TEST_CASE("merged CURIE annotations survive a round trip")
{
    auto merged = merge({load("merge_cdoh.owl"), load("merge_sdoh.owl")}, load_merge_policy(fixture("policy/union.json")));
    merged = annotate_curies(merged, merged.prefixes, std::string("gen"));
    CHECK(reparse(merged) == merged);
}
