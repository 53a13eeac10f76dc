#include "ontoeval/cli.hpp"
#include "ontoeval/manifest.hpp"

#include "support.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ontoeval;
using testing::fixture;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
    nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    Run r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

} // namespace

TEST_CASE("help and usage errors")
{
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"--version"}).code == 0);
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"parse"}).code == 2);
}

TEST_CASE("parse reports counts, and bad input exits 2")
{
    const auto r = run({"parse", fixture("owl/instances.owl")});
    REQUIRE(r.code == 0);
    const auto j = r.json();
    CHECK(j["classes"] == 2);
    CHECK(j["object_properties"] == 1);
    CHECK(j["data_properties"] == 1);
    CHECK(j["axioms"]["total"] == 16);
    CHECK(j["manifest"]["inputs"][fixture("owl/instances.owl")] == sha256_file(fixture("owl/instances.owl")));

    testing::TempDir dir("cli-parse");
    std::string broken = testing::slurp(fixture("owl/three_classes.owl"));
    broken.resize(broken.size() / 2);
    { std::ofstream(dir.file("broken.owl")) << broken; }
    const auto bad = run({"parse", dir.file("broken.owl")});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("line") != std::string::npos);
    CHECK(run({"parse", dir.file("absent.owl")}).code == 2);
}

TEST_CASE("audit exit status follows the findings")
{
    CHECK(run({"audit", fixture("owl/cdoh_sample.owl")}).code == 0);
    const auto cyc = run({"audit", fixture("owl/cycle.owl")});
    CHECK(cyc.code == 1);
    CHECK(cyc.json()["cycles"].size() == 1);
    CHECK(run({"audit", fixture("owl/dangling.owl")}).code == 1);
}

TEST_CASE("metrics with and without a reference")
{
    const auto plain = run({"metrics", fixture("owl/three_classes.owl")});
    REQUIRE(plain.code == 0);
    CHECK(plain.json()["metrics"]["inheritance_richness"]["exact"] == "2/3");
    CHECK_FALSE(plain.json().contains("reference_deltas"));

    const auto ref = run({"metrics", fixture("owl/three_classes.owl"), "--reference",
                          fixture("reference/ncodh_schema_metrics.json")});
    REQUIRE(ref.code == 0);
    CHECK(ref.json()["reference_deltas"].size() == 5);
}

TEST_CASE("merge writes a re-parseable ontology and rejects cycles")
{
    testing::TempDir dir("cli-merge");
    const auto r = run({"merge", fixture("owl/merge_cdoh.owl"), fixture("owl/merge_sdoh.owl"), "--policy",
                        fixture("policy/union.json"), "--out", dir.str()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto j = r.json();
    CHECK(j["merged_classes"] == 4);
    CHECK(j["roundtrip_identical"] == true);
    CHECK(j["audit_passed"] == true);
    CHECK(fs::exists(dir.file("merged.owl")));
    const auto manifest = nlohmann::json::parse(testing::slurp(dir.file("manifest.json")));
    CHECK(manifest["outputs"][dir.file("merged.owl")] == sha256_file(dir.file("merged.owl")));

    const auto again = run({"parse", dir.file("merged.owl")});
    CHECK(again.json()["classes"] == 4);

    const auto cyc = run({"merge", fixture("owl/cycle_left.owl"), fixture("owl/cycle_right.owl"), "--policy",
                          fixture("policy/cycle.json"), "--out", dir.str()});
    CHECK(cyc.code == 2);
    CHECK(cyc.err.find("http://example.org/left#A0 -> ") != std::string::npos);
}

TEST_CASE("stats reproduces the agreement figures")
{
    const auto r = run({"stats", "--sheet", fixture("human/sheet.json"), fixture("human/evaluator1.csv"),
                        fixture("human/evaluator2.csv")});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto j = r.json();
    CHECK(j["kappa"]["kappa"]["value"] == "0.50502");
    CHECK(j["kappa"]["p_o"]["value"] == "0.74444");
    CHECK(j["evaluators"][0]["confusion_matrix"]["cells"] == nlohmann::json{{39, 0}, {7, 44}});
    CHECK(j["evaluators"][1]["confusion_matrix"]["cells"] == nlohmann::json{{42, 11}, {4, 33}});
    CHECK(std::stod(j["evaluators"][0]["fisher"]["p"].get<std::string>()) < 1e-4);

    const auto pooled = run({"stats", "--sheet", fixture("human/sheet.json"), fixture("human/evaluator1.csv"),
                             fixture("human/evaluator2.csv"), "--kappa-basis", "pooled"});
    CHECK(pooled.json()["kappa_basis"] == "pooled");
    CHECK(run({"stats", "--sheet", fixture("human/sheet.json"), fixture("human/evaluator1.csv"),
               fixture("human/evaluator2.csv"), "--kappa-basis", "both"})
              .code == 2);
    CHECK(run({"stats", "--sheet", fixture("human/table1_sheet.json"), fixture("human/evaluator1.csv"),
               fixture("human/evaluator2.csv")})
              .code == 2);
}

TEST_CASE("replay of the bundled corpus")
{
    const auto r = run({"replay", fixture("concordance/corpus"), "--sheet", fixture("concordance/sheet.json")});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto j = r.json();
    CHECK(j["outcomes"]["agreed_child"] == 9);
    CHECK(j["outcomes"]["recovered_child"] == 5);
    CHECK(j["outcomes"]["not_recovered"] == 2);
    CHECK(j["outcomes"]["part_of"] == 3);
    CHECK(j["outcomes"]["type_of"] == 1);
    CHECK(j["outcomes"]["grandparent_confirmed"] == 20);
    CHECK(j["outcomes"]["unrelated_confirmed"] == 20);
    CHECK(j["prompt_count"] == 276);
    CHECK(j["challenged"] == 7);

    const auto verify = run({"replay", fixture("concordance/corpus"), "--verify"});
    CHECK(verify.code == 0);
}

TEST_CASE("validate with the affirming stub and with the script")
{
    testing::TempDir dir("cli-validate");
    const auto r = run({"validate", "--sheet", fixture("concordance/sheet.json"), "--affirm", "--out", dir.str()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto j = r.json();
    CHECK(j["prompt_count"] == 60);
    CHECK(j["outcomes"]["agreed_child"] == 40);  // the stub also affirms the unrelated pairs
    CHECK(j["outcomes"]["grandparent_confirmed"] == 20);
    CHECK(fs::exists(dir.file("transcripts/session-0060.jsonl")));

    testing::TempDir scripted("cli-script");
    const auto s = run({"validate", "--sheet", fixture("concordance/sheet.json"), "--script",
                        fixture("concordance/script.json"), "--parallel", "3", "--out", scripted.str()});
    REQUIRE_MESSAGE(s.code == 0, s.err);
    CHECK(s.json()["prompt_count"] == 276);
    CHECK(testing::slurp(scripted.file("transcripts/session-0017.jsonl")) ==
          testing::slurp(fixture("concordance/corpus/session-0017.jsonl")));

    CHECK(run({"validate", "--sheet", fixture("concordance/sheet.json")}).code == 2);
}

TEST_CASE("validate reports backend failures with exit 3")
{
    testing::TempDir dir("cli-backend");
    { std::ofstream(dir.file("adapter.json")) << R"({"endpoint": "http://127.0.0.1:1/none", "timeout_seconds": 1})"; }
    const auto r = run({"validate", "--sheet", fixture("human/table1_sheet.json"), "--adapter", dir.file("adapter.json"),
                        "--out", dir.str()});
    CHECK(r.code == 3);
}

TEST_CASE("pairs needs an output directory and a feasible quota")
{
    CHECK(run({"pairs", fixture("owl/cdoh_sample.owl"), "--quota", "1,1,1", "--seed", "1"}).code == 2);
    testing::TempDir dir("cli-pairs");
    CHECK(run({"pairs", fixture("owl/cdoh_sample.owl"), "--quota", "500,1,1", "--seed", "1", "--out", dir.str()})
              .code == 2);
    const auto ok = run({"pairs", fixture("concordance/sdoh_sample.owl"), "--quota", "20,20,20", "--seed", "60",
                         "--out", dir.str()});
    REQUIRE_MESSAGE(ok.code == 0, ok.err);
    CHECK(testing::slurp(dir.file("sheet.csv")) == testing::slurp(fixture("concordance/sheet.csv")));
    const auto manifest = nlohmann::json::parse(testing::slurp(dir.file("manifest.json")));
    CHECK(manifest["seed"] == 60);
}
