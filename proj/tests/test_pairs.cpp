#include "ontoeval/cli.hpp"
#include "ontoeval/csv.hpp"
#include "ontoeval/error.hpp"
#include "ontoeval/manifest.hpp"
#include "ontoeval/pairs.hpp"

#include "support.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <set>
#include <sstream>

using namespace ontoeval;
using testing::fixture;

namespace {

/// Ancestors of every class with their shortest distance, by repeated
/// expansion of subclass_axioms until nothing changes.
std::map<std::string, std::map<std::string, std::size_t>> closure(const OntologyModel& m)
{
    std::map<std::string, std::map<std::string, std::size_t>> anc;
    for (const auto& [sub, sup] : m.subclass_axioms) {
        if (m.classes.count(sup)) anc[sub][sup] = 1;
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (auto& [node, ups] : anc) {
            const auto snapshot = ups;
            for (const auto& [mid, d1] : snapshot) {
                if (!anc.count(mid)) continue;
                for (const auto& [top, d2] : anc.at(mid)) {
                    auto it = ups.find(top);
                    if (it == ups.end() || it->second > d1 + d2) {
                        ups[top] = d1 + d2;
                        changed = true;
                    }
                }
            }
        }
    }
    return anc;
}

std::optional<std::size_t> distance(const std::map<std::string, std::map<std::string, std::size_t>>& anc,
                                    const std::string& from, const std::string& to)
{
    auto it = anc.find(from);
    if (it == anc.end()) return std::nullopt;
    auto jt = it->second.find(to);
    if (jt == it->second.end()) return std::nullopt;
    return jt->second;
}

void check_strata(const OntologyModel& m, const PairSheet& sheet, std::size_t max_distance)
{
    const auto anc = closure(m);
    for (const auto& p : sheet.pairs) {
        CAPTURE(p.parent_iri);
        CAPTURE(p.child_iri);
        const auto up = distance(anc, p.child_iri, p.parent_iri);
        const auto down = distance(anc, p.parent_iri, p.child_iri);
        switch (p.stratum) {
        case Stratum::Child:
            CHECK(up == std::size_t{1});
            break;
        case Stratum::Grandparent:
            REQUIRE(up.has_value());
            CHECK(*up >= 2);
            CHECK(*up <= max_distance);
            break;
        case Stratum::Unrelated:
            CHECK(p.parent_iri != p.child_iri);
            CHECK_FALSE(up.has_value());
            CHECK_FALSE(down.has_value());
            break;
        }
        CHECK(m.classes.count(p.parent_iri) == 1);
        CHECK(m.classes.count(p.child_iri) == 1);
    }
}

Quota strata_of(const PairSheet& s, std::size_t from = 0)
{
    Quota q;
    for (std::size_t i = from; i < s.pairs.size(); ++i) ++q[s.pairs[i].stratum];
    return q;
}

const OntologyModel& cdoh()
{
    static const auto m = load_ontology(fixture("owl/cdoh_sample.owl"));
    return m;
}

const OntologyModel& sdoh()
{
    static const auto m = load_ontology(fixture("concordance/sdoh_sample.owl"));
    return m;
}

} // namespace

TEST_CASE("quota 32/14/44 yields 90 pairs verified by the closure oracle")
{
    const auto sheet = sample_pairs(build_graph(cdoh()), Quota{32, 14, 44}, 2023);
    CHECK(sheet.pairs.size() == 90);
    CHECK(strata_of(sheet) == Quota{32, 14, 44});
    check_strata(cdoh(), sheet, 4);
}

TEST_CASE("quota 20/20/20 yields 60 pairs verified by the closure oracle")
{
    const auto sheet = sample_pairs(build_graph(sdoh()), Quota{20, 20, 20}, 60);
    CHECK(sheet.pairs.size() == 60);
    CHECK(strata_of(sheet) == Quota{20, 20, 20});
    check_strata(sdoh(), sheet, 4);
}

TEST_CASE("property: random seeds keep counts, strata and uniqueness")
{
    const auto g = build_graph(cdoh());
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        CAPTURE(seed);
        const auto sheet = sample_pairs(g, Quota{32, 14, 44}, seed);
        CHECK(strata_of(sheet) == Quota{32, 14, 44});
        std::set<std::pair<std::string, std::string>> seen;
        for (const auto& p : sheet.pairs) {
            CHECK(seen.emplace(std::min(p.parent_iri, p.child_iri), std::max(p.parent_iri, p.child_iri)).second);
        }
        if (seed % 10 == 0) check_strata(cdoh(), sheet, 4);
    }
}

TEST_CASE("identical seeds give byte-identical sheets; other seeds differ")
{
    const auto g = build_graph(cdoh());
    const auto a = sample_pairs(g, Quota{32, 14, 44}, 77);
    const auto b = sample_pairs(g, Quota{32, 14, 44}, 77);
    const auto c = sample_pairs(g, Quota{32, 14, 44}, 78);
    CHECK(export_sheet(a) == export_sheet(b));
    CHECK(sheet_to_json(a).dump() == sheet_to_json(b).dump());
    CHECK(export_sheet(a) != export_sheet(c));
}

TEST_CASE("candidate counts agree with the closure oracle")
{
    const auto anc = closure(cdoh());
    CandidateCounts expected;
    std::size_t related = 0;
    for (const auto& [node, ups] : anc) {
        related += ups.size();
        for (const auto& [a, d] : ups) {
            expected.child += d == 1 ? 1 : 0;
            expected.grandparent += d >= 2 && d <= 4 ? 1 : 0;
        }
    }
    const auto n = cdoh().classes.size();
    expected.unrelated = n * (n - 1) / 2 - related;
    const auto got = count_candidates(build_graph(cdoh()));
    CHECK(got.child == expected.child);
    CHECK(got.grandparent == expected.grandparent);
    CHECK(got.unrelated == expected.unrelated);
}

TEST_CASE("infeasible quota names the available counts")
{
    const auto g = build_graph(cdoh());
    const auto avail = count_candidates(g);
    try {
        sample_pairs(g, Quota{avail.child + 1, 0, 0}, 1);
        FAIL("expected QuotaError");
    } catch (const QuotaError& e) {
        CHECK(std::string(e.what()).find("child=" + std::to_string(avail.child)) != std::string::npos);
    }
    CHECK_THROWS_AS(sample_pairs(g, Quota{0, avail.grandparent + 1, 0}, 1), QuotaError);
    CHECK_THROWS_AS(sample_pairs(build_graph(load_ontology(fixture("owl/cycle.owl"))), Quota{1, 0, 0}, 1),
                    ModelError);
}

TEST_CASE("quota parsing and proportional split")
{
    CHECK(parse_quota("32,14,44") == Quota{32, 14, 44});
    CHECK(parse_quota(" 20, 20 ,20") == Quota{20, 20, 20});
    CHECK_THROWS_AS(parse_quota("1,2"), ConfigError);
    CHECK_THROWS_AS(parse_quota("1,-2,3"), ConfigError);
    CHECK_THROWS_AS(parse_quota("a,b,c"), ConfigError);
    CHECK(proportional_split(Quota{32, 14, 44}, 10) == Quota{4, 1, 5});
    CHECK(proportional_split(Quota{20, 20, 20}, 10) == Quota{4, 3, 3});
    CHECK(proportional_split(Quota{1, 1, 1}, 0) == Quota{});
    CHECK_THROWS_AS(proportional_split(Quota{1, 1, 1}, 4), ConfigError);
}

TEST_CASE("seeded rng is uniform by rejection and reproducible")
{
    SeededRng a(5), b(5);
    std::vector<std::size_t> hist(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto x = a.below(7);
        CHECK(x == b.below(7));
        ++hist[x];
    }
    for (auto h : hist) CHECK(h == doctest::Approx(10000).epsilon(0.05));
}

TEST_CASE("training rows come first with pre-filled answers")
{
    SamplingOptions options;
    options.training = Quota{3, 2, 5};
    const auto sheet = sample_pairs(build_graph(cdoh()), Quota{35, 16, 49}, 2023, options);
    CHECK(sheet.pairs.size() == 100);
    CHECK(sheet.training_prefix == 10);
    CHECK(strata_of(sheet) == Quota{35, 16, 49});
    CHECK(strata_of(sheet, 10) == Quota{32, 14, 44});

    const auto csv_rows = csv::parse(export_sheet(sheet));
    REQUIRE(csv_rows.size() == 101);
    std::size_t yes = 0, no = 0, farther = 0;
    for (std::size_t i = 1; i <= 10; ++i) {
        yes += csv_rows[i][3] == "Yes";
        no += csv_rows[i][3] == "No";
        farther += csv_rows[i][4] == "Yes";
    }
    CHECK(yes == 3);
    CHECK(no == 5);
    CHECK(farther == 2);
    for (std::size_t i = 11; i < csv_rows.size(); ++i) {
        CHECK(csv_rows[i][3].empty());
        CHECK(csv_rows[i][4].empty());
        CHECK(csv_rows[i][5].empty());
    }

    options.training = Quota{36, 0, 0};
    CHECK_THROWS_AS(sample_pairs(build_graph(cdoh()), Quota{35, 16, 49}, 2023, options), ConfigError);
}

TEST_CASE("export header is exact")
{
    const auto sheet = sample_pairs(build_graph(cdoh()), Quota{1, 1, 1}, 3);
    const auto text = export_sheet(sheet);
    CHECK(text.substr(0, text.find('\n')) == "Parent,Relation (same),Child,Child?,Farther away,Reason if unrelated");
    const auto rows = csv::parse(text);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][1] == "\xE2\x86\x90IS-A-");
}

TEST_CASE("sidecar JSON round-trips")
{
    testing::TempDir dir("sidecar");
    SamplingOptions options;
    options.training = Quota{1, 1, 1};
    auto sheet = sample_pairs(build_graph(cdoh()), Quota{4, 3, 5}, 9, options);
    sheet.source_ontology = "cdoh_sample.owl";
    sheet.source_sha256 = "abc";
    save_sheet_sidecar(sheet, dir.file("s.json"));
    CHECK(load_sheet_sidecar(dir.file("s.json")) == sheet);
    CHECK(sheet_from_json(sheet_to_json(sheet)) == sheet);
}

TEST_CASE("judgments round-trip through export and import")
{
    const auto sheet = sample_pairs(build_graph(cdoh()), Quota{6, 4, 8}, 5);
    std::vector<Judgment> js;
    for (std::size_t i = 0; i < sheet.pairs.size(); ++i) {
        Judgment j;
        j.pair_index = i;
        switch (i % 4) {
        case 0: j.is_child = Answer::Yes; break;
        case 1: j.is_child = Answer::No; j.reason = "unrelated, with \"quotes\", commas"; break;
        case 2: j.farther_away = true; j.reason = kGrandparentReason; break;
        default: j.is_child = Answer::No; j.farther_away = true; j.reason = "line\nbreak"; break;
        }
        js.push_back(j);
    }
    const auto text = export_judgments(sheet, js);
    const auto imported = import_judgments(text, sheet);
    CHECK(imported.judgments == js);
    CHECK(imported.warnings.empty());
    CHECK(export_judgments(sheet, imported.judgments) == text);
}

TEST_CASE("the snippet rows import as no, yes, no, farther")
{
    const auto sheet = load_sheet_sidecar(fixture("human/table1_sheet.json"));
    const auto r = import_judgments(testing::slurp(fixture("human/table1.csv")), sheet);
    REQUIRE(r.judgments.size() == 4);
    CHECK(r.judgments[0].is_child == Answer::No);
    CHECK(r.judgments[1].is_child == Answer::Yes);
    CHECK(r.judgments[2].is_child == Answer::No);
    CHECK(r.judgments[3].is_child == Answer::Blank);
    CHECK(r.judgments[3].farther_away);
    CHECK(r.judgments[3].reason == kGrandparentReason);
    CHECK(r.warnings.empty());
}

TEST_CASE("import rejects malformed judgment files")
{
    const auto sheet = load_sheet_sidecar(fixture("human/table1_sheet.json"));
    const auto good = testing::slurp(fixture("human/table1.csv"));
    auto rows = csv::parse(good);
    auto render = [](const std::vector<csv::Row>& rs) {
        std::string out;
        for (const auto& r : rs) out += csv::format_row(r);
        return out;
    };

    SUBCASE("both answers yes")
    {
        auto bad = rows;
        bad[2][4] = "Yes";
        try {
            import_judgments(render(bad), sheet);
            FAIL("expected ImportError");
        } catch (const ImportError& e) {
            CHECK(e.row() == 2);
        }
    }
    SUBCASE("header mismatch")
    {
        auto bad = rows;
        bad[0][3] = "Child";
        CHECK_THROWS_AS(import_judgments(render(bad), sheet), ImportError);
    }
    SUBCASE("row count mismatch")
    {
        auto bad = rows;
        bad.pop_back();
        CHECK_THROWS_AS(import_judgments(render(bad), sheet), ImportError);
    }
    SUBCASE("pair mismatch")
    {
        auto bad = rows;
        std::swap(bad[1], bad[2]);
        try {
            import_judgments(render(bad), sheet);
            FAIL("expected ImportError");
        } catch (const ImportError& e) {
            CHECK(e.row() == 1);
        }
    }
    SUBCASE("bad answer")
    {
        auto bad = rows;
        bad[3][3] = "Maybe";
        CHECK_THROWS_AS(import_judgments(render(bad), sheet), ImportError);
    }
    SUBCASE("No without a reason warns")
    {
        auto lax = rows;
        lax[1][5].clear();
        const auto r = import_judgments(render(lax), sheet);
        REQUIRE(r.warnings.size() == 1);
        CHECK(r.warnings[0].find("row 1") != std::string::npos);
    }
    SUBCASE("CRLF and BOM are accepted")
    {
        std::string crlf = "\xEF\xBB\xBF";
        for (char ch : good) {
            if (ch == '\n') crlf += '\r';
            crlf += ch;
        }
        CHECK(import_judgments(crlf, sheet).judgments.size() == 4);
    }
}

TEST_CASE("csv helpers")
{
    CHECK(csv::escape("plain") == "plain");
    CHECK(csv::escape("a,b") == "\"a,b\"");
    CHECK(csv::escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv::parse("a,\"b\n c\",d\n") == std::vector<csv::Row>{{"a", "b\n c", "d"}});
    CHECK(csv::parse("x,\n") == std::vector<csv::Row>{{"x", ""}});
    CHECK_THROWS_AS(csv::parse("a,\"open\n"), ImportError);
}

TEST_CASE("committed human sheet matches a fresh CLI run")
{
    testing::TempDir dir("pairs-cli");
    std::ostringstream out, err;
    const int code = cli::run({"pairs", fixture("owl/cdoh_sample.owl"), "--quota", "35,16,49", "--training", "3,2,5",
                               "--seed", "2023", "--out", dir.str()},
                              out, err);
    REQUIRE_MESSAGE(code == 0, err.str());
    CHECK(testing::slurp(dir.file("sheet.csv")) == testing::slurp(fixture("human/sheet.csv")));
    const auto fresh = load_sheet_sidecar(dir.file("sheet.json"));
    const auto committed = load_sheet_sidecar(fixture("human/sheet.json"));
    CHECK(fresh == committed);
    CHECK(committed.source_sha256 == sha256_file(fixture("owl/cdoh_sample.owl")));
}

TEST_CASE("committed concordance sheet matches a fresh sample")
{
    const auto sheet = sample_pairs(build_graph(sdoh()), Quota{20, 20, 20}, 60);
    const auto committed = load_sheet_sidecar(fixture("concordance/sheet.json"));
    CHECK(sheet.pairs == committed.pairs);
    CHECK(export_sheet(sheet) == testing::slurp(fixture("concordance/sheet.csv")));
}
