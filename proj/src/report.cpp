#include "ontoeval/report.hpp"

#include <cstdio>

namespace ontoeval {

namespace {

nlohmann::json ratio_json(const std::optional<Ratio>& r)
{
    if (!r) return nullptr;
    return {{"value", format_ratio(*r)}, {"exact", rational_string(*r)}};
}

std::string render_p(double p)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", p);
    return buf;
}

} // namespace

std::string rational_string(const Ratio& r)
{
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

nlohmann::json to_json(const AxiomTally& t)
{
    return {{"declaration", t.declaration}, {"subclass", t.subclass},   {"domain", t.domain},
            {"range", t.range},             {"annotation", t.annotation}, {"assertion", t.assertion},
            {"other_logical", t.other_logical}, {"logical", t.logical()}, {"headline", t.headline()},
            {"total", t.total()}};
}

nlohmann::json model_summary(const OntologyModel& m)
{
    return {{"report_version", kReportVersion},
            {"ontology_iri", m.ontology_iri},
            {"imports", m.imports},
            {"classes", m.classes.size()},
            {"object_properties", m.object_properties.size()},
            {"data_properties", m.data_properties.size()},
            {"annotation_properties", m.annotation_properties.size()},
            {"datatypes", m.datatypes.size()},
            {"individuals", m.individuals.size()},
            {"subclass_axioms", m.subclass_axioms.size()},
            {"class_axioms", m.class_axioms.size()},
            {"axioms", to_json(m.axiom_tally)}};
}

nlohmann::json to_json(const AuditReport& r)
{
    nlohmann::json dups = nlohmann::json::array();
    for (const auto& [label, iris] : r.duplicate_labels) dups.push_back({{"label", label}, {"iris", iris}});
    return {{"report_version", kReportVersion},
            {"passed", r.passed},
            {"cycles", r.cycles},
            {"orphans", r.orphans},
            {"duplicate_labels", dups},
            {"dangling_refs", r.dangling_refs}};
}

nlohmann::json to_json(const MergeSummary& s)
{
    nlohmann::json aligned = nlohmann::json::array();
    for (const auto& [root, parent] : s.alignments) aligned.push_back({{"root", root}, {"parent", parent}});
    return {{"report_version", kReportVersion},
            {"input_classes", s.input_classes},
            {"merged_classes", s.merged_classes},
            {"shared_iris", s.shared_iris},
            {"renamed", s.renamed},
            {"alignments", aligned}};
}

nlohmann::json to_json(const SchemaMetrics& m)
{
    nlohmann::json metrics = nlohmann::json::object();
    for (const auto& name : metric_names()) metrics[name] = ratio_json(metric_value(m, name));
    return {{"report_version", kReportVersion},
            {"counting_rule", m.counting_rule},
            {"metrics", metrics},
            {"raw_counts",
             {{"classes", m.raw.classes},
              {"subclass_axioms", m.raw.subclass_axioms},
              {"non_isa_relations", m.raw.non_isa_relations},
              {"attributes", m.raw.attributes},
              {"instance_classes", m.raw.instance_classes},
              {"axioms", m.raw.axioms}}}};
}

nlohmann::json to_json(const std::vector<MetricDelta>& deltas)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& d : deltas) {
        out.push_back({{"metric", d.name},
                       {"computed", d.computed ? nlohmann::json(format_ratio(*d.computed)) : nlohmann::json(nullptr)},
                       {"reference", d.reference},
                       {"delta", d.delta ? nlohmann::json(*d.delta) : nlohmann::json(nullptr)}});
    }
    return out;
}

nlohmann::json to_json(const KappaResult& k)
{
    return {{"kappa", k.kappa ? nlohmann::json(ratio_json(*k.kappa)) : nlohmann::json(nullptr)},
            {"degenerate", k.degenerate()},
            {"p_o", ratio_json(k.observed)},
            {"p_e", ratio_json(k.expected)},
            {"table",
             {{"both_include", k.table.both_include},
              {"both_exclude", k.table.both_exclude},
              {"only_first", k.table.only_first},
              {"only_second", k.table.only_second}}}};
}

nlohmann::json to_json(const Matrix2x2& m)
{
    return {{"rows", {"include", "exclude"}}, {"columns", {"related", "unrelated"}},
            {"cells", {{m.a, m.b}, {m.c, m.d}}}};
}

nlohmann::json to_json(const FisherResult& f)
{
    nlohmann::json j = {{"p", render_p(f.p)}, {"method", f.exact ? "exact" : "log-space"}};
    if (f.exact) j["exact"] = f.exact->str();
    return j;
}

} // namespace ontoeval
