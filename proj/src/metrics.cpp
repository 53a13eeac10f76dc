#include "ontoeval/metrics.hpp"

#include "ontoeval/error.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>

namespace ontoeval {

namespace {

std::int64_t domain_pairs(const OntologyModel& model, const std::map<std::string, PropertyDecl>& props)
{
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& [iri, p] : props) {
        for (const auto& d : p.domains) {
            if (d.is_named()) {
                if (model.classes.contains(d.iri)) pairs.emplace(d.iri, iri);
            } else if (d.kind == ClassExpr::Kind::UnionOf) {
                for (const auto& op : d.operands) {
                    if (op.is_named() && model.classes.contains(op.iri)) pairs.emplace(op.iri, iri);
                }
            }
        }
    }
    return static_cast<std::int64_t>(pairs.size());
}

} // namespace

RawCounts raw_counts(const OntologyModel& model)
{
    RawCounts c;
    c.classes = static_cast<std::int64_t>(model.classes.size());
    for (const auto& [sub, super] : model.subclass_axioms) {
        if (super != vocab::kOwlThing) ++c.subclass_axioms;
    }
    c.non_isa_relations = domain_pairs(model, model.object_properties);
    c.attributes = domain_pairs(model, model.data_properties);
    std::set<std::string> populated;
    for (const auto& [ind, types] : model.individuals) {
        for (const auto& t : types) {
            if (model.classes.contains(t)) populated.insert(t);
        }
    }
    c.instance_classes = static_cast<std::int64_t>(populated.size());
    c.axioms = static_cast<std::int64_t>(count_axioms(model).total());
    return c;
}

SchemaMetrics metrics_from_counts(const RawCounts& raw)
{
    if (raw.classes <= 0) throw MetricsError("schema metrics are undefined for an ontology without classes");
    SchemaMetrics m;
    m.raw = raw;
    const auto relations = raw.subclass_axioms + raw.non_isa_relations;
    m.attribute_richness = Ratio(raw.attributes, raw.classes);
    m.inheritance_richness = Ratio(raw.subclass_axioms, raw.classes);
    m.relationship_richness = relations == 0 ? Ratio(0) : Ratio(raw.non_isa_relations, relations);
    m.class_richness = Ratio(raw.instance_classes, raw.classes);
    m.axiom_class_ratio = Ratio(raw.axioms, raw.classes);
    if (relations > 0) m.class_relation_ratio = Ratio(raw.classes, relations);
    return m;
}

SchemaMetrics schema_metrics(const OntologyModel& model) { return metrics_from_counts(raw_counts(model)); }

std::string format_ratio(const Ratio& r, int places)
{
    std::int64_t scale = 1;
    for (int i = 0; i < places; ++i) scale *= 10;
    const bool negative = r < 0;
    const Ratio a = negative ? -r : r;
    // round(a * scale) = floor((2 * num * scale + den) / (2 * den))
    const auto scaled = (2 * a.numerator() * scale + a.denominator()) / (2 * a.denominator());
    std::string digits = std::to_string(scaled % scale);
    std::string out = (negative && scaled != 0 ? "-" : "") + std::to_string(scaled / scale);
    if (places > 0) out += "." + std::string(places - digits.size(), '0') + digits;
    return out;
}

double to_double(const Ratio& r) { return boost::rational_cast<double>(r); }

std::vector<std::string> metric_names()
{
    return {"attribute_richness", "inheritance_richness", "relationship_richness",
            "class_richness",     "axiom_class_ratio",    "class_relation_ratio"};
}

std::optional<Ratio> metric_value(const SchemaMetrics& m, const std::string& name)
{
    if (name == "attribute_richness") return m.attribute_richness;
    if (name == "inheritance_richness") return m.inheritance_richness;
    if (name == "relationship_richness") return m.relationship_richness;
    if (name == "class_richness") return m.class_richness;
    if (name == "axiom_class_ratio") return m.axiom_class_ratio;
    if (name == "class_relation_ratio") return m.class_relation_ratio;
    throw MetricsError("unknown metric '" + name + "'");
}

std::vector<MetricDelta> compare_metrics(const SchemaMetrics& m, const std::map<std::string, double>& reference)
{
    for (const auto& [name, value] : reference) metric_value(m, name);
    std::vector<MetricDelta> out;
    for (const auto& name : metric_names()) {
        auto it = reference.find(name);
        if (it == reference.end()) continue;
        MetricDelta d;
        d.name = name;
        d.computed = metric_value(m, name);
        d.reference = it->second;
        if (d.computed) d.delta = to_double(*d.computed) - it->second;
        out.push_back(std::move(d));
    }
    return out;
}

std::map<std::string, double> load_metric_reference(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open metric reference " + path);
    try {
        return nlohmann::json::parse(in).get<std::map<std::string, double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed metric reference " + path + ": " + e.what());
    }
}

} // namespace ontoeval
