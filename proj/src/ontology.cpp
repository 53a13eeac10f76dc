#include "ontoeval/ontology.hpp"

#include "ontoeval/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <unordered_map>

namespace ontoeval {

namespace {

const std::string kOntology = vocab::owl_term("Ontology");
const std::string kObjectProperty = vocab::owl_term("ObjectProperty");
const std::string kDatatypeProperty = vocab::owl_term("DatatypeProperty");
const std::string kAnnotationProperty = vocab::owl_term("AnnotationProperty");
const std::string kNamedIndividual = vocab::owl_term("NamedIndividual");
const std::string kRestriction = vocab::owl_term("Restriction");
const std::string kAllDisjointClasses = vocab::owl_term("AllDisjointClasses");
const std::string kAxiom = vocab::owl_term("Axiom");
const std::string kRdfsDatatype = vocab::rdfs_term("Datatype");
const std::string kSkosNotation = std::string(vocab::skos) + "notation";
const std::string kDeprecated = vocab::owl_term("deprecated");

const std::set<std::string>& characteristic_types()
{
    static const std::set<std::string> types = {
        vocab::owl_term("FunctionalProperty"),  vocab::owl_term("InverseFunctionalProperty"),
        vocab::owl_term("TransitiveProperty"),  vocab::owl_term("SymmetricProperty"),
        vocab::owl_term("AsymmetricProperty"),  vocab::owl_term("ReflexiveProperty"),
        vocab::owl_term("IrreflexiveProperty"),
    };
    return types;
}

const std::set<std::string>& builtin_annotation_properties()
{
    static const std::set<std::string> props = {
        vocab::kLabel,
        vocab::rdfs_term("comment"),
        vocab::rdfs_term("seeAlso"),
        vocab::rdfs_term("isDefinedBy"),
        vocab::owl_term("versionInfo"),
        vocab::owl_term("priorVersion"),
        vocab::owl_term("backwardCompatibleWith"),
        vocab::owl_term("incompatibleWith"),
    };
    return props;
}

bool in_namespace(const std::string& iri, std::string_view ns) { return iri.rfind(ns, 0) == 0; }

bool is_reserved_vocabulary(const std::string& iri)
{
    return in_namespace(iri, vocab::rdf) || in_namespace(iri, vocab::rdfs) || in_namespace(iri, vocab::owl);
}

bool is_true_literal(const Term& t)
{
    return t.is_literal() && (t.value == "true" || t.value == "1");
}

std::string kind_keyword(ClassExpr::Kind k)
{
    switch (k) {
    case ClassExpr::Kind::SomeValuesFrom: return "some";
    case ClassExpr::Kind::AllValuesFrom: return "only";
    case ClassExpr::Kind::HasValue: return "value";
    case ClassExpr::Kind::MinCardinality: return "min";
    case ClassExpr::Kind::MaxCardinality: return "max";
    case ClassExpr::Kind::ExactCardinality: return "exactly";
    case ClassExpr::Kind::IntersectionOf: return "and";
    case ClassExpr::Kind::UnionOf: return "or";
    case ClassExpr::Kind::ComplementOf: return "not";
    case ClassExpr::Kind::OneOf: return "oneOf";
    case ClassExpr::Kind::Opaque: return "opaque";
    case ClassExpr::Kind::Named: break;
    }
    return "named";
}

std::string term_text(const Term& t)
{
    if (t.is_iri()) return "<" + t.value + ">";
    if (t.is_blank()) return "_:" + t.value;
    std::string s = "\"" + t.value + "\"";
    if (!t.datatype.empty()) s += "^^<" + t.datatype + ">";
    if (!t.language.empty()) s += "@" + t.language;
    return s;
}

/// Triple index with consumption tracking, so leftover triples can be reported.
class Graph {
public:
    explicit Graph(const TripleSet& set) : triples_(set.triples), consumed_(set.triples.size(), false)
    {
        for (std::size_t i = 0; i < triples_.size(); ++i) by_subject_[key(triples_[i].subject)].push_back(i);
    }

    const std::vector<std::size_t>& about(const Term& subject) const
    {
        static const std::vector<std::size_t> none;
        auto it = by_subject_.find(key(subject));
        return it == by_subject_.end() ? none : it->second;
    }

    const Triple& at(std::size_t i) const { return triples_[i]; }
    void consume(std::size_t i) { consumed_[i] = true; }
    bool consumed(std::size_t i) const { return consumed_[i]; }
    std::size_t size() const { return triples_.size(); }

    std::optional<Term> object(const Term& subject, const std::string& predicate, bool mark = true)
    {
        for (auto i : about(subject)) {
            if (triples_[i].predicate == predicate) {
                if (mark) consume(i);
                return triples_[i].object;
            }
        }
        return std::nullopt;
    }

    std::set<std::string> types(const Term& subject) const
    {
        std::set<std::string> out;
        for (auto i : about(subject)) {
            if (triples_[i].predicate == vocab::kType && triples_[i].object.is_iri()) out.insert(triples_[i].object.value);
        }
        return out;
    }

    /// Items of an rdf:List; consumes the list cells.
    std::vector<Term> list(Term head)
    {
        std::vector<Term> items;
        std::set<std::string> visited;
        while (head.is_blank() && visited.insert(head.value).second) {
            auto first = object(head, vocab::kFirst);
            auto rest = object(head, vocab::kRest);
            if (!first || !rest) break;
            items.push_back(*first);
            head = *rest;
        }
        return items;
    }

private:
    static std::string key(const Term& t) { return (t.is_blank() ? "_:" : "") + t.value; }

    const std::vector<Triple>& triples_;
    std::vector<bool> consumed_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_subject_;
};

class ModelBuilder {
public:
    ModelBuilder(const TripleSet& triples, const PrefixMap& prefix_map) : graph_(triples)
    {
        for (const char* required : {"owl", "rdf", "rdfs"}) {
            if (!prefix_map.contains(required)) {
                throw ConfigError(std::string("prefix map must define '") + required + "'");
            }
        }
        model_.prefixes = prefix_map;
        for (const auto& [prefix, ns] : triples.namespaces) {
            if (!prefix.empty()) model_.prefixes.emplace(prefix, ns);
        }
    }

    OntologyModel build(BuildDiagnostics* diagnostics)
    {
        classify_subjects();
        if (!ambiguous_properties_.empty()) {
            std::string list;
            for (const auto& iri : ambiguous_properties_) list += (list.empty() ? "" : ", ") + iri;
            throw ModelError("entities typed as both object and data property: " + list);
        }
        for (std::size_t i = 0; i < graph_.size(); ++i) process_triple(i);
        for (auto& [iri, anns] : model_.annotations) {
            std::sort(anns.begin(), anns.end());
            anns.erase(std::unique(anns.begin(), anns.end()), anns.end());
        }
        std::sort(model_.class_axioms.begin(), model_.class_axioms.end());
        model_.class_axioms.erase(std::unique(model_.class_axioms.begin(), model_.class_axioms.end()),
                                  model_.class_axioms.end());
        std::sort(model_.property_assertions.begin(), model_.property_assertions.end());
        model_.property_assertions.erase(
            std::unique(model_.property_assertions.begin(), model_.property_assertions.end()),
            model_.property_assertions.end());
        std::sort(model_.ontology_annotations.begin(), model_.ontology_annotations.end());
        assign_labels(model_);
        model_.axiom_tally = count_axioms(model_);

        if (diagnostics != nullptr) {
            diagnostics->ignored_triples = 0;
            for (std::size_t i = 0; i < graph_.size(); ++i) {
                if (!graph_.consumed(i)) ++diagnostics->ignored_triples;
            }
            for (const auto& iri : model_.imports) {
                diagnostics->notes.push_back("owl:imports " + iri + " not fetched; supply the file explicitly");
            }
        }
        return std::move(model_);
    }

private:
    void classify_subjects()
    {
        std::set<std::string> object_props;
        std::set<std::string> data_props;
        for (std::size_t i = 0; i < graph_.size(); ++i) {
            const auto& t = graph_.at(i);
            if (t.predicate != vocab::kType || !t.subject.is_iri() || !t.object.is_iri()) continue;
            const auto& s = t.subject.value;
            const auto& type = t.object.value;
            if (type == kOntology) {
                if (model_.ontology_iri.empty()) model_.ontology_iri = s;
                graph_.consume(i);
            } else if (type == vocab::kOwlClass) {
                if (s != vocab::kOwlThing) model_.classes.emplace(s, ClassDecl{s, {}, {}, false});
                graph_.consume(i);
            } else if (type == kObjectProperty) {
                object_props.insert(s);
                graph_.consume(i);
            } else if (type == kDatatypeProperty) {
                data_props.insert(s);
                graph_.consume(i);
            } else if (type == kAnnotationProperty) {
                model_.annotation_properties.insert(s);
                graph_.consume(i);
            } else if (type == kRdfsDatatype) {
                model_.datatypes.insert(s);
                graph_.consume(i);
            } else if (type == kNamedIndividual) {
                model_.individuals[s];
                graph_.consume(i);
            }
        }
        for (const auto& iri : object_props) {
            if (data_props.contains(iri)) ambiguous_properties_.push_back(iri);
            model_.object_properties.emplace(iri, PropertyDecl{iri, {}, PropertyKind::Object, {}, {}, {}, {}, {}});
        }
        for (const auto& iri : data_props) {
            if (!object_props.contains(iri)) {
                model_.data_properties.emplace(iri, PropertyDecl{iri, {}, PropertyKind::Data, {}, {}, {}, {}, {}});
            }
        }
        // Subjects typed by a declared class are individuals even without owl:NamedIndividual.
        for (std::size_t i = 0; i < graph_.size(); ++i) {
            const auto& t = graph_.at(i);
            if (t.predicate == vocab::kType && t.subject.is_iri() && t.object.is_iri() &&
                model_.classes.contains(t.object.value)) {
                model_.individuals[t.subject.value];
            }
        }
    }

    PropertyDecl* property(const std::string& iri)
    {
        if (auto it = model_.object_properties.find(iri); it != model_.object_properties.end()) return &it->second;
        if (auto it = model_.data_properties.find(iri); it != model_.data_properties.end()) return &it->second;
        return nullptr;
    }

    bool is_annotation_predicate(const std::string& p) const
    {
        if (builtin_annotation_properties().contains(p) || model_.annotation_properties.contains(p)) return true;
        if (is_reserved_vocabulary(p)) return false;
        return !model_.object_properties.contains(p) && !model_.data_properties.contains(p);
    }

    void process_triple(std::size_t i)
    {
        if (graph_.consumed(i)) return;
        const Triple t = graph_.at(i);
        if (t.subject.is_blank()) {
            process_blank_subject(t.subject);
            return;
        }
        const auto& s = t.subject.value;
        const auto& p = t.predicate;

        if (s == model_.ontology_iri && !s.empty()) {
            if (p == vocab::owl_term("imports") && t.object.is_iri()) {
                model_.imports.insert(t.object.value);
                graph_.consume(i);
            } else if (!t.object.is_blank() && p != vocab::kType) {
                model_.ontology_annotations.push_back(Annotation{p, t.object});
                graph_.consume(i);
            }
            return;
        }

        if (p == vocab::kType) {
            process_type(i, s, t.object);
            return;
        }
        if (p == vocab::kSubClassOf) {
            if (t.object.is_iri()) {
                model_.subclass_axioms.emplace(s, t.object.value);
            } else if (t.object.is_blank()) {
                model_.class_axioms.push_back(ClassAxiom{ClassAxiom::Kind::SubClassOf, s, {expression(t.object)}});
            } else {
                return;
            }
            graph_.consume(i);
            return;
        }
        if (p == vocab::owl_term("equivalentClass") || p == vocab::owl_term("disjointWith")) {
            if (t.object.is_literal()) return;
            const auto kind = p == vocab::owl_term("equivalentClass") ? ClassAxiom::Kind::EquivalentTo
                                                                      : ClassAxiom::Kind::DisjointWith;
            model_.class_axioms.push_back(ClassAxiom{kind, s, {expression(t.object)}});
            graph_.consume(i);
            return;
        }
        if (auto* prop = property(s)) {
            if (process_property_axiom(i, *prop, p, t.object)) return;
        }
        if (p == kDeprecated) {
            if (auto it = model_.classes.find(s); it != model_.classes.end() && is_true_literal(t.object)) {
                it->second.deprecated = true;
                graph_.consume(i);
                return;
            }
        }
        if (p == kSkosNotation && t.object.is_literal()) {
            if (auto it = model_.classes.find(s); it != model_.classes.end() && !it->second.curie) {
                if (auto expanded = expand_curie(t.object.value, model_.prefixes); expanded && *expanded == s) {
                    it->second.curie = t.object.value;
                    graph_.consume(i);
                    return;
                }
            }
        }
        if ((model_.object_properties.contains(p) || model_.data_properties.contains(p)) && !t.object.is_blank()) {
            model_.individuals[s];
            model_.property_assertions.push_back(PropertyAssertion{s, p, t.object});
            graph_.consume(i);
            return;
        }
        if (is_annotation_predicate(p) && !t.object.is_blank()) {
            model_.annotations[s].push_back(Annotation{p, t.object});
            graph_.consume(i);
        }
    }

    void process_type(std::size_t i, const std::string& s, const Term& type)
    {
        if (!type.is_iri()) return;
        if (characteristic_types().contains(type.value)) {
            if (auto* prop = property(s)) {
                prop->characteristics.insert(type.value);
                graph_.consume(i);
            }
            return;
        }
        if (auto it = model_.individuals.find(s); it != model_.individuals.end()) {
            if (!is_reserved_vocabulary(type.value) || type.value == vocab::kOwlThing) {
                it->second.insert(type.value);
                graph_.consume(i);
            }
        }
    }

    bool process_property_axiom(std::size_t i, PropertyDecl& prop, const std::string& p, const Term& o)
    {
        if (o.is_literal()) return false;
        if (p == vocab::kDomain) {
            prop.domains.push_back(expression(o));
        } else if (p == vocab::kRange) {
            prop.ranges.push_back(expression(o));
        } else if (p == vocab::rdfs_term("subPropertyOf") && o.is_iri()) {
            prop.super_properties.insert(o.value);
        } else if (p == vocab::owl_term("inverseOf") && o.is_iri()) {
            prop.inverse_of.insert(o.value);
        } else {
            return false;
        }
        graph_.consume(i);
        return true;
    }

    void process_blank_subject(const Term& subject)
    {
        const auto types = graph_.types(subject);
        if (types.contains(kAllDisjointClasses)) {
            mark_types(subject);
            if (auto members = graph_.object(subject, vocab::owl_term("members"))) {
                ClassAxiom axiom{ClassAxiom::Kind::AllDisjoint, {}, {}};
                for (const auto& m : graph_.list(*members)) axiom.operands.push_back(expression(m));
                model_.class_axioms.push_back(std::move(axiom));
            }
        } else if (types.contains(kAxiom)) {
            // Axiom annotations ride on the axiom they annotate and are not separate axioms.
            for (auto i : graph_.about(subject)) graph_.consume(i);
        }
    }

    void mark_types(const Term& subject)
    {
        for (auto i : graph_.about(subject)) {
            if (graph_.at(i).predicate == vocab::kType) graph_.consume(i);
        }
    }

    std::uint64_t cardinality_value(const Term& t)
    {
        try {
            return std::stoull(t.value);
        } catch (const std::exception&) {
            return 0;
        }
    }

    ClassExpr expression(const Term& node)
    {
        if (node.is_iri()) return ClassExpr::named(node.value);
        if (!node.is_blank() || !expanding_.insert(node.value).second) {
            ClassExpr e;
            e.kind = ClassExpr::Kind::Opaque;
            e.opaque = "cyclic";
            return e;
        }
        ClassExpr e = expand_blank(node);
        expanding_.erase(node.value);
        return e;
    }

    ClassExpr expand_blank(const Term& node)
    {
        const auto types = graph_.types(node);
        ClassExpr e;
        auto take = [&](const std::string& local) { return graph_.object(node, vocab::owl_term(local)); };

        if (types.contains(kRestriction)) {
            mark_types(node);
            auto on_property = take("onProperty");
            e.iri = on_property && on_property->is_iri() ? on_property->value : std::string();
            if (auto v = take("someValuesFrom")) {
                e.kind = ClassExpr::Kind::SomeValuesFrom;
                e.operands.push_back(expression(*v));
            } else if (auto v2 = take("allValuesFrom")) {
                e.kind = ClassExpr::Kind::AllValuesFrom;
                e.operands.push_back(expression(*v2));
            } else if (auto v3 = take("hasValue")) {
                e.kind = ClassExpr::Kind::HasValue;
                e.value = *v3;
            } else {
                static const std::vector<std::pair<std::string, ClassExpr::Kind>> cards = {
                    {"minCardinality", ClassExpr::Kind::MinCardinality},
                    {"maxCardinality", ClassExpr::Kind::MaxCardinality},
                    {"cardinality", ClassExpr::Kind::ExactCardinality},
                    {"minQualifiedCardinality", ClassExpr::Kind::MinCardinality},
                    {"maxQualifiedCardinality", ClassExpr::Kind::MaxCardinality},
                    {"qualifiedCardinality", ClassExpr::Kind::ExactCardinality},
                };
                bool found = false;
                for (const auto& [local, kind] : cards) {
                    if (auto n = take(local)) {
                        e.kind = kind;
                        e.cardinality = cardinality_value(*n);
                        found = true;
                        break;
                    }
                }
                if (!found) return opaque(node);
                if (auto q = take("onClass")) e.operands.push_back(expression(*q));
                if (auto q = take("onDataRange")) e.operands.push_back(expression(*q));
            }
            return e;
        }
        if (auto list = graph_.object(node, vocab::owl_term("intersectionOf"))) {
            mark_types(node);
            e.kind = ClassExpr::Kind::IntersectionOf;
            for (const auto& item : graph_.list(*list)) e.operands.push_back(expression(item));
            return e;
        }
        if (auto list = graph_.object(node, vocab::owl_term("unionOf"))) {
            mark_types(node);
            e.kind = ClassExpr::Kind::UnionOf;
            for (const auto& item : graph_.list(*list)) e.operands.push_back(expression(item));
            return e;
        }
        if (auto inner = graph_.object(node, vocab::owl_term("complementOf"))) {
            mark_types(node);
            e.kind = ClassExpr::Kind::ComplementOf;
            e.operands.push_back(expression(*inner));
            return e;
        }
        if (auto list = graph_.object(node, vocab::owl_term("oneOf"))) {
            mark_types(node);
            e.kind = ClassExpr::Kind::OneOf;
            e.members = graph_.list(*list);
            return e;
        }
        return opaque(node);
    }

    ClassExpr opaque(const Term& node)
    {
        ClassExpr e;
        e.kind = ClassExpr::Kind::Opaque;
        std::set<std::string> predicates;
        for (auto i : graph_.about(node)) {
            predicates.insert(local_name(graph_.at(i).predicate));
            graph_.consume(i);
        }
        for (const auto& p : predicates) e.opaque += (e.opaque.empty() ? "" : ",") + p;
        return e;
    }

    Graph graph_;
    OntologyModel model_;
    std::vector<std::string> ambiguous_properties_;
    std::set<std::string> expanding_;
};

} // namespace

void ClassExpr::collect_named(std::set<std::string>& out) const
{
    if (kind == Kind::Named) {
        out.insert(iri);
        return;
    }
    for (const auto& op : operands) op.collect_named(out);
}

std::string to_string(const ClassExpr& e)
{
    using K = ClassExpr::Kind;
    switch (e.kind) {
    case K::Named: return "<" + e.iri + ">";
    case K::SomeValuesFrom:
    case K::AllValuesFrom:
        return "(<" + e.iri + "> " + kind_keyword(e.kind) + " " + (e.operands.empty() ? "?" : to_string(e.operands[0])) + ")";
    case K::HasValue: return "(<" + e.iri + "> value " + (e.value ? term_text(*e.value) : "?") + ")";
    case K::MinCardinality:
    case K::MaxCardinality:
    case K::ExactCardinality: {
        std::string s = "(<" + e.iri + "> " + kind_keyword(e.kind) + " " + std::to_string(e.cardinality);
        if (!e.operands.empty()) s += " " + to_string(e.operands[0]);
        return s + ")";
    }
    case K::IntersectionOf:
    case K::UnionOf: {
        std::string s = "(";
        for (std::size_t i = 0; i < e.operands.size(); ++i) {
            if (i > 0) s += " " + kind_keyword(e.kind) + " ";
            s += to_string(e.operands[i]);
        }
        return s + ")";
    }
    case K::ComplementOf: return "(not " + (e.operands.empty() ? std::string("?") : to_string(e.operands[0])) + ")";
    case K::OneOf: {
        std::string s = "{";
        for (std::size_t i = 0; i < e.members.size(); ++i) s += (i ? " " : "") + term_text(e.members[i]);
        return s + "}";
    }
    case K::Opaque: return "[" + e.opaque + "]";
    }
    return {};
}

bool operator<(const ClassAxiom& a, const ClassAxiom& b)
{
    auto key = [](const ClassAxiom& x) {
        std::string ops;
        for (const auto& o : x.operands) ops += to_string(o) + "\x1f";
        return std::tuple(static_cast<int>(x.kind), x.subject, ops);
    };
    return key(a) < key(b);
}

std::optional<std::string> PropertyDecl::domain() const
{
    if (!domains.empty() && domains.front().is_named()) return domains.front().iri;
    return std::nullopt;
}

std::optional<std::string> PropertyDecl::range() const
{
    if (!ranges.empty() && ranges.front().is_named()) return ranges.front().iri;
    return std::nullopt;
}

PrefixMap standard_prefixes()
{
    return PrefixMap{
        {"rdf", std::string(vocab::rdf)},   {"rdfs", std::string(vocab::rdfs)}, {"owl", std::string(vocab::owl)},
        {"xsd", std::string(vocab::xsd)},   {"skos", std::string(vocab::skos)},
    };
}

PrefixMap load_prefix_map(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open prefix map " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("prefix map " + path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("prefix map " + path + " must be a JSON object");
    PrefixMap map = standard_prefixes();
    for (const auto& [prefix, ns] : j.items()) {
        if (!ns.is_string()) throw ConfigError("prefix '" + prefix + "' must map to a string");
        map[prefix] = ns.get<std::string>();
    }
    return map;
}

void assign_labels(OntologyModel& model)
{
    auto pick = [&](const std::string& iri) -> std::optional<std::string> {
        auto it = model.annotations.find(iri);
        if (it == model.annotations.end()) return std::nullopt;
        const Annotation* best = nullptr;
        auto rank = [](const Term& t) { return t.language.empty() ? 0 : (t.language.rfind("en", 0) == 0 ? 1 : 2); };
        for (const auto& a : it->second) {
            if (a.property != vocab::kLabel || !a.value.is_literal()) continue;
            if (best == nullptr || rank(a.value) < rank(best->value)) best = &a;
        }
        return best ? std::optional<std::string>(best->value.value) : std::nullopt;
    };
    for (auto& [iri, c] : model.classes) c.label = pick(iri);
    for (auto& [iri, p] : model.object_properties) p.label = pick(iri);
    for (auto& [iri, p] : model.data_properties) p.label = pick(iri);
}

OntologyModel build_model(const TripleSet& triples, const PrefixMap& prefix_map, BuildDiagnostics* diagnostics)
{
    return ModelBuilder(triples, prefix_map).build(diagnostics);
}

AxiomTally count_axioms(const OntologyModel& model)
{
    AxiomTally t;
    t.declaration = model.classes.size() + model.object_properties.size() + model.data_properties.size() +
                    model.annotation_properties.size() + model.datatypes.size() + model.individuals.size();
    t.subclass = model.subclass_axioms.size();
    for (const auto& axiom : model.class_axioms) {
        if (axiom.kind == ClassAxiom::Kind::SubClassOf) {
            ++t.subclass;
        } else {
            ++t.other_logical;
        }
    }
    auto properties = [&](const std::map<std::string, PropertyDecl>& props) {
        for (const auto& [iri, p] : props) {
            t.domain += p.domains.size();
            t.range += p.ranges.size();
            t.other_logical += p.super_properties.size() + p.inverse_of.size() + p.characteristics.size();
        }
    };
    properties(model.object_properties);
    properties(model.data_properties);
    for (const auto& [iri, anns] : model.annotations) t.annotation += anns.size();
    for (const auto& [iri, c] : model.classes) t.annotation += (c.curie ? 1 : 0) + (c.deprecated ? 1 : 0);
    for (const auto& [iri, types] : model.individuals) t.assertion += types.size();
    t.assertion += model.property_assertions.size();
    return t;
}

OntologyModel load_ontology(const std::string& path, const PrefixMap& prefix_map, BuildDiagnostics* diagnostics)
{
    return build_model(parse_rdfxml_file(path), prefix_map, diagnostics);
}

std::string local_name(std::string_view iri)
{
    auto pos = iri.find_last_of("#/");
    return std::string(pos == std::string_view::npos ? iri : iri.substr(pos + 1));
}

std::string display_label(const OntologyModel& model, const std::string& iri)
{
    if (auto it = model.classes.find(iri); it != model.classes.end() && it->second.label) return *it->second.label;
    if (iri == vocab::kOwlThing) return "Thing";
    return local_name(iri);
}

std::optional<std::string> expand_curie(std::string_view curie, const PrefixMap& prefixes)
{
    auto colon = curie.find(':');
    if (colon == std::string_view::npos || colon == 0) return std::nullopt;
    auto it = prefixes.find(std::string(curie.substr(0, colon)));
    if (it == prefixes.end()) return std::nullopt;
    return it->second + std::string(curie.substr(colon + 1));
}

} // namespace ontoeval
