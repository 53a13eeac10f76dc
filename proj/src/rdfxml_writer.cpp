#include "ontoeval/rdfxml_writer.hpp"

#include "ontoeval/error.hpp"

#include <fstream>
#include <sstream>

namespace ontoeval {

namespace {

bool is_name_start(unsigned char c)
{
    return std::isalpha(c) || c == '_' || c >= 0x80;
}

bool is_name_char(unsigned char c)
{
    return is_name_start(c) || std::isdigit(c) || c == '-' || c == '.';
}

bool is_ncname(std::string_view s)
{
    if (s.empty() || !is_name_start(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s) {
        if (!is_name_char(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

std::string escape(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\r': out += "&#13;"; break;
        default: out += c;
        }
    }
    return out;
}

bool contains_opaque(const ClassExpr& e)
{
    if (e.kind == ClassExpr::Kind::Opaque) return true;
    for (const auto& op : e.operands) {
        if (contains_opaque(op)) return true;
    }
    return false;
}

class Writer {
public:
    explicit Writer(const OntologyModel& model) : model_(model)
    {
        for (const auto& [prefix, ns] : model.prefixes) {
            if (is_ncname(prefix) && prefix != "xml" && prefix != "xmlns" && !ns.empty() &&
                prefix.find(':') == std::string::npos) {
                declared_.emplace(prefix, ns);
            }
        }
        for (const auto& [prefix, ns] : {std::pair<std::string, std::string>{"rdf", std::string(vocab::rdf)},
                                         {"rdfs", std::string(vocab::rdfs)},
                                         {"owl", std::string(vocab::owl)}}) {
            auto it = declared_.find(prefix);
            if (it != declared_.end() && it->second != ns) {
                throw ModelError("prefix '" + prefix + "' is bound to a non-standard namespace");
            }
            declared_.emplace(prefix, ns);
        }
    }

    std::string run(std::size_t* skipped)
    {
        header();
        ontology_header();
        for (const auto& iri : model_.annotation_properties) {
            open_node("owl:AnnotationProperty", iri);
            annotations(iri);
            close_node("owl:AnnotationProperty");
        }
        for (const auto& iri : model_.datatypes) {
            open_node("rdfs:Datatype", iri);
            annotations(iri);
            close_node("rdfs:Datatype");
        }
        for (const auto& [iri, p] : model_.object_properties) property(p, "owl:ObjectProperty");
        for (const auto& [iri, p] : model_.data_properties) property(p, "owl:DatatypeProperty");
        for (const auto& [iri, c] : model_.classes) class_decl(c);
        orphan_axioms();
        for (const auto& [iri, types] : model_.individuals) individual(iri, types);
        for (const auto& [iri, anns] : model_.annotations) {
            if (written_.contains(iri)) continue;
            open_node("rdf:Description", iri);
            annotations(iri);
            close_node("rdf:Description");
        }
        out_ << "</rdf:RDF>\n";
        if (skipped != nullptr) *skipped = skipped_;
        return out_.str();
    }

private:
    void header()
    {
        out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<rdf:RDF";
        for (const auto& [prefix, ns] : declared_) out_ << "\n     xmlns:" << prefix << "=\"" << escape(ns) << "\"";
        out_ << ">\n";
    }

    void ontology_header()
    {
        if (model_.ontology_iri.empty()) return;
        open_node("owl:Ontology", model_.ontology_iri);
        for (const auto& imp : model_.imports) resource_property(vocab::owl_term("imports"), imp);
        for (const auto& a : model_.ontology_annotations) value_property(a.property, a.value);
        close_node("owl:Ontology");
    }

    void open_node(const std::string& element, const std::string& iri)
    {
        out_ << "  <" << element << " rdf:about=\"" << escape(iri) << "\">\n";
        written_.insert(iri);
    }

    void close_node(const std::string& element) { out_ << "  </" << element << ">\n"; }

    /// Opening tag text for a property element; uses a local default
    /// namespace when no declared prefix covers the IRI.
    std::pair<std::string, std::string> tag(const std::string& iri) const
    {
        bool found = false;
        std::pair<std::string, std::string> candidate;
        for (const auto& [prefix, ns] : declared_) {
            if (iri.size() > ns.size() && iri.compare(0, ns.size(), ns) == 0 && is_ncname(iri.substr(ns.size()))) {
                if (!found || ns.size() > candidate.second.size()) {
                    candidate = {prefix, ns};
                    found = true;
                }
            }
        }
        if (found) {
            std::string name = candidate.first + ":" + iri.substr(candidate.second.size());
            return {name, name};
        }
        for (std::size_t split = 1; split < iri.size(); ++split) {
            const std::string local = iri.substr(split);
            if (is_ncname(local)) {
                const std::string ns = iri.substr(0, split);
                return {local + " xmlns=\"" + escape(ns) + "\"", local};
            }
        }
        throw ModelError("cannot serialize predicate IRI as an XML name: " + iri);
    }

    void resource_property(const std::string& predicate, const std::string& iri, int indent = 4)
    {
        const auto [open, close] = tag(predicate);
        out_ << std::string(indent, ' ') << "<" << open << " rdf:resource=\"" << escape(iri) << "\"/>\n";
    }

    void value_property(const std::string& predicate, const Term& value, int indent = 4)
    {
        if (value.is_iri()) {
            resource_property(predicate, value.value, indent);
            return;
        }
        if (value.is_blank()) return;
        const auto [open, close] = tag(predicate);
        out_ << std::string(indent, ' ') << "<" << open;
        if (value.datatype == vocab::kXmlLiteral) {
            out_ << " rdf:parseType=\"Literal\">" << value.value;
        } else {
            if (!value.datatype.empty()) out_ << " rdf:datatype=\"" << escape(value.datatype) << "\"";
            if (!value.language.empty()) out_ << " xml:lang=\"" << escape(value.language) << "\"";
            out_ << ">" << escape(value.value);
        }
        out_ << "</" << close << ">\n";
    }

    void annotations(const std::string& iri)
    {
        auto it = model_.annotations.find(iri);
        if (it == model_.annotations.end()) return;
        for (const auto& a : it->second) value_property(a.property, a.value);
    }

    bool is_data_property(const std::string& iri) const { return model_.data_properties.contains(iri); }

    void expression_property(const std::string& predicate, const ClassExpr& e, int indent)
    {
        if (e.is_named()) {
            resource_property(predicate, e.iri, indent);
            return;
        }
        const auto [open, close] = tag(predicate);
        out_ << std::string(indent, ' ') << "<" << open << ">\n";
        expression_node(e, indent + 2);
        out_ << std::string(indent, ' ') << "</" << close << ">\n";
    }

    void expression_node(const ClassExpr& e, int indent)
    {
        using K = ClassExpr::Kind;
        const std::string pad(indent, ' ');
        if (e.is_named()) {
            out_ << pad << "<rdf:Description rdf:about=\"" << escape(e.iri) << "\"/>\n";
            return;
        }
        switch (e.kind) {
        case K::SomeValuesFrom:
        case K::AllValuesFrom:
        case K::HasValue:
        case K::MinCardinality:
        case K::MaxCardinality:
        case K::ExactCardinality: {
            out_ << pad << "<owl:Restriction>\n";
            resource_property(vocab::owl_term("onProperty"), e.iri, indent + 2);
            if (e.kind == K::SomeValuesFrom) {
                expression_property(vocab::owl_term("someValuesFrom"), e.operands.at(0), indent + 2);
            } else if (e.kind == K::AllValuesFrom) {
                expression_property(vocab::owl_term("allValuesFrom"), e.operands.at(0), indent + 2);
            } else if (e.kind == K::HasValue) {
                value_property(vocab::owl_term("hasValue"), *e.value, indent + 2);
            } else {
                const bool qualified = !e.operands.empty();
                std::string name = e.kind == K::MinCardinality   ? "minCardinality"
                                   : e.kind == K::MaxCardinality ? "maxCardinality"
                                                                 : "cardinality";
                if (qualified) {
                    name = e.kind == K::ExactCardinality ? "qualifiedCardinality"
                                                         : name.substr(0, 3) + "QualifiedCardinality";
                }
                value_property(vocab::owl_term(name),
                               Term::literal(std::to_string(e.cardinality), vocab::xsd_term("nonNegativeInteger")),
                               indent + 2);
                if (qualified) {
                    expression_property(vocab::owl_term(is_data_property(e.iri) ? "onDataRange" : "onClass"),
                                        e.operands[0], indent + 2);
                }
            }
            out_ << pad << "</owl:Restriction>\n";
            break;
        }
        case K::IntersectionOf:
        case K::UnionOf: {
            out_ << pad << "<owl:Class>\n";
            out_ << pad << "  <owl:" << (e.kind == K::IntersectionOf ? "intersectionOf" : "unionOf")
                 << " rdf:parseType=\"Collection\">\n";
            for (const auto& op : e.operands) expression_node(op, indent + 4);
            out_ << pad << "  </owl:" << (e.kind == K::IntersectionOf ? "intersectionOf" : "unionOf") << ">\n";
            out_ << pad << "</owl:Class>\n";
            break;
        }
        case K::ComplementOf:
            out_ << pad << "<owl:Class>\n";
            expression_property(vocab::owl_term("complementOf"), e.operands.at(0), indent + 2);
            out_ << pad << "</owl:Class>\n";
            break;
        case K::OneOf: {
            out_ << pad << "<owl:Class>\n" << pad << "  <owl:oneOf>\n";
            list_cells(e.members, 0, indent + 4);
            out_ << pad << "  </owl:oneOf>\n" << pad << "</owl:Class>\n";
            break;
        }
        case K::Named:
        case K::Opaque: break;
        }
    }

    void list_cells(const std::vector<Term>& items, std::size_t i, int indent)
    {
        const std::string pad(indent, ' ');
        if (i == items.size()) {
            out_ << pad << "<rdf:Description rdf:about=\"" << escape(vocab::kNil) << "\"/>\n";
            return;
        }
        out_ << pad << "<rdf:Description>\n";
        value_property(vocab::kFirst, items[i], indent + 2);
        if (i + 1 == items.size()) {
            resource_property(vocab::kRest, vocab::kNil, indent + 2);
        } else {
            out_ << pad << "  <rdf:rest>\n";
            list_cells(items, i + 1, indent + 4);
            out_ << pad << "  </rdf:rest>\n";
        }
        out_ << pad << "</rdf:Description>\n";
    }

    void property(const PropertyDecl& p, const std::string& element)
    {
        open_node(element, p.iri);
        for (const auto& c : p.characteristics) resource_property(vocab::kType, c);
        for (const auto& s : p.super_properties) resource_property(vocab::rdfs_term("subPropertyOf"), s);
        for (const auto& inv : p.inverse_of) resource_property(vocab::owl_term("inverseOf"), inv);
        for (const auto& d : p.domains) {
            if (contains_opaque(d)) {
                ++skipped_;
                continue;
            }
            expression_property(vocab::kDomain, d, 4);
        }
        for (const auto& r : p.ranges) {
            if (contains_opaque(r)) {
                ++skipped_;
                continue;
            }
            expression_property(vocab::kRange, r, 4);
        }
        annotations(p.iri);
        close_node(element);
    }

    void class_axioms_of(const std::string& subject)
    {
        for (const auto& axiom : model_.class_axioms) {
            if (axiom.kind == ClassAxiom::Kind::AllDisjoint || axiom.subject != subject) continue;
            if (contains_opaque(axiom.operands.at(0))) {
                ++skipped_;
                continue;
            }
            const std::string predicate = axiom.kind == ClassAxiom::Kind::SubClassOf     ? vocab::kSubClassOf
                                          : axiom.kind == ClassAxiom::Kind::EquivalentTo ? vocab::owl_term("equivalentClass")
                                                                                         : vocab::owl_term("disjointWith");
            expression_property(predicate, axiom.operands[0], 4);
        }
    }

    void class_decl(const ClassDecl& c)
    {
        open_node("owl:Class", c.iri);
        for (auto it = model_.subclass_axioms.lower_bound({c.iri, std::string()});
             it != model_.subclass_axioms.end() && it->first == c.iri; ++it) {
            resource_property(vocab::kSubClassOf, it->second);
        }
        class_axioms_of(c.iri);
        annotations(c.iri);
        if (c.curie) value_property(std::string(vocab::skos) + "notation", Term::literal(*c.curie));
        if (c.deprecated) value_property(vocab::owl_term("deprecated"), Term::literal("true", vocab::xsd_term("boolean")));
        close_node("owl:Class");
    }

    void orphan_axioms()
    {
        std::set<std::string> subjects;
        for (const auto& [sub, super] : model_.subclass_axioms) {
            if (!model_.classes.contains(sub)) subjects.insert(sub);
        }
        for (const auto& axiom : model_.class_axioms) {
            if (axiom.kind != ClassAxiom::Kind::AllDisjoint && !model_.classes.contains(axiom.subject)) {
                subjects.insert(axiom.subject);
            }
        }
        for (const auto& s : subjects) {
            out_ << "  <rdf:Description rdf:about=\"" << escape(s) << "\">\n";
            for (auto it = model_.subclass_axioms.lower_bound({s, std::string()});
                 it != model_.subclass_axioms.end() && it->first == s; ++it) {
                resource_property(vocab::kSubClassOf, it->second);
            }
            class_axioms_of(s);
            out_ << "  </rdf:Description>\n";
        }
        for (const auto& axiom : model_.class_axioms) {
            if (axiom.kind != ClassAxiom::Kind::AllDisjoint) continue;
            bool opaque = false;
            for (const auto& op : axiom.operands) opaque = opaque || contains_opaque(op);
            if (opaque) {
                ++skipped_;
                continue;
            }
            out_ << "  <owl:AllDisjointClasses>\n    <owl:members rdf:parseType=\"Collection\">\n";
            for (const auto& op : axiom.operands) expression_node(op, 6);
            out_ << "    </owl:members>\n  </owl:AllDisjointClasses>\n";
        }
    }

    void individual(const std::string& iri, const std::set<std::string>& types)
    {
        open_node("owl:NamedIndividual", iri);
        for (const auto& t : types) resource_property(vocab::kType, t);
        for (const auto& a : model_.property_assertions) {
            if (a.subject == iri) value_property(a.property, a.object);
        }
        annotations(iri);
        close_node("owl:NamedIndividual");
    }

    const OntologyModel& model_;
    std::map<std::string, std::string> declared_;
    std::set<std::string> written_;
    std::ostringstream out_;
    std::size_t skipped_ = 0;
};

} // namespace

std::string write_rdfxml(const OntologyModel& model, std::size_t* skipped)
{
    return Writer(model).run(skipped);
}

void write_rdfxml_file(const OntologyModel& model, const std::string& path, std::size_t* skipped)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << write_rdfxml(model, skipped);
}

} // namespace ontoeval
