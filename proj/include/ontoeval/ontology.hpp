#pragma once

#include "ontoeval/rdf.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ontoeval {

/// Anonymous or named OWL class expression, reconstructed from its blank-node
/// encoding. Shapes the reader does not recognise become Kind::Opaque and keep
/// a description of their predicates so they still count as axioms.
struct ClassExpr {
    enum class Kind {
        Named,
        SomeValuesFrom,
        AllValuesFrom,
        HasValue,
        MinCardinality,
        MaxCardinality,
        ExactCardinality,
        IntersectionOf,
        UnionOf,
        ComplementOf,
        OneOf,
        Opaque
    };

    Kind kind = Kind::Named;
    std::string iri;                 // class/datatype IRI (Named) or restricted property
    std::vector<ClassExpr> operands; // filler, qualification or boolean operands
    std::optional<Term> value;       // HasValue target
    std::uint64_t cardinality = 0;
    std::vector<Term> members;       // OneOf individuals/literals
    std::string opaque;              // Opaque: sorted predicate list

    static ClassExpr named(std::string iri)
    {
        ClassExpr e;
        e.iri = std::move(iri);
        return e;
    }

    bool is_named() const noexcept { return kind == Kind::Named; }

    /// Named class IRIs mentioned anywhere inside the expression.
    void collect_named(std::set<std::string>& out) const;

    friend bool operator==(const ClassExpr&, const ClassExpr&) = default;
};

/// Manchester-like rendering; used for ordering, reports and diagnostics.
std::string to_string(const ClassExpr& e);

struct ClassAxiom {
    enum class Kind { SubClassOf, EquivalentTo, DisjointWith, AllDisjoint };

    Kind kind = Kind::SubClassOf;
    std::string subject;               // empty for AllDisjoint
    std::vector<ClassExpr> operands;   // one for the binary kinds, members for AllDisjoint

    friend bool operator==(const ClassAxiom&, const ClassAxiom&) = default;
    friend bool operator<(const ClassAxiom& a, const ClassAxiom& b);
};

struct ClassDecl {
    std::string iri;
    std::optional<std::string> label;
    std::optional<std::string> curie;
    bool deprecated = false;

    friend bool operator==(const ClassDecl&, const ClassDecl&) = default;
};

enum class PropertyKind { Object, Data };

struct PropertyDecl {
    std::string iri;
    std::optional<std::string> label;
    PropertyKind kind = PropertyKind::Object;
    std::vector<ClassExpr> domains;
    std::vector<ClassExpr> ranges;   // classes for object properties, datatypes for data properties
    std::set<std::string> super_properties;
    std::set<std::string> inverse_of;
    std::set<std::string> characteristics;  // owl:FunctionalProperty etc.

    /// First declared domain/range as a single IRI, when it is a named entity.
    std::optional<std::string> domain() const;
    std::optional<std::string> range() const;

    friend bool operator==(const PropertyDecl&, const PropertyDecl&) = default;
};

struct Annotation {
    std::string property;
    Term value;

    friend bool operator==(const Annotation&, const Annotation&) = default;
    friend bool operator<(const Annotation& a, const Annotation& b)
    {
        return std::tie(a.property, a.value) < std::tie(b.property, b.value);
    }
};

struct PropertyAssertion {
    std::string subject;
    std::string property;
    Term object;

    friend bool operator==(const PropertyAssertion&, const PropertyAssertion&) = default;
    friend bool operator<(const PropertyAssertion& a, const PropertyAssertion& b)
    {
        return std::tie(a.subject, a.property, a.object) < std::tie(b.subject, b.property, b.object);
    }
};

/// Axiom counts per category. `total` is the sum of all categories; the
/// headline figure used for comparisons is declarations plus logical axioms
/// (everything except annotation assertions).
struct AxiomTally {
    std::size_t declaration = 0;
    std::size_t subclass = 0;
    std::size_t domain = 0;
    std::size_t range = 0;
    std::size_t annotation = 0;
    std::size_t assertion = 0;
    std::size_t other_logical = 0;  // equivalence, disjointness, sub/inverse property, characteristics

    std::size_t logical() const noexcept { return subclass + domain + range + assertion + other_logical; }
    std::size_t headline() const noexcept { return declaration + logical(); }
    std::size_t total() const noexcept { return headline() + annotation; }

    friend bool operator==(const AxiomTally&, const AxiomTally&) = default;
};

struct OntologyModel {
    std::string ontology_iri;
    std::set<std::string> imports;
    std::vector<Annotation> ontology_annotations;
    PrefixMap prefixes;

    std::map<std::string, ClassDecl> classes;
    /// Named-to-named subsumptions, including explicit `C subClassOf owl:Thing`.
    std::set<std::pair<std::string, std::string>> subclass_axioms;
    /// Subsumptions with anonymous superclasses, equivalences and disjointness.
    std::vector<ClassAxiom> class_axioms;
    std::map<std::string, PropertyDecl> object_properties;
    std::map<std::string, PropertyDecl> data_properties;
    std::set<std::string> annotation_properties;
    std::set<std::string> datatypes;
    std::map<std::string, std::set<std::string>> individuals;  // iri -> asserted types
    std::vector<PropertyAssertion> property_assertions;
    /// Entity IRI -> sorted annotations (labels, comments, ...). CURIEs and
    /// deprecation live on ClassDecl instead.
    std::map<std::string, std::vector<Annotation>> annotations;
    AxiomTally axiom_tally;

    friend bool operator==(const OntologyModel&, const OntologyModel&) = default;
};

/// Non-fatal observations from build_model.
struct BuildDiagnostics {
    std::size_t ignored_triples = 0;
    std::vector<std::string> notes;
};

/// Prefix map with the rdf, rdfs, owl, xsd and skos namespaces.
PrefixMap standard_prefixes();

/// Loads a prefix configuration file (JSON object prefix -> namespace).
PrefixMap load_prefix_map(const std::string& path);

/// Materializes the OWL structures from a triple set. `prefix_map` must
/// define owl, rdf and rdfs. Document namespace declarations are merged into
/// the model's prefixes; entries from `prefix_map` win on conflict.
OntologyModel build_model(const TripleSet& triples, const PrefixMap& prefix_map,
                          BuildDiagnostics* diagnostics = nullptr);

/// Sets ClassDecl/PropertyDecl labels from rdfs:label annotations, preferring
/// untagged literals, then English, then the first other language.
void assign_labels(OntologyModel& model);

/// Deterministic tally computed from the model's fields alone.
AxiomTally count_axioms(const OntologyModel& model);

/// Convenience: parse_rdfxml_file + build_model.
OntologyModel load_ontology(const std::string& path, const PrefixMap& prefix_map = standard_prefixes(),
                            BuildDiagnostics* diagnostics = nullptr);

/// Label used for display: rdfs:label when present, otherwise the IRI local name.
std::string display_label(const OntologyModel& model, const std::string& iri);

/// The part of an IRI after the last '#' or '/'.
std::string local_name(std::string_view iri);

/// Expands prefix:local under the given map; nullopt when the prefix is unknown.
std::optional<std::string> expand_curie(std::string_view curie, const PrefixMap& prefixes);

} // namespace ontoeval
