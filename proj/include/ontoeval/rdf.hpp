#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace ontoeval {

namespace vocab {
inline constexpr std::string_view rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view rdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view owl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view skos = "http://www.w3.org/2004/02/skos/core#";
inline constexpr std::string_view xml = "http://www.w3.org/XML/1998/namespace";

std::string rdf_term(std::string_view local);
std::string rdfs_term(std::string_view local);
std::string owl_term(std::string_view local);
std::string xsd_term(std::string_view local);

inline const std::string kType = rdf_term("type");
inline const std::string kFirst = rdf_term("first");
inline const std::string kRest = rdf_term("rest");
inline const std::string kNil = rdf_term("nil");
inline const std::string kXmlLiteral = rdf_term("XMLLiteral");
inline const std::string kSubClassOf = rdfs_term("subClassOf");
inline const std::string kLabel = rdfs_term("label");
inline const std::string kDomain = rdfs_term("domain");
inline const std::string kRange = rdfs_term("range");
inline const std::string kOwlClass = owl_term("Class");
inline const std::string kOwlThing = owl_term("Thing");
} // namespace vocab

/// One RDF node. Blank node values are document-scoped ids without the "_:" prefix.
struct Term {
    enum class Kind { Iri, Blank, Literal };

    Kind kind = Kind::Iri;
    std::string value;
    std::string datatype;  // literals only; empty for plain literals
    std::string language;  // literals only

    static Term iri(std::string v) { return Term{Kind::Iri, std::move(v), {}, {}}; }
    static Term blank(std::string v) { return Term{Kind::Blank, std::move(v), {}, {}}; }
    static Term literal(std::string v, std::string datatype = {}, std::string language = {})
    {
        return Term{Kind::Literal, std::move(v), std::move(datatype), std::move(language)};
    }

    bool is_iri() const noexcept { return kind == Kind::Iri; }
    bool is_blank() const noexcept { return kind == Kind::Blank; }
    bool is_literal() const noexcept { return kind == Kind::Literal; }

    friend bool operator==(const Term&, const Term&) = default;
    friend bool operator<(const Term& a, const Term& b)
    {
        return std::tie(a.kind, a.value, a.datatype, a.language) <
               std::tie(b.kind, b.value, b.datatype, b.language);
    }
};

/// Predicate is always an absolute IRI; literals appear only as objects.
struct Triple {
    Term subject;
    std::string predicate;
    Term object;

    friend bool operator==(const Triple&, const Triple&) = default;
    friend bool operator<(const Triple& a, const Triple& b)
    {
        return std::tie(a.subject, a.predicate, a.object) < std::tie(b.subject, b.predicate, b.object);
    }
};

/// prefix name -> namespace IRI
using PrefixMap = std::map<std::string, std::string>;

/// Result of reading one RDF/XML document. Triples are deduplicated and kept in
/// first-occurrence order; namespaces holds every xmlns declaration seen.
struct TripleSet {
    std::vector<Triple> triples;
    PrefixMap namespaces;

    std::size_t size() const noexcept { return triples.size(); }
    bool empty() const noexcept { return triples.empty(); }
};

struct RdfXmlOptions {
    /// Base IRI used when the document carries no xml:base.
    std::string base_iri = "urn:ontoeval:document";
    std::size_t max_bytes = 256u * 1024u * 1024u;
};

/// Reads an RDF/XML document. Throws ParseError on malformed XML (with
/// line/column) and UnsupportedConstruct for other OWL serializations or
/// rdf:parseType values other than Resource, Literal and Collection.
TripleSet parse_rdfxml(std::string_view document, const RdfXmlOptions& options = {});
TripleSet parse_rdfxml(std::istream& in, const RdfXmlOptions& options = {});
TripleSet parse_rdfxml_file(const std::string& path, const RdfXmlOptions& options = {});

/// Resolves a (possibly relative) IRI reference against a base IRI.
std::string resolve_iri(std::string_view base, std::string_view reference);

} // namespace ontoeval
