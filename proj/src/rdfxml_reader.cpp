#include "ontoeval/rdf.hpp"

#include "ontoeval/error.hpp"

#include <expat.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

namespace ontoeval {

namespace vocab {
std::string rdf_term(std::string_view local) { return std::string(rdf) + std::string(local); }
std::string rdfs_term(std::string_view local) { return std::string(rdfs) + std::string(local); }
std::string owl_term(std::string_view local) { return std::string(owl) + std::string(local); }
std::string xsd_term(std::string_view local) { return std::string(xsd) + std::string(local); }
} // namespace vocab

namespace {

// expat reports namespaced names as "uri<sep>local<sep>prefix".
constexpr char kNsSep = '\x1f';

struct Attribute {
    std::string ns;
    std::string local;
    std::string prefix;
    std::string value;
};

struct Element;

struct Child {
    std::string text;
    std::unique_ptr<Element> element;  // null for text nodes
};

struct Element {
    std::string ns;
    std::string local;
    std::string prefix;
    std::vector<Attribute> attributes;
    std::vector<Child> children;
    std::size_t line = 0;
    std::size_t column = 0;

    bool is(std::string_view namespace_iri, std::string_view name) const
    {
        return ns == namespace_iri && local == name;
    }
    std::string iri() const { return ns + local; }

    const Attribute* attribute(std::string_view namespace_iri, std::string_view name) const
    {
        for (const auto& a : attributes) {
            if (a.ns == namespace_iri && a.local == name) return &a;
        }
        return nullptr;
    }

    bool has_element_children() const
    {
        for (const auto& c : children) {
            if (c.element) return true;
        }
        return false;
    }

    std::string text() const
    {
        std::string out;
        for (const auto& c : children) {
            if (!c.element) out += c.text;
        }
        return out;
    }
};

void split_name(const char* raw, std::string& ns, std::string& local, std::string& prefix)
{
    std::string_view name(raw);
    auto first = name.find(kNsSep);
    if (first == std::string_view::npos) {
        ns.clear();
        local = std::string(name);
        prefix.clear();
        return;
    }
    ns = std::string(name.substr(0, first));
    auto rest = name.substr(first + 1);
    auto second = rest.find(kNsSep);
    if (second == std::string_view::npos) {
        local = std::string(rest);
        prefix.clear();
    } else {
        local = std::string(rest.substr(0, second));
        prefix = std::string(rest.substr(second + 1));
    }
}

class DomBuilder {
public:
    explicit DomBuilder(PrefixMap& namespaces) : namespaces_(namespaces) {}

    std::unique_ptr<Element> parse(std::string_view document)
    {
        std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(
            XML_ParserCreateNS("UTF-8", kNsSep), &XML_ParserFree);
        if (!parser) throw Error("cannot allocate XML parser");
        XML_SetReturnNSTriplet(parser.get(), XML_TRUE);
        XML_SetUserData(parser.get(), this);
        XML_SetElementHandler(parser.get(), &DomBuilder::on_start, &DomBuilder::on_end);
        XML_SetCharacterDataHandler(parser.get(), &DomBuilder::on_text);
        XML_SetStartNamespaceDeclHandler(parser.get(), &DomBuilder::on_namespace);
        parser_ = parser.get();

        constexpr std::size_t kChunk = 1u << 20;
        std::size_t offset = 0;
        do {
            const std::size_t n = std::min(kChunk, document.size() - offset);
            const bool last = offset + n == document.size();
            if (XML_Parse(parser.get(), document.data() + offset, static_cast<int>(n), last ? XML_TRUE : XML_FALSE) ==
                XML_STATUS_ERROR) {
                throw ParseError(std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(parser.get())),
                                 XML_GetCurrentLineNumber(parser.get()),
                                 XML_GetCurrentColumnNumber(parser.get()) + 1);
            }
            offset += n;
        } while (offset < document.size());
        if (!root_) throw ParseError("document has no root element", 1, 1);
        return std::move(root_);
    }

private:
    static void on_start(void* self_ptr, const XML_Char* name, const XML_Char** attrs)
    {
        auto* self = static_cast<DomBuilder*>(self_ptr);
        auto element = std::make_unique<Element>();
        split_name(name, element->ns, element->local, element->prefix);
        element->line = XML_GetCurrentLineNumber(self->parser_);
        element->column = XML_GetCurrentColumnNumber(self->parser_) + 1;
        for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
            Attribute a;
            split_name(attrs[i], a.ns, a.local, a.prefix);
            a.value = attrs[i + 1];
            element->attributes.push_back(std::move(a));
        }
        Element* raw = element.get();
        if (self->stack_.empty()) {
            self->root_ = std::move(element);
        } else {
            self->stack_.back()->children.push_back(Child{{}, std::move(element)});
        }
        self->stack_.push_back(raw);
    }

    static void on_end(void* self_ptr, const XML_Char*)
    {
        static_cast<DomBuilder*>(self_ptr)->stack_.pop_back();
    }

    static void on_text(void* self_ptr, const XML_Char* s, int len)
    {
        auto* self = static_cast<DomBuilder*>(self_ptr);
        if (self->stack_.empty()) return;
        auto& children = self->stack_.back()->children;
        if (!children.empty() && !children.back().element) {
            children.back().text.append(s, static_cast<std::size_t>(len));
        } else {
            children.push_back(Child{std::string(s, static_cast<std::size_t>(len)), nullptr});
        }
    }

    static void on_namespace(void* self_ptr, const XML_Char* prefix, const XML_Char* uri)
    {
        auto* self = static_cast<DomBuilder*>(self_ptr);
        if (prefix != nullptr && uri != nullptr) self->namespaces_.emplace(prefix, uri);
    }

    PrefixMap& namespaces_;
    XML_Parser parser_ = nullptr;
    std::unique_ptr<Element> root_;
    std::vector<Element*> stack_;
};

std::string xml_escape(std::string_view s, bool attribute)
{
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"':
            if (attribute) {
                out += "&quot;";
                break;
            }
            [[fallthrough]];
        default: out += c;
        }
    }
    return out;
}

std::string qualified(const std::string& prefix, const std::string& local)
{
    return prefix.empty() ? local : prefix + ":" + local;
}

void serialize_xml(const Element& e, std::string& out)
{
    out += "<" + qualified(e.prefix, e.local);
    if (!e.ns.empty()) {
        out += e.prefix.empty() ? " xmlns=\"" : " xmlns:" + e.prefix + "=\"";
        out += xml_escape(e.ns, true) + "\"";
    }
    for (const auto& a : e.attributes) {
        out += " " + qualified(a.prefix, a.local) + "=\"" + xml_escape(a.value, true) + "\"";
    }
    out += ">";
    for (const auto& c : e.children) {
        if (c.element) {
            serialize_xml(*c.element, out);
        } else {
            out += xml_escape(c.text, false);
        }
    }
    out += "</" + qualified(e.prefix, e.local) + ">";
}

bool is_whitespace(std::string_view s)
{
    return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

class RdfXmlWalker {
public:
    RdfXmlWalker(TripleSet& out, std::string base) : out_(out), document_base_(std::move(base)) {}

    void walk_document(const Element& root)
    {
        if (root.is(vocab::owl, "Ontology") &&
            (root.attribute("", "ontologyIRI") != nullptr || has_owlxml_children(root))) {
            throw UnsupportedConstruct("OWL/XML serialization (only RDF/XML is accepted)");
        }
        Scope scope{document_base_, {}};
        scope = enter(root, scope);
        if (root.is(vocab::rdf, "RDF")) {
            for (const auto& c : root.children) {
                if (c.element) {
                    node_element(*c.element, scope);
                } else if (!is_whitespace(c.text)) {
                    throw ParseError("unexpected text inside rdf:RDF", root.line, root.column);
                }
            }
        } else {
            node_element(root, scope);
        }
    }

private:
    struct Scope {
        std::string base;
        std::string language;
    };

    static bool has_owlxml_children(const Element& root)
    {
        for (const auto& c : root.children) {
            if (c.element && c.element->ns == vocab::owl &&
                (c.element->local == "Prefix" || c.element->local == "Declaration")) {
                return true;
            }
        }
        return false;
    }

    static Scope enter(const Element& e, const Scope& outer)
    {
        Scope s = outer;
        if (const auto* b = e.attribute(vocab::xml, "base")) s.base = resolve_iri(outer.base, b->value);
        if (const auto* l = e.attribute(vocab::xml, "lang")) s.language = l->value;
        return s;
    }

    static bool is_syntax_attribute(const Attribute& a)
    {
        if (a.ns == vocab::xml) return true;
        if (a.ns.empty()) return true;  // unqualified attributes carry no RDF meaning
        if (a.ns != vocab::rdf) return false;
        return a.local == "about" || a.local == "ID" || a.local == "nodeID" || a.local == "resource" ||
               a.local == "parseType" || a.local == "datatype" || a.local == "aboutEach" ||
               a.local == "aboutEachPrefix" || a.local == "bagID";
    }

    Term fresh_blank() { return Term::blank("genid" + std::to_string(next_blank_++)); }

    static Term user_blank(const std::string& id) { return Term::blank("nid-" + id); }

    void emit(Term s, std::string p, Term o)
    {
        Triple t{std::move(s), std::move(p), std::move(o)};
        if (seen_.insert(t).second) out_.triples.push_back(std::move(t));
    }

    Term node_element(const Element& e, const Scope& outer)
    {
        const Scope scope = enter(e, outer);
        Term subject;
        if (const auto* about = e.attribute(vocab::rdf, "about")) {
            subject = Term::iri(resolve_iri(scope.base, about->value));
        } else if (const auto* id = e.attribute(vocab::rdf, "ID")) {
            subject = Term::iri(resolve_iri(scope.base, "#" + id->value));
        } else if (const auto* node_id = e.attribute(vocab::rdf, "nodeID")) {
            subject = user_blank(node_id->value);
        } else {
            subject = fresh_blank();
        }
        if (e.ns.empty()) throw ParseError("node element '" + e.local + "' has no namespace", e.line, e.column);
        if (!e.is(vocab::rdf, "Description")) emit(subject, vocab::kType, Term::iri(e.iri()));

        for (const auto& a : e.attributes) {
            if (is_syntax_attribute(a)) continue;
            if (a.ns == vocab::rdf && a.local == "type") {
                emit(subject, vocab::kType, Term::iri(resolve_iri(scope.base, a.value)));
            } else {
                emit(subject, a.ns + a.local, Term::literal(a.value, {}, scope.language));
            }
        }

        std::size_t li = 1;
        for (const auto& c : e.children) {
            if (!c.element) {
                if (!is_whitespace(c.text)) {
                    throw ParseError("unexpected text content in node element", e.line, e.column);
                }
                continue;
            }
            property_element(*c.element, subject, scope, li);
        }
        return subject;
    }

    void property_element(const Element& e, const Term& subject, const Scope& outer, std::size_t& li)
    {
        const Scope scope = enter(e, outer);
        if (e.ns.empty()) throw ParseError("property element '" + e.local + "' has no namespace", e.line, e.column);
        std::string predicate = e.iri();
        if (e.is(vocab::rdf, "li")) predicate = vocab::rdf_term("_" + std::to_string(li++));

        Term object;
        bool object_set = false;
        if (const auto* parse_type = e.attribute(vocab::rdf, "parseType")) {
            if (parse_type->value == "Resource") {
                object = fresh_blank();
                emit(subject, predicate, object);
                std::size_t inner_li = 1;
                for (const auto& c : e.children) {
                    if (c.element) property_element(*c.element, object, scope, inner_li);
                }
            } else if (parse_type->value == "Literal") {
                std::string xml;
                for (const auto& c : e.children) {
                    if (c.element) {
                        serialize_xml(*c.element, xml);
                    } else {
                        xml += xml_escape(c.text, false);
                    }
                }
                object = Term::literal(std::move(xml), vocab::kXmlLiteral);
                emit(subject, predicate, object);
            } else if (parse_type->value == "Collection") {
                std::vector<Term> items;
                for (const auto& c : e.children) {
                    if (c.element) items.push_back(node_element(*c.element, scope));
                }
                object = emit_list(items);
                emit(subject, predicate, object);
            } else {
                throw UnsupportedConstruct("rdf:parseType=\"" + parse_type->value + "\"");
            }
            object_set = true;
        } else if (e.has_element_children()) {
            const Element* node = nullptr;
            for (const auto& c : e.children) {
                if (c.element) {
                    if (node != nullptr) {
                        throw ParseError("property element holds more than one node element", e.line, e.column);
                    }
                    node = c.element.get();
                } else if (!is_whitespace(c.text)) {
                    throw ParseError("mixed content in property element", e.line, e.column);
                }
            }
            object = node_element(*node, scope);
            emit(subject, predicate, object);
            object_set = true;
        } else {
            bool has_property_attrs = false;
            for (const auto& a : e.attributes) {
                if (!is_syntax_attribute(a) && !(a.ns == vocab::rdf && a.local == "ID")) has_property_attrs = true;
            }
            const auto* resource = e.attribute(vocab::rdf, "resource");
            const auto* node_id = e.attribute(vocab::rdf, "nodeID");
            if (resource != nullptr || node_id != nullptr || has_property_attrs) {
                if (resource != nullptr) {
                    object = Term::iri(resolve_iri(scope.base, resource->value));
                } else if (node_id != nullptr) {
                    object = user_blank(node_id->value);
                } else {
                    object = fresh_blank();
                }
                emit(subject, predicate, object);
                for (const auto& a : e.attributes) {
                    if (is_syntax_attribute(a)) continue;
                    if (a.ns == vocab::rdf && a.local == "type") {
                        emit(object, vocab::kType, Term::iri(resolve_iri(scope.base, a.value)));
                    } else {
                        emit(object, a.ns + a.local, Term::literal(a.value, {}, scope.language));
                    }
                }
            } else {
                std::string datatype;
                if (const auto* dt = e.attribute(vocab::rdf, "datatype")) datatype = resolve_iri(scope.base, dt->value);
                object = Term::literal(e.text(), datatype, datatype.empty() ? scope.language : std::string());
                emit(subject, predicate, object);
            }
            object_set = true;
        }

        if (const auto* id = e.attribute(vocab::rdf, "ID"); id != nullptr && object_set) {
            const Term statement = Term::iri(resolve_iri(scope.base, "#" + id->value));
            emit(statement, vocab::kType, Term::iri(vocab::rdf_term("Statement")));
            emit(statement, vocab::rdf_term("subject"), subject);
            emit(statement, vocab::rdf_term("predicate"), Term::iri(predicate));
            emit(statement, vocab::rdf_term("object"), object);
        }
    }

    Term emit_list(const std::vector<Term>& items)
    {
        if (items.empty()) return Term::iri(vocab::kNil);
        std::vector<Term> cells;
        cells.reserve(items.size());
        for (std::size_t i = 0; i < items.size(); ++i) cells.push_back(fresh_blank());
        for (std::size_t i = 0; i < items.size(); ++i) {
            emit(cells[i], vocab::kFirst, items[i]);
            emit(cells[i], vocab::kRest, i + 1 < items.size() ? cells[i + 1] : Term::iri(vocab::kNil));
        }
        return cells.front();
    }

    TripleSet& out_;
    std::string document_base_;
    std::set<Triple> seen_;
    std::size_t next_blank_ = 0;
};

struct IriParts {
    std::string scheme;
    bool has_authority = false;
    std::string authority;
    std::string path;
    bool has_query = false;
    std::string query;
    bool has_fragment = false;
    std::string fragment;
};

IriParts split_iri(std::string_view s)
{
    IriParts p;
    if (auto hash = s.find('#'); hash != std::string_view::npos) {
        p.has_fragment = true;
        p.fragment = std::string(s.substr(hash + 1));
        s = s.substr(0, hash);
    }
    if (auto q = s.find('?'); q != std::string_view::npos) {
        p.has_query = true;
        p.query = std::string(s.substr(q + 1));
        s = s.substr(0, q);
    }
    auto colon = s.find(':');
    auto slash = s.find('/');
    if (colon != std::string_view::npos && colon > 0 && (slash == std::string_view::npos || colon < slash)) {
        p.scheme = std::string(s.substr(0, colon));
        s = s.substr(colon + 1);
    }
    if (s.substr(0, 2) == "//") {
        p.has_authority = true;
        s = s.substr(2);
        auto end = s.find('/');
        p.authority = std::string(s.substr(0, end));
        s = end == std::string_view::npos ? std::string_view{} : s.substr(end);
    }
    p.path = std::string(s);
    return p;
}

std::string remove_dot_segments(std::string_view in)
{
    std::string input(in);
    std::string output;
    while (!input.empty()) {
        if (input.rfind("../", 0) == 0) {
            input.erase(0, 3);
        } else if (input.rfind("./", 0) == 0) {
            input.erase(0, 2);
        } else if (input.rfind("/./", 0) == 0) {
            input.replace(0, 3, "/");
        } else if (input == "/.") {
            input = "/";
        } else if (input.rfind("/../", 0) == 0 || input == "/..") {
            input = input == "/.." ? "/" : input.substr(3);
            auto last = output.rfind('/');
            output.erase(last == std::string::npos ? 0 : last);
        } else if (input == "." || input == "..") {
            input.clear();
        } else {
            auto start = input[0] == '/' ? 1u : 0u;
            auto next = input.find('/', start);
            output += input.substr(0, next);
            input.erase(0, next == std::string::npos ? input.size() : next);
        }
    }
    return output;
}

std::string compose(const IriParts& p)
{
    std::string out;
    if (!p.scheme.empty()) out += p.scheme + ":";
    if (p.has_authority) out += "//" + p.authority;
    out += p.path;
    if (p.has_query) out += "?" + p.query;
    if (p.has_fragment) out += "#" + p.fragment;
    return out;
}

} // namespace

std::string resolve_iri(std::string_view base, std::string_view reference)
{
    const IriParts r = split_iri(reference);
    if (!r.scheme.empty()) {
        IriParts t = r;
        t.path = remove_dot_segments(r.path);
        return compose(t);
    }
    const IriParts b = split_iri(base);
    IriParts t;
    t.scheme = b.scheme;
    t.has_fragment = r.has_fragment;
    t.fragment = r.fragment;
    if (r.has_authority) {
        t.has_authority = true;
        t.authority = r.authority;
        t.path = remove_dot_segments(r.path);
        t.has_query = r.has_query;
        t.query = r.query;
        return compose(t);
    }
    t.has_authority = b.has_authority;
    t.authority = b.authority;
    if (r.path.empty()) {
        t.path = b.path;
        t.has_query = r.has_query || b.has_query;
        t.query = r.has_query ? r.query : b.query;
        return compose(t);
    }
    t.has_query = r.has_query;
    t.query = r.query;
    if (r.path[0] == '/') {
        t.path = remove_dot_segments(r.path);
    } else {
        std::string merged;
        if (b.has_authority && b.path.empty()) {
            merged = "/" + r.path;
        } else {
            auto last = b.path.rfind('/');
            merged = (last == std::string::npos ? std::string() : b.path.substr(0, last + 1)) + r.path;
        }
        t.path = remove_dot_segments(merged);
    }
    return compose(t);
}

TripleSet parse_rdfxml(std::string_view document, const RdfXmlOptions& options)
{
    if (document.size() > options.max_bytes) {
        throw Error("document of " + std::to_string(document.size()) + " bytes exceeds the configured limit of " +
                    std::to_string(options.max_bytes));
    }
    std::string_view body = document;
    if (body.substr(0, 3) == "\xEF\xBB\xBF") body.remove_prefix(3);
    const auto first = body.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) throw ParseError("empty document", 1, 1);
    if (body[first] != '<') {
        throw UnsupportedConstruct(
            "non-XML serialization (Turtle, Manchester or functional syntax); only RDF/XML is accepted");
    }

    TripleSet out;
    DomBuilder builder(out.namespaces);
    const auto root = builder.parse(document);
    RdfXmlWalker walker(out, options.base_iri);
    walker.walk_document(*root);
    return out;
}

TripleSet parse_rdfxml(std::istream& in, const RdfXmlOptions& options)
{
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_rdfxml(buffer.str(), options);
}

TripleSet parse_rdfxml_file(const std::string& path, const RdfXmlOptions& options)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    RdfXmlOptions opts = options;
    if (opts.base_iri == RdfXmlOptions{}.base_iri) opts.base_iri = "file://" + std::filesystem::absolute(path).generic_string();
    return parse_rdfxml(in, opts);
}

} // namespace ontoeval
