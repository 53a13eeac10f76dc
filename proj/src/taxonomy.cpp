#include "ontoeval/taxonomy.hpp"

#include "ontoeval/error.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace ontoeval {

namespace {

void append_utf8(std::string& out, char32_t cp)
{
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

/// Decodes one code point; returns 0 length for malformed input.
std::size_t decode_utf8(std::string_view s, std::size_t i, char32_t& cp)
{
    const auto b0 = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) {
        return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    auto bits = [&](std::size_t k) { return static_cast<char32_t>(static_cast<unsigned char>(s[i + k]) & 0x3F); };
    if (b0 < 0x80) {
        cp = b0;
        return 1;
    }
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        cp = (static_cast<char32_t>(b0 & 0x1F) << 6) | bits(1);
        return 2;
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        cp = (static_cast<char32_t>(b0 & 0x0F) << 12) | (bits(1) << 6) | bits(2);
        return 3;
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        cp = (static_cast<char32_t>(b0 & 0x07) << 18) | (bits(1) << 12) | (bits(2) << 6) | bits(3);
        return 4;
    }
    return 0;
}

char32_t fold(char32_t c)
{
    if (c >= 'A' && c <= 'Z') return c + 0x20;
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
    if ((c >= 0x100 && c <= 0x12F) || (c >= 0x132 && c <= 0x137) || (c >= 0x14A && c <= 0x177)) {
        return (c % 2 == 0) ? c + 1 : c;
    }
    if ((c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E)) return (c % 2 == 1) ? c + 1 : c;
    if (c == 0x178) return 0xFF;
    if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 0x20;
    if (c >= 0x410 && c <= 0x42F) return c + 0x20;
    if (c >= 0x400 && c <= 0x40F) return c + 0x50;
    return c;
}

bool is_space(char32_t c)
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == 0xA0;
}

std::vector<std::size_t> bfs_distances_up(const TaxonomyGraph& g, TaxonomyGraph::NodeId from)
{
    constexpr auto kUnseen = static_cast<std::size_t>(-1);
    std::vector<std::size_t> dist(g.node_count(), kUnseen);
    std::deque<TaxonomyGraph::NodeId> queue{from};
    dist[from] = 0;
    while (!queue.empty()) {
        auto n = queue.front();
        queue.pop_front();
        for (auto p : g.parents(n)) {
            if (dist[p] == kUnseen) {
                dist[p] = dist[n] + 1;
                queue.push_back(p);
            }
        }
    }
    return dist;
}

class JohnsonCycles {
public:
    JohnsonCycles(const TaxonomyGraph& g, std::size_t limit) : g_(g), limit_(limit) {}

    std::vector<Cycle> run()
    {
        const std::size_t n = g_.node_count();
        // Root has no outgoing edges so it never lies on a cycle; ids follow IRI order.
        for (std::size_t s = 1; s < n && cycles_.size() < limit_; ++s) {
            const auto component = scc_containing(s);
            if (component.empty()) continue;
            in_component_.assign(n, false);
            for (auto v : component) in_component_[v] = true;
            blocked_.assign(n, false);
            blocked_by_.assign(n, {});
            start_ = s;
            stack_.clear();
            circuit(s);
        }
        std::sort(cycles_.begin(), cycles_.end());
        return std::move(cycles_);
    }

private:
    /// Strongly connected component of s in the subgraph of nodes >= s, or
    /// empty when s lies on no cycle there.
    std::vector<std::size_t> scc_containing(std::size_t s)
    {
        const std::size_t n = g_.node_count();
        std::vector<std::size_t> index(n, 0), low(n, 0);
        std::vector<bool> on_stack(n, false), visited(n, false);
        std::vector<std::size_t> stack;
        std::vector<std::size_t> result;
        std::size_t counter = 0;
        bool self_loop = false;
        for (auto p : g_.parents(s)) self_loop = self_loop || p == s;

        // Iterative Tarjan restricted to nodes >= s, started at s only.
        struct Frame {
            std::size_t node;
            std::size_t next;
        };
        std::vector<Frame> frames{{s, 0}};
        visited[s] = true;
        index[s] = low[s] = counter++;
        stack.push_back(s);
        on_stack[s] = true;
        while (!frames.empty()) {
            auto& f = frames.back();
            const auto& parents = g_.parents(f.node);
            if (f.next < parents.size()) {
                const auto w = parents[f.next++];
                if (w < s) continue;
                if (!visited[w]) {
                    visited[w] = true;
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.node] = std::min(low[f.node], index[w]);
                }
                continue;
            }
            const auto v = f.node;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().node] = std::min(low[frames.back().node], low[v]);
            if (low[v] == index[v]) {
                std::vector<std::size_t> component;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    component.push_back(w);
                } while (w != v);
                if (v == s) result = std::move(component);
            }
        }
        if (result.size() == 1 && !self_loop) result.clear();
        return result;
    }

    void unblock(std::size_t u)
    {
        std::vector<std::size_t> work{u};
        while (!work.empty()) {
            auto x = work.back();
            work.pop_back();
            if (!blocked_[x]) continue;
            blocked_[x] = false;
            for (auto w : blocked_by_[x]) work.push_back(w);
            blocked_by_[x].clear();
        }
    }

    bool circuit(std::size_t v)
    {
        if (cycles_.size() >= limit_) return false;
        bool found = false;
        stack_.push_back(v);
        blocked_[v] = true;
        for (auto w : g_.parents(v)) {
            if (w < start_ || !in_component_[w]) continue;
            if (w == start_) {
                Cycle c;
                for (auto x : stack_) c.push_back(g_.iri(x));
                cycles_.push_back(std::move(c));
                found = true;
                if (cycles_.size() >= limit_) break;
            } else if (!blocked_[w]) {
                if (circuit(w)) found = true;
            }
        }
        if (found) {
            unblock(v);
        } else {
            for (auto w : g_.parents(v)) {
                if (w < start_ || !in_component_[w]) continue;
                auto& list = blocked_by_[w];
                if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
            }
        }
        stack_.pop_back();
        return found;
    }

    const TaxonomyGraph& g_;
    std::size_t limit_;
    std::size_t start_ = 0;
    std::vector<bool> in_component_;
    std::vector<bool> blocked_;
    std::vector<std::vector<std::size_t>> blocked_by_;
    std::vector<std::size_t> stack_;
    std::vector<Cycle> cycles_;
};

bool is_builtin_datatype_or_top(const std::string& iri)
{
    return iri == vocab::kOwlThing || iri == vocab::owl_term("Nothing") || iri.rfind(vocab::xsd, 0) == 0 ||
           iri.rfind(vocab::rdf, 0) == 0 || iri.rfind(vocab::rdfs, 0) == 0 ||
           iri == vocab::owl_term("real") || iri == vocab::owl_term("rational") ||
           iri == vocab::owl_term("topObjectProperty") || iri == vocab::owl_term("topDataProperty") ||
           iri == vocab::owl_term("bottomObjectProperty") || iri == vocab::owl_term("bottomDataProperty");
}

} // namespace

std::string normalize_label(std::string_view label)
{
    std::string out;
    out.reserve(label.size());
    bool pending_space = false;
    for (std::size_t i = 0; i < label.size();) {
        char32_t cp = 0;
        std::size_t len = decode_utf8(label, i, cp);
        if (len == 0) {
            if (pending_space && !out.empty()) out += ' ';
            pending_space = false;
            out += label[i];
            ++i;
            continue;
        }
        i += len;
        if (is_space(cp)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out += ' ';
        pending_space = false;
        if (cp == 0xDF) {
            out += "ss";
        } else {
            append_utf8(out, fold(cp));
        }
    }
    return out;
}

TaxonomyGraph::TaxonomyGraph(const OntologyModel& model)
{
    iris_.push_back(vocab::kOwlThing);
    labels_.push_back("Thing");
    for (const auto& [iri, decl] : model.classes) {
        iris_.push_back(iri);
        labels_.push_back(display_label(model, iri));
    }
    for (NodeId i = 0; i < iris_.size(); ++i) ids_.emplace(iris_[i], i);
    parents_.assign(iris_.size(), {});
    children_.assign(iris_.size(), {});

    std::vector<bool> has_named_super(iris_.size(), false);
    for (const auto& [sub, super] : model.subclass_axioms) {
        auto s = ids_.find(sub);
        if (s == ids_.end() || s->second == kRoot) continue;
        has_named_super[s->second] = true;
        auto p = ids_.find(super);
        if (p == ids_.end()) continue;  // dangling; reported by the audit
        parents_[s->second].push_back(p->second);
        children_[p->second].push_back(s->second);
    }
    for (NodeId i = 1; i < iris_.size(); ++i) {
        if (!has_named_super[i]) {
            parents_[i].push_back(kRoot);
            children_[kRoot].push_back(i);
        }
    }
    for (auto& v : parents_) std::sort(v.begin(), v.end());
    for (auto& v : children_) std::sort(v.begin(), v.end());
    for (NodeId i = 1; i < iris_.size(); ++i) label_index_[normalize_label(labels_[i])].insert(iris_[i]);
}

TaxonomyGraph::NodeId TaxonomyGraph::id(std::string_view iri) const
{
    auto it = ids_.find(std::string(iri));
    if (it == ids_.end()) throw LookupError("unknown class IRI: " + std::string(iri));
    return it->second;
}

std::vector<std::string> TaxonomyGraph::nodes() const { return {iris_.begin() + 1, iris_.end()}; }

std::vector<std::pair<std::string, std::string>> TaxonomyGraph::edges() const
{
    std::vector<std::pair<std::string, std::string>> out;
    for (NodeId c = 0; c < iris_.size(); ++c) {
        for (auto p : parents_[c]) out.emplace_back(iris_[c], iris_[p]);
    }
    return out;
}

std::size_t TaxonomyGraph::edge_count() const
{
    std::size_t n = 0;
    for (const auto& p : parents_) n += p.size();
    return n;
}

std::vector<std::string> TaxonomyGraph::find_by_label(std::string_view label) const
{
    auto it = label_index_.find(normalize_label(label));
    if (it == label_index_.end()) return {};
    return {it->second.begin(), it->second.end()};
}

TaxonomyGraph build_graph(const OntologyModel& model) { return TaxonomyGraph(model); }

std::vector<Cycle> detect_cycles(const TaxonomyGraph& graph, std::size_t max_cycles)
{
    return JohnsonCycles(graph, max_cycles).run();
}

std::string to_string(HierRelation::Kind kind)
{
    switch (kind) {
    case HierRelation::Kind::Identical: return "identical";
    case HierRelation::Kind::ParentChild: return "parent-child";
    case HierRelation::Kind::Ancestor: return "ancestor";
    case HierRelation::Kind::DescendantInverse: return "descendant-inverse";
    case HierRelation::Kind::Unrelated: return "unrelated";
    }
    return "unrelated";
}

HierRelation relation_between(const TaxonomyGraph& graph, std::string_view a, std::string_view b)
{
    const auto ia = graph.id(a);
    const auto ib = graph.id(b);
    if (ia == ib) return {HierRelation::Kind::Identical, 0};
    constexpr auto kUnseen = static_cast<std::size_t>(-1);
    if (auto d = bfs_distances_up(graph, ib)[ia]; d != kUnseen) {
        return {d == 1 ? HierRelation::Kind::ParentChild : HierRelation::Kind::Ancestor, d};
    }
    if (auto d = bfs_distances_up(graph, ia)[ib]; d != kUnseen) return {HierRelation::Kind::DescendantInverse, d};
    return {HierRelation::Kind::Unrelated, 0};
}

AuditReport structural_audit(const OntologyModel& model)
{
    const TaxonomyGraph graph(model);
    AuditReport report;
    report.cycles = detect_cycles(graph);

    std::vector<bool> reached(graph.node_count(), false);
    std::deque<TaxonomyGraph::NodeId> queue{TaxonomyGraph::kRoot};
    reached[TaxonomyGraph::kRoot] = true;
    while (!queue.empty()) {
        auto n = queue.front();
        queue.pop_front();
        for (auto c : graph.children(n)) {
            if (!reached[c]) {
                reached[c] = true;
                queue.push_back(c);
            }
        }
    }
    for (TaxonomyGraph::NodeId i = 1; i < graph.node_count(); ++i) {
        if (!reached[i]) report.orphans.push_back(graph.iri(i));
    }

    std::map<std::string, std::vector<std::string>> by_label;
    for (const auto& [iri, decl] : model.classes) {
        if (decl.label) by_label[normalize_label(*decl.label)].push_back(iri);
    }
    for (auto& [label, iris] : by_label) {
        if (iris.size() > 1) report.duplicate_labels.emplace_back(label, iris);
    }

    std::set<std::string> class_refs;
    std::set<std::string> property_refs;
    for (const auto& [sub, super] : model.subclass_axioms) {
        class_refs.insert(sub);
        class_refs.insert(super);
    }
    std::function<void(const ClassExpr&)> visit = [&](const ClassExpr& e) {
        if (e.is_named()) {
            class_refs.insert(e.iri);
            return;
        }
        if (e.kind != ClassExpr::Kind::IntersectionOf && e.kind != ClassExpr::Kind::UnionOf &&
            e.kind != ClassExpr::Kind::ComplementOf && e.kind != ClassExpr::Kind::OneOf &&
            e.kind != ClassExpr::Kind::Opaque && !e.iri.empty()) {
            property_refs.insert(e.iri);
        }
        const bool data_restriction = model.data_properties.contains(e.iri);
        for (const auto& op : e.operands) {
            if (data_restriction && op.is_named()) continue;  // datatype filler
            visit(op);
        }
    };
    for (const auto& axiom : model.class_axioms) {
        if (!axiom.subject.empty()) class_refs.insert(axiom.subject);
        for (const auto& op : axiom.operands) visit(op);
    }
    for (const auto& [iri, p] : model.object_properties) {
        for (const auto& d : p.domains) visit(d);
        for (const auto& r : p.ranges) visit(r);
        property_refs.insert(p.super_properties.begin(), p.super_properties.end());
        property_refs.insert(p.inverse_of.begin(), p.inverse_of.end());
    }
    for (const auto& [iri, p] : model.data_properties) {
        for (const auto& d : p.domains) visit(d);
        property_refs.insert(p.super_properties.begin(), p.super_properties.end());
    }
    for (const auto& [iri, types] : model.individuals) class_refs.insert(types.begin(), types.end());
    for (const auto& a : model.property_assertions) property_refs.insert(a.property);

    std::set<std::string> dangling;
    for (const auto& iri : class_refs) {
        if (!model.classes.contains(iri) && !model.datatypes.contains(iri) && !is_builtin_datatype_or_top(iri)) {
            dangling.insert(iri);
        }
    }
    for (const auto& iri : property_refs) {
        if (!model.object_properties.contains(iri) && !model.data_properties.contains(iri) &&
            !model.annotation_properties.contains(iri) && !is_builtin_datatype_or_top(iri)) {
            dangling.insert(iri);
        }
    }
    report.dangling_refs.assign(dangling.begin(), dangling.end());
    report.passed = report.cycles.empty() && report.orphans.empty() && report.duplicate_labels.empty() &&
                    report.dangling_refs.empty();
    return report;
}

} // namespace ontoeval
