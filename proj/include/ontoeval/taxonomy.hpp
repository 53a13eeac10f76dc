#pragma once

#include "ontoeval/ontology.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ontoeval {

/// Casefold (ASCII, Latin-1 and Latin Extended-A) plus whitespace collapse.
/// No stemming.
std::string normalize_label(std::string_view label);

/// Directed IS-A graph over the named classes of a model plus the owl:Thing
/// root. Immutable after construction.
class TaxonomyGraph {
public:
    using NodeId = std::size_t;
    static constexpr NodeId kRoot = 0;

    explicit TaxonomyGraph(const OntologyModel& model);

    const std::string& root() const { return iris_[kRoot]; }
    /// Named classes, excluding the root.
    std::size_t size() const { return iris_.size() - 1; }
    std::size_t node_count() const { return iris_.size(); }

    bool contains(std::string_view iri) const { return ids_.contains(std::string(iri)); }
    /// Throws LookupError for IRIs outside the graph.
    NodeId id(std::string_view iri) const;
    const std::string& iri(NodeId node) const { return iris_.at(node); }
    const std::string& label(NodeId node) const { return labels_.at(node); }

    const std::vector<NodeId>& parents(NodeId node) const { return parents_.at(node); }
    const std::vector<NodeId>& children(NodeId node) const { return children_.at(node); }

    /// Named class IRIs in lexicographic order (root excluded).
    std::vector<std::string> nodes() const;
    /// All (child, parent) edges, root attachments included, ordered.
    std::vector<std::pair<std::string, std::string>> edges() const;
    std::size_t edge_count() const;

    const std::map<std::string, std::set<std::string>>& label_index() const { return label_index_; }
    std::vector<std::string> find_by_label(std::string_view label) const;

private:
    std::vector<std::string> iris_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, NodeId> ids_;
    std::vector<std::vector<NodeId>> parents_;
    std::vector<std::vector<NodeId>> children_;
    std::map<std::string, std::set<std::string>> label_index_;
};

TaxonomyGraph build_graph(const OntologyModel& model);

using Cycle = std::vector<std::string>;

/// Every elementary cycle among IS-A edges (Johnson's algorithm). Each cycle
/// starts at its lexicographically smallest IRI and follows child -> parent
/// edges; the list is sorted. Enumeration stops after `max_cycles`.
std::vector<Cycle> detect_cycles(const TaxonomyGraph& graph, std::size_t max_cycles = 100000);

struct HierRelation {
    enum class Kind { Identical, ParentChild, Ancestor, DescendantInverse, Unrelated };

    Kind kind = Kind::Unrelated;
    /// Shortest IS-A chain length; 0 for identical and unrelated pairs.
    std::size_t distance = 0;

    friend bool operator==(const HierRelation&, const HierRelation&) = default;
};

std::string to_string(HierRelation::Kind kind);

/// How `a` relates to `b` when read as "a <-IS-A- b": parent-child when b's
/// direct parent is a, ancestor when a is reached from b in two or more
/// steps, descendant-inverse when the path runs the other way.
HierRelation relation_between(const TaxonomyGraph& graph, std::string_view a, std::string_view b);

struct AuditReport {
    std::vector<Cycle> cycles;
    std::vector<std::string> orphans;
    std::vector<std::pair<std::string, std::vector<std::string>>> duplicate_labels;
    std::vector<std::string> dangling_refs;
    bool passed = true;
};

/// Taxonomy-level coherence checks: IS-A cycles, classes unreachable from the
/// root, duplicate rdfs:labels and references to undeclared entities.
/// Findings are ordered lexicographically.
AuditReport structural_audit(const OntologyModel& model);

} // namespace ontoeval
