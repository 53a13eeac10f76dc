#pragma once

#include "ontoeval/ontology.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ontoeval {

enum class CollisionRule { UnionByIri, RenameWithPrefix };

std::string to_string(CollisionRule rule);

struct SourcePolicy {
    std::string curie_prefix;
    /// Namespace the prefix expands to. Left empty, it is taken from the
    /// source model's own prefix declarations.
    std::string namespace_iri;
    /// Source root class -> parent class in the merged hierarchy.
    std::map<std::string, std::string> root_alignment;
};

/// Sources are matched to input models by position; missing entries keep
/// their top-level classes under the shared owl:Thing root.
struct MergePolicy {
    CollisionRule collision_rule = CollisionRule::UnionByIri;
    std::vector<SourcePolicy> sources;
    std::string ontology_iri;  // defaults to the first input's
};

/// Reads {"collision_rule": "union-by-iri" | "rename-with-prefix",
/// "ontology_iri": ..., "sources": [{"curie_prefix", "namespace",
/// "root_alignment": {root: parent}}]}. Root and parent may be CURIEs.
MergePolicy parse_merge_policy(const std::string& json_text);
MergePolicy load_merge_policy(const std::string& path);

struct MergeSummary {
    std::vector<std::size_t> input_classes;
    std::size_t merged_classes = 0;
    std::size_t shared_iris = 0;
    std::map<std::string, std::string> renamed;   // original IRI -> new IRI
    std::vector<std::pair<std::string, std::string>> alignments;
};

/// Combines the models in order. Inputs are not modified.
/// Throws PolicyError for incomplete or contradictory policies and
/// MergeCycleError when the combination introduces an IS-A cycle.
OntologyModel merge(const std::vector<OntologyModel>& models, const MergePolicy& policy,
                    MergeSummary* summary = nullptr);

/// Gives every class a CURIE from the longest matching namespace in
/// `prefixes` (the model's own prefixes are consulted too). With
/// `default_prefix_base`, unmatched IRIs get a generated prefix for their
/// namespace; otherwise they raise AnnotationError. Existing CURIEs that
/// expand correctly are kept, so the operation is idempotent.
OntologyModel annotate_curies(const OntologyModel& model, const PrefixMap& prefixes,
                              const std::optional<std::string>& default_prefix_base = std::nullopt);

} // namespace ontoeval
