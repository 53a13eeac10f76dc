#include "ontoeval/merge.hpp"

#include "ontoeval/error.hpp"
#include "ontoeval/taxonomy.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ontoeval {

namespace {

using RenameMap = std::map<std::string, std::string>;

std::string renamed(const RenameMap& map, const std::string& iri)
{
    auto it = map.find(iri);
    return it == map.end() ? iri : it->second;
}

void rename_expr(ClassExpr& e, const RenameMap& map)
{
    if (!e.iri.empty()) e.iri = renamed(map, e.iri);
    for (auto& op : e.operands) rename_expr(op, map);
    if (e.value && e.value->is_iri()) e.value->value = renamed(map, e.value->value);
    for (auto& m : e.members) {
        if (m.is_iri()) m.value = renamed(map, m.value);
    }
}

template <typename T>
std::map<std::string, T> rekey(std::map<std::string, T>&& in, const RenameMap& map)
{
    std::map<std::string, T> out;
    for (auto& [k, v] : in) out.emplace(renamed(map, k), std::move(v));
    return out;
}

std::set<std::string> rename_set(const std::set<std::string>& in, const RenameMap& map)
{
    std::set<std::string> out;
    for (const auto& s : in) out.insert(renamed(map, s));
    return out;
}

void apply_renames(OntologyModel& m, const RenameMap& map)
{
    if (map.empty()) return;
    m.classes = rekey(std::move(m.classes), map);
    for (auto& [iri, c] : m.classes) c.iri = iri;
    std::set<std::pair<std::string, std::string>> subs;
    for (const auto& [a, b] : m.subclass_axioms) subs.emplace(renamed(map, a), renamed(map, b));
    m.subclass_axioms = std::move(subs);
    for (auto& ax : m.class_axioms) {
        if (!ax.subject.empty()) ax.subject = renamed(map, ax.subject);
        for (auto& op : ax.operands) rename_expr(op, map);
    }
    for (auto* props : {&m.object_properties, &m.data_properties}) {
        *props = rekey(std::move(*props), map);
        for (auto& [iri, p] : *props) {
            p.iri = iri;
            for (auto& d : p.domains) rename_expr(d, map);
            for (auto& r : p.ranges) rename_expr(r, map);
            p.super_properties = rename_set(p.super_properties, map);
            p.inverse_of = rename_set(p.inverse_of, map);
        }
    }
    m.annotation_properties = rename_set(m.annotation_properties, map);
    for (auto& [iri, types] : m.individuals) types = rename_set(types, map);
    for (auto& a : m.property_assertions) {
        a.property = renamed(map, a.property);
        if (a.object.is_iri()) a.object.value = renamed(map, a.object.value);
    }
    m.annotations = rekey(std::move(m.annotations), map);
    for (auto& [iri, anns] : m.annotations) {
        for (auto& a : anns) {
            a.property = renamed(map, a.property);
            if (a.value.is_iri()) a.value.value = renamed(map, a.value.value);
        }
    }
}

template <typename T>
void sort_unique(std::vector<T>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

void append_unique(std::vector<ClassExpr>& into, const std::vector<ClassExpr>& from)
{
    for (const auto& e : from) {
        if (std::find(into.begin(), into.end(), e) == into.end()) into.push_back(e);
    }
}

void merge_properties(std::map<std::string, PropertyDecl>& into, const std::map<std::string, PropertyDecl>& from)
{
    for (const auto& [iri, p] : from) {
        auto [it, inserted] = into.emplace(iri, p);
        if (inserted) continue;
        auto& q = it->second;
        append_unique(q.domains, p.domains);
        append_unique(q.ranges, p.ranges);
        q.super_properties.insert(p.super_properties.begin(), p.super_properties.end());
        q.inverse_of.insert(p.inverse_of.begin(), p.inverse_of.end());
        q.characteristics.insert(p.characteristics.begin(), p.characteristics.end());
    }
}

void merge_into(OntologyModel& into, const OntologyModel& from)
{
    for (const auto& [iri, c] : from.classes) {
        auto [it, inserted] = into.classes.emplace(iri, c);
        if (!inserted) {
            it->second.deprecated = it->second.deprecated || c.deprecated;
            if (!it->second.curie) it->second.curie = c.curie;
        }
    }
    into.subclass_axioms.insert(from.subclass_axioms.begin(), from.subclass_axioms.end());
    into.class_axioms.insert(into.class_axioms.end(), from.class_axioms.begin(), from.class_axioms.end());
    merge_properties(into.object_properties, from.object_properties);
    merge_properties(into.data_properties, from.data_properties);
    into.annotation_properties.insert(from.annotation_properties.begin(), from.annotation_properties.end());
    into.datatypes.insert(from.datatypes.begin(), from.datatypes.end());
    for (const auto& [iri, types] : from.individuals) into.individuals[iri].insert(types.begin(), types.end());
    into.property_assertions.insert(into.property_assertions.end(), from.property_assertions.begin(),
                                    from.property_assertions.end());
    for (const auto& [iri, anns] : from.annotations) {
        auto& dst = into.annotations[iri];
        dst.insert(dst.end(), anns.begin(), anns.end());
    }
    into.ontology_annotations.insert(into.ontology_annotations.end(), from.ontology_annotations.begin(),
                                     from.ontology_annotations.end());
    into.imports.insert(from.imports.begin(), from.imports.end());
    for (const auto& [prefix, ns] : from.prefixes) into.prefixes.emplace(prefix, ns);
}

std::string resolve_name(const std::string& name, const PrefixMap& prefixes)
{
    if (name.find("://") == std::string::npos && name.rfind("urn:", 0) != 0) {
        if (auto expanded = expand_curie(name, prefixes)) return *expanded;
    }
    return name;
}

std::string render_cycle(const Cycle& c)
{
    std::string out;
    for (const auto& iri : c) out += iri + " -> ";
    return out + c.front();
}

std::optional<std::string> longest_match(const std::string& iri, const PrefixMap& prefixes)
{
    const std::string* best_prefix = nullptr;
    std::size_t best_len = 0;
    for (const auto& [prefix, ns] : prefixes) {
        if (prefix.empty() || ns.empty()) continue;
        if (iri.size() > ns.size() && iri.compare(0, ns.size(), ns) == 0 && ns.size() > best_len) {
            best_prefix = &prefix;
            best_len = ns.size();
        }
    }
    if (best_prefix == nullptr) return std::nullopt;
    return *best_prefix + ":" + iri.substr(best_len);
}

std::string namespace_of(const std::string& iri)
{
    auto pos = iri.find_last_of("#/");
    return pos == std::string::npos ? std::string() : iri.substr(0, pos + 1);
}

} // namespace

std::string to_string(CollisionRule rule)
{
    return rule == CollisionRule::UnionByIri ? "union-by-iri" : "rename-with-prefix";
}

MergePolicy parse_merge_policy(const std::string& json_text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw PolicyError(std::string("merge policy is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw PolicyError("merge policy must be a JSON object");
    MergePolicy policy;
    try {
        const auto rule = j.value("collision_rule", std::string("union-by-iri"));
        if (rule == "union-by-iri" || rule == "union-by-IRI") {
            policy.collision_rule = CollisionRule::UnionByIri;
        } else if (rule == "rename-with-prefix") {
            policy.collision_rule = CollisionRule::RenameWithPrefix;
        } else {
            throw PolicyError("unknown collision_rule '" + rule + "'");
        }
        policy.ontology_iri = j.value("ontology_iri", std::string());
        for (const auto& s : j.value("sources", nlohmann::json::array())) {
            SourcePolicy sp;
            sp.curie_prefix = s.value("curie_prefix", std::string());
            sp.namespace_iri = s.value("namespace", std::string());
            const auto alignment = s.value("root_alignment", nlohmann::json::object());
            for (const auto& [root, parent] : alignment.items()) {
                sp.root_alignment.emplace(root, parent.get<std::string>());
            }
            policy.sources.push_back(std::move(sp));
        }
    } catch (const nlohmann::json::exception& e) {
        throw PolicyError(std::string("malformed merge policy: ") + e.what());
    }
    return policy;
}

MergePolicy load_merge_policy(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw PolicyError("cannot open merge policy " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_merge_policy(ss.str());
}

OntologyModel merge(const std::vector<OntologyModel>& models, const MergePolicy& policy, MergeSummary* summary)
{
    if (models.size() < 2) throw PolicyError("merge needs at least two ontologies");
    if (policy.sources.size() > models.size()) {
        throw PolicyError("policy lists " + std::to_string(policy.sources.size()) + " sources for " +
                          std::to_string(models.size()) + " ontologies");
    }
    std::vector<SourcePolicy> sources = policy.sources;
    sources.resize(models.size());

    std::map<std::string, std::string> prefix_owner;
    for (std::size_t k = 0; k < sources.size(); ++k) {
        auto& s = sources[k];
        if (s.curie_prefix.empty()) continue;
        if (s.namespace_iri.empty()) {
            auto it = models[k].prefixes.find(s.curie_prefix);
            if (it == models[k].prefixes.end()) {
                throw PolicyError("no namespace given or declared for prefix '" + s.curie_prefix + "'");
            }
            s.namespace_iri = it->second;
        }
        auto [it, inserted] = prefix_owner.emplace(s.curie_prefix, s.namespace_iri);
        if (!inserted && (policy.collision_rule == CollisionRule::RenameWithPrefix || it->second != s.namespace_iri)) {
            throw PolicyError("prefix '" + s.curie_prefix + "' is assigned to more than one source");
        }
    }

    MergeSummary local;
    MergeSummary& sum = summary ? *summary : local;
    sum = MergeSummary{};

    std::set<Cycle> input_cycles;
    std::map<std::string, std::size_t> origin;
    OntologyModel merged;
    for (std::size_t k = 0; k < models.size(); ++k) {
        OntologyModel m = models[k];
        sum.input_classes.push_back(m.classes.size());
        RenameMap renames;
        if (k > 0) {
            auto collides = [&](const std::string& iri) {
                return merged.classes.contains(iri) || merged.object_properties.contains(iri) ||
                       merged.data_properties.contains(iri);
            };
            std::vector<std::string> colliding;
            for (const auto& [iri, c] : m.classes) {
                if (collides(iri)) colliding.push_back(iri);
            }
            for (const auto* props : {&m.object_properties, &m.data_properties}) {
                for (const auto& [iri, p] : *props) {
                    if (collides(iri)) colliding.push_back(iri);
                }
            }
            if (policy.collision_rule == CollisionRule::UnionByIri) {
                for (const auto& iri : colliding) {
                    if (merged.classes.contains(iri)) ++sum.shared_iris;
                }
            } else if (!colliding.empty()) {
                if (sources[k].namespace_iri.empty()) {
                    throw PolicyError("rename-with-prefix needs a namespace for source " + std::to_string(k + 1));
                }
                for (const auto& iri : colliding) {
                    const auto target = sources[k].namespace_iri + local_name(iri);
                    if (target == iri || collides(target) || m.classes.contains(target) ||
                        m.object_properties.contains(target) || m.data_properties.contains(target)) {
                        throw PolicyError("renaming " + iri + " under prefix '" + sources[k].curie_prefix +
                                          "' collides with existing " + target);
                    }
                    renames.emplace(iri, target);
                }
                apply_renames(m, renames);
                sum.renamed.insert(renames.begin(), renames.end());
            }
        }
        for (auto& c : detect_cycles(TaxonomyGraph(m))) input_cycles.insert(std::move(c));

        PrefixMap lookup = m.prefixes;
        if (!sources[k].curie_prefix.empty()) lookup[sources[k].curie_prefix] = sources[k].namespace_iri;
        for (const auto& [root_name, parent_name] : sources[k].root_alignment) {
            const auto root = renamed(renames, resolve_name(root_name, lookup));
            if (!m.classes.contains(root)) {
                throw PolicyError("root_alignment names " + root_name + ", which source " + std::to_string(k + 1) +
                                  " does not declare");
            }
            sum.alignments.emplace_back(root, parent_name);
        }
        for (const auto& [iri, c] : m.classes) origin.emplace(iri, k);
        merge_into(merged, m);
    }

    for (const auto& s : sources) {
        if (!s.curie_prefix.empty()) merged.prefixes[s.curie_prefix] = s.namespace_iri;
    }
    for (auto& [root, parent_name] : sum.alignments) {
        const auto parent = resolve_name(parent_name, merged.prefixes);
        if (parent != vocab::kOwlThing && !merged.classes.contains(parent)) {
            throw PolicyError("root_alignment target " + parent_name + " is not a class of the merged ontology");
        }
        parent_name = parent;
        merged.subclass_axioms.erase({root, vocab::kOwlThing});
        if (parent != vocab::kOwlThing) merged.subclass_axioms.emplace(root, parent);
    }

    for (const auto& cycle : detect_cycles(TaxonomyGraph(merged))) {
        if (!input_cycles.contains(cycle)) {
            throw MergeCycleError("merge introduces IS-A cycle: " + render_cycle(cycle));
        }
    }

    merged.ontology_iri = policy.ontology_iri.empty() ? models.front().ontology_iri : policy.ontology_iri;
    for (const auto& m : models) merged.imports.erase(m.ontology_iri);
    merged.imports.erase(merged.ontology_iri);

    for (auto& [iri, c] : merged.classes) {
        const auto& src = sources[origin.at(iri)];
        if (!src.curie_prefix.empty() && iri.size() > src.namespace_iri.size() &&
            iri.compare(0, src.namespace_iri.size(), src.namespace_iri) == 0) {
            c.curie = src.curie_prefix + ":" + iri.substr(src.namespace_iri.size());
            continue;
        }
        if (c.curie) {
            auto expanded = expand_curie(*c.curie, merged.prefixes);
            if (expanded && *expanded == iri) continue;
        }
        c.curie = longest_match(iri, merged.prefixes);
    }

    for (auto& [iri, anns] : merged.annotations) sort_unique(anns);
    sort_unique(merged.class_axioms);
    sort_unique(merged.property_assertions);
    sort_unique(merged.ontology_annotations);
    assign_labels(merged);
    merged.axiom_tally = count_axioms(merged);
    sum.merged_classes = merged.classes.size();
    return merged;
}

OntologyModel annotate_curies(const OntologyModel& model, const PrefixMap& prefixes,
                              const std::optional<std::string>& default_prefix_base)
{
    OntologyModel out = model;
    PrefixMap all = model.prefixes;
    for (const auto& [p, ns] : prefixes) all[p] = ns;

    std::vector<std::string> unmatched;
    for (auto& [iri, c] : out.classes) {
        if (c.curie) {
            auto expanded = expand_curie(*c.curie, all);
            if (expanded && *expanded == iri) continue;
        }
        auto curie = longest_match(iri, all);
        if (!curie && default_prefix_base) {
            const auto ns = namespace_of(iri);
            if (!ns.empty() && ns.size() < iri.size()) {
                std::size_t n = 1;
                while (all.contains(*default_prefix_base + std::to_string(n))) ++n;
                const auto prefix = *default_prefix_base + std::to_string(n);
                all[prefix] = ns;
                curie = prefix + ":" + iri.substr(ns.size());
            }
        }
        if (!curie) {
            unmatched.push_back(iri);
            continue;
        }
        c.curie = std::move(curie);
    }
    if (!unmatched.empty()) {
        std::string list;
        for (const auto& iri : unmatched) list += (list.empty() ? "" : ", ") + iri;
        throw AnnotationError("no prefix matches: " + list);
    }
    for (const auto& [iri, c] : out.classes) {
        if (!c.curie) continue;
        const auto prefix = c.curie->substr(0, c.curie->find(':'));
        out.prefixes[prefix] = all.at(prefix);
    }
    out.axiom_tally = count_axioms(out);
    return out;
}

} // namespace ontoeval
