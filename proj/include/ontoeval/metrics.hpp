#pragma once

#include "ontoeval/ontology.hpp"

#include <boost/rational.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ontoeval {

using Ratio = boost::rational<std::int64_t>;

/// Identifier of the attribute / relation counting rule, echoed in reports.
inline constexpr const char* kCountingRule = "domain-pairs-v1";

struct RawCounts {
    std::int64_t classes = 0;
    std::int64_t subclass_axioms = 0;    // named superclass other than owl:Thing
    std::int64_t non_isa_relations = 0;  // (class, object property) domain pairs
    std::int64_t attributes = 0;         // (class, data property) domain pairs
    std::int64_t instance_classes = 0;   // classes with at least one asserted individual
    std::int64_t axioms = 0;             // AxiomTally::total()

    friend bool operator==(const RawCounts&, const RawCounts&) = default;
};

struct SchemaMetrics {
    Ratio attribute_richness;
    Ratio inheritance_richness;
    Ratio relationship_richness;
    Ratio class_richness;
    Ratio axiom_class_ratio;
    /// Unset when there are no relations at all.
    std::optional<Ratio> class_relation_ratio;
    RawCounts raw;
    std::string counting_rule = kCountingRule;

    friend bool operator==(const SchemaMetrics&, const SchemaMetrics&) = default;
};

RawCounts raw_counts(const OntologyModel& model);

/// Throws MetricsError when classes == 0.
SchemaMetrics metrics_from_counts(const RawCounts& raw);

SchemaMetrics schema_metrics(const OntologyModel& model);

/// Decimal rendering rounded half away from zero, e.g. "0.98816".
std::string format_ratio(const Ratio& r, int places = 5);

double to_double(const Ratio& r);

/// Metric names as used in reports and reference files.
std::vector<std::string> metric_names();

/// Value of a named metric; nullopt when undefined. Unknown names throw MetricsError.
std::optional<Ratio> metric_value(const SchemaMetrics& m, const std::string& name);

struct MetricDelta {
    std::string name;
    std::optional<Ratio> computed;
    double reference = 0.0;
    std::optional<double> delta;  // computed - reference
};

/// Side-by-side comparison in metric_names() order for every metric the
/// reference provides.
std::vector<MetricDelta> compare_metrics(const SchemaMetrics& m, const std::map<std::string, double>& reference);

/// Reference values from a JSON object {metric name: number}.
std::map<std::string, double> load_metric_reference(const std::string& path);

} // namespace ontoeval
