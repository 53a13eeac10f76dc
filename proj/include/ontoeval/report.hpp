#pragma once

#include "ontoeval/agreement.hpp"
#include "ontoeval/merge.hpp"
#include "ontoeval/metrics.hpp"
#include "ontoeval/ontology.hpp"
#include "ontoeval/taxonomy.hpp"

#include <nlohmann/json.hpp>

namespace ontoeval {

/// Version of every JSON report layout below.
inline constexpr int kReportVersion = 1;

nlohmann::json to_json(const AxiomTally& t);
nlohmann::json model_summary(const OntologyModel& m);
nlohmann::json to_json(const AuditReport& r);
nlohmann::json to_json(const MergeSummary& s);

/// Each ratio as {"value": "0.98816", "exact": "604/611"}; undefined ratios are null.
nlohmann::json to_json(const SchemaMetrics& m);
nlohmann::json to_json(const std::vector<MetricDelta>& deltas);

nlohmann::json to_json(const KappaResult& k);
nlohmann::json to_json(const Matrix2x2& m);
nlohmann::json to_json(const FisherResult& f);

std::string rational_string(const Ratio& r);

} // namespace ontoeval
