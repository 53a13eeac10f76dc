#pragma once

#include "ontoeval/ontology.hpp"

#include <string>

namespace ontoeval {

/// Serializes a model as RDF/XML such that parse_rdfxml + build_model (with
/// the prefix map the model was built from) yields an equal model. Axioms
/// whose class expressions were unrecognised (ClassExpr::Kind::Opaque) are
/// not re-emitted; `skipped` receives their count when non-null.
std::string write_rdfxml(const OntologyModel& model, std::size_t* skipped = nullptr);

void write_rdfxml_file(const OntologyModel& model, const std::string& path, std::size_t* skipped = nullptr);

} // namespace ontoeval
