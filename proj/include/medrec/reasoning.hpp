#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "medrec/extraction.hpp"
#include "medrec/ontology.hpp"

namespace medrec {

struct Provenance {
  std::string doc_id;
  std::string mention_id;
  DocumentCategory kind = DocumentCategory::Other;
  std::optional<Date> date;

  auto operator<=>(const Provenance&) const = default;
  bool operator==(const Provenance&) const = default;
};

// Support contributed by one provenance entry. Generated answers count half.
double provenance_weight(const Provenance& p);
double provenance_mass(const std::vector<Provenance>& provenance);

struct ObjectAttributes {
  std::optional<Date> date;
  std::optional<std::string> qualifier;
  std::optional<std::string> stage_value;

  bool operator==(const ObjectAttributes&) const = default;
};

struct MedicalObject {
  std::string object_id;
  std::string concept_id;
  SemanticAxis axis = SemanticAxis::Other;
  ObjectAttributes attributes;
  std::vector<Provenance> provenance;
  double confidence = 0.0;
  // Concepts of the objects merged into this one, in merge order. A grounded
  // object lists only its own concept.
  std::vector<std::string> member_concepts;

  bool operator==(const MedicalObject&) const = default;
};

struct ObjectLink {
  std::string from_object;
  std::string to_object;
  RelationKind kind = RelationKind::HasDate;
  double score = 0.0;

  bool operator==(const ObjectLink&) const = default;
};

struct ObjectGraph {
  std::string doc_id;
  DocumentCategory category = DocumentCategory::Other;
  std::vector<MedicalObject> objects;
  std::vector<ObjectLink> links;
};

struct PatientGraph {
  std::string patient_id;
  std::vector<MedicalObject> objects;
  std::vector<ObjectLink> links;

  std::vector<const MedicalObject*> on_axis(SemanticAxis axis) const;
};

struct ReadoutValue {
  ValueRef value;
  std::optional<Date> date;
  std::optional<std::string> qualifier;
  double confidence = 0.0;

  bool operator==(const ReadoutValue&) const = default;
};

struct VariableReadout {
  std::array<std::vector<ReadoutValue>, kVariableCount> values;

  std::vector<ReadoutValue>& operator[](VariableKind kind) { return values[index_of(kind)]; }
  const std::vector<ReadoutValue>& operator[](VariableKind kind) const { return values[index_of(kind)]; }
  bool empty() const;
  bool operator==(const VariableReadout&) const = default;
};

struct ReasoningConfig {
  double tau = 0.5;
};

// Each concept mention becomes one object. Its concept is the candidate with
// the largest vote (match scores summed over every mention in the document
// listing that candidate); ties go to the deeper concept, then the smaller
// id. Dates attach through HasDate edges, qualifiers through
// HasInterpretation edges.
ObjectGraph ground_tag_graph(const TagGraph& tg, const OntologyGraph& onto);

// Per axis, objects sorted by (provenance mass desc, doc id, object id) are
// clustered greedily: an object joins the first cluster whose every member
// is compatible with it and attribute-consistent. Cluster confidence is
// (s + 1) / (s + k + 2) with s the cluster's provenance mass and k the mass
// of same-axis clusters whose concept is incompatible. On multi-valued axes
// co-existing values are not evidence against each other, so k = 0 there.
PatientGraph consolidate_patient(const std::vector<ObjectGraph>& graphs, const OntologyGraph& onto,
                                 const std::string& patient_id = {});

// Views a consolidated graph as a single document graph, for re-feeding.
ObjectGraph as_object_graph(const PatientGraph& pg);

VariableReadout extract_variables(const PatientGraph& pg, const OntologyGraph& onto, const ReasoningConfig& cfg = {});

}  // namespace medrec
