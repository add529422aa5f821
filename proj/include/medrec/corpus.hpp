#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "medrec/ontology.hpp"
#include "medrec/types.hpp"

namespace medrec {

enum class CancerCohort : std::uint8_t { Colorectal, Breast, Lung, Other };

std::string_view cohort_name(CancerCohort cohort);
std::optional<CancerCohort> parse_cohort(std::string_view name);

struct RawDocumentText {
  std::string source_id;
  std::string text;
  std::size_t byte_length = 0;

  bool operator==(const RawDocumentText&) const = default;
};

struct PatientRecordSet {
  std::string patient_id;
  std::vector<RawDocumentText> records;
  CancerCohort cancer_cohort = CancerCohort::Other;

  bool operator==(const PatientRecordSet&) const = default;
};

struct LoadWarning {
  std::string patient_id;
  std::string source_id;  // empty for patient-level warnings
  std::string message;

  bool operator==(const LoadWarning&) const = default;
};

struct CorpusLoad {
  std::vector<PatientRecordSet> patients;
  std::vector<LoadWarning> warnings;

  bool operator==(const CorpusLoad&) const = default;
};

// Reads <root>/<patient_id>/*.txt. Patients are sorted by id and records by
// file name. Whitespace-only files are skipped with a warning; a patient with
// no usable file is dropped with a warning. An optional <root>/cohorts.tsv
// (patient_id TAB cohort) sets cancer_cohort.
CorpusLoad load_patient_corpus(const std::filesystem::path& root);

struct GoldValue {
  ValueRef value;
  std::optional<Date> date;
  std::optional<std::string> qualifier;

  auto operator<=>(const GoldValue&) const = default;
};

struct PatientGold {
  std::array<std::vector<GoldValue>, kVariableCount> values;

  std::vector<GoldValue>& operator[](VariableKind kind) { return values[index_of(kind)]; }
  const std::vector<GoldValue>& operator[](VariableKind kind) const { return values[index_of(kind)]; }
  bool operator==(const PatientGold&) const = default;
};

using GoldStandard = std::map<std::string, PatientGold>;

// Tab-separated: patient_id, variable name, concept:<id> | lit:<text>,
// optional YYYY-MM-DD date, optional qualifier. A patient's lines must be
// contiguous; a repeated block or an exactly repeated line is an error.
GoldStandard parse_gold_standard(std::istream& in, const OntologyGraph& onto,
                                 const std::string& source_name = "<stream>");
GoldStandard load_gold_standard(const std::filesystem::path& path, const OntologyGraph& onto);

void write_gold_standard(std::ostream& out, const GoldStandard& gold);

}  // namespace medrec
