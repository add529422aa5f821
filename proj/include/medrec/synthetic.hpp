#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "medrec/corpus.hpp"
#include "medrec/ontology.hpp"

namespace medrec {

struct SyntheticOptions {
  std::uint64_t seed = 1;
  std::size_t n_patients = 10;
  // Adds patient education handouts (side effects, supportive medication)
  // and an unrelated family-history neoplasm to every patient.
  bool distractors = false;
  std::size_t min_records = 5;
  std::size_t max_records = 75;
  // Per-patient counts are drawn uniformly from [min, max] and then nudged
  // one record at a time until the total equals round(mean * n_patients).
  double mean_records = 34.0;
};

// A concept mention planted in a generated document, with the date it was
// written next to. Offsets refer to the document text.
struct SyntheticFact {
  std::string concept_id;
  std::optional<Date> date;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t date_begin = 0;
  std::size_t date_end = 0;
};

struct SyntheticDocument {
  std::string source_id;
  DocumentCategory category = DocumentCategory::Other;
  std::string text;
  std::vector<SyntheticFact> facts;
  // Every PHI string written into the text (names, MRN, phone, ...).
  std::vector<std::string> phi;
};

struct SyntheticPatient {
  std::string patient_id;
  CancerCohort cohort = CancerCohort::Other;
  std::vector<SyntheticDocument> documents;
};

struct SyntheticCorpus {
  std::vector<SyntheticPatient> patients;
  GoldStandard gold;
};

// Deterministic for equal (options, ontology). Throws UnknownConceptError if
// the ontology lacks a concept the cohort profiles use.
SyntheticCorpus generate_synthetic_corpus(const SyntheticOptions& options, const OntologyGraph& onto);

// Writes <out>/corpus/<pid>/<source_id>.txt, <out>/corpus/cohorts.tsv,
// <out>/gold.tsv and <out>/labels.tsv (patient_id, source_id, category).
void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& out);

// The corpus as load_patient_corpus would read it back from disk.
std::vector<PatientRecordSet> record_sets(const SyntheticCorpus& corpus);

// Person names the generator writes; the bundled gazetteer lists the same.
const std::vector<std::string>& synthetic_person_names();

}  // namespace medrec
