#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "medrec/corpus.hpp"
#include "medrec/document.hpp"

namespace medrec {

// ---------------------------------------------------------------------------
// De-identification

struct PhiSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string kind;  // NAME, PHONE, SSN, MRN, EMAIL, ADDRESS

  bool operator==(const PhiSpan&) const = default;
};

// Spans are sorted, non-overlapping and index the original text.
struct RedactionResult {
  std::string redacted_text;
  std::vector<PhiSpan> phi_spans;
};

// Person names matched case-insensitively on word boundaries.
class Gazetteer {
 public:
  Gazetteer() = default;
  explicit Gazetteer(const std::vector<std::string>& names);

  static Gazetteer parse(std::istream& in);
  static Gazetteer load(const std::filesystem::path& path);

  bool contains(std::string_view token) const;
  std::size_t size() const { return names_.size(); }

 private:
  std::unordered_set<std::string> names_;  // lowercased
};

class Deidentifier {
 public:
  virtual ~Deidentifier() = default;
  virtual RedactionResult redact(std::string_view text) const = 0;
};

// Gazetteer names plus built-in phone, SSN, MRN, e-mail and street address
// patterns. Dates are left alone. Existing [REDACTED:KIND] tokens are never
// re-matched, which makes redaction idempotent.
class PatternDeidentifier : public Deidentifier {
 public:
  explicit PatternDeidentifier(Gazetteer gazetteer);
  RedactionResult redact(std::string_view text) const override;

 private:
  struct Pattern {
    std::string kind;
    std::regex re;
    int group;  // sub-match to redact; 0 for the whole match
  };
  // Non-overlapping hits in s outside existing redaction tokens.
  std::vector<PhiSpan> find_hits(const std::string& s) const;

  Gazetteer gazetteer_;
  std::vector<Pattern> patterns_;
};

RedactionResult deidentify(std::string_view text, const Gazetteer& gazetteer);

// ---------------------------------------------------------------------------
// Segmentation

// Similarity between the text just before and just after a candidate cut.
class BoundaryScorer {
 public:
  virtual ~BoundaryScorer() = default;
  virtual double similarity(std::string_view left, std::string_view right) const = 0;
};

struct SegmenterConfig {
  std::size_t min_length = 200;
  double similarity_threshold = 0.35;
  // Characters of context on each side of a line boundary given to the scorer.
  std::size_t scorer_window = 400;
};

// Cuts before all-caps title lines ending in REPORT, NOTE, RESULTS, FORM,
// SUMMARY, HANDOUT, SHEET, LETTER or CONSULTATION; after a "Page k of n"
// line with k == n; at form feeds; and, with a scorer, at line starts where
// the similarity drops below the threshold. Segments shorter than
// min_length after trimming are merged into the preceding one. Segment text
// is the trimmed slice; doc ids are "<patient>/<source>/<index>".
std::vector<ClinicalDocument> segment_documents(const RawDocumentText& record, const std::string& patient_id,
                                                const BoundaryScorer* scorer = nullptr,
                                                const SegmenterConfig& config = {});

// ---------------------------------------------------------------------------
// Classification

// Weighted cue counts per category; ties follow Pathology > LabResults >
// SoapNote > Administrative > Other, and no cue at all gives Other.
DocumentCategory classify_document(const ClinicalDocument& doc);

struct CategoryScores {
  double pathology = 0, lab_results = 0, soap_note = 0, administrative = 0, other = 0;
};
CategoryScores category_scores(std::string_view text);

// ---------------------------------------------------------------------------
// Per-patient preprocessing

struct PreprocessConfig {
  SegmenterConfig segmenter;
  std::shared_ptr<const BoundaryScorer> scorer;  // null: rule-based cuts only
};

// De-identifies, segments and classifies every record of a patient.
std::vector<ClinicalDocument> preprocess_patient(const PatientRecordSet& patient, const Deidentifier& deid,
                                                 const PreprocessConfig& config = {});

}  // namespace medrec
