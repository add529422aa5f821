#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace medrec {

// Base class for every error raised by the library. Fatal conditions
// (malformed input files, contract violations) surface as exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a concept id does not resolve in the loaded ontology.
class UnknownConceptError : public Error {
 public:
  explicit UnknownConceptError(std::string concept_id)
      : Error("unknown concept: " + concept_id), concept_id_(std::move(concept_id)) {}
  const std::string& concept_id() const { return concept_id_; }

 private:
  std::string concept_id_;
};

// A proleptic Gregorian calendar date.
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  static bool valid(int year, int month, int day);
  // Accepts YYYY-MM-DD only.
  static std::optional<Date> parse_iso(std::string_view text);
  std::string iso() const;

  auto operator<=>(const Date&) const = default;
};

enum class SemanticAxis : std::uint8_t {
  Neoplasm,
  Morphology,
  TStage,
  NStage,
  MStage,
  StageGroup,
  Medication,
  Outcome,
  Response,
  Biomarker,
  Surgery,
  DiagnosticProcedure,
  BodySite,
  Other,
};

inline constexpr std::size_t kAxisCount = 14;

std::string_view axis_name(SemanticAxis axis);
std::optional<SemanticAxis> parse_axis(std::string_view name);

// The 13 abstracted medical variables, in reporting order.
enum class VariableKind : std::uint8_t {
  Neoplasm,
  Morphology,
  TStage,
  NStage,
  MStage,
  StageGroup,
  Medications,
  Outcome,
  Response,
  TestedBiomarkers,
  Surgeries,
  DiagnosticProcedures,
  CancerDiagnosisDate,
};

inline constexpr std::size_t kVariableCount = 13;

inline constexpr std::array<VariableKind, kVariableCount> kAllVariables = {
    VariableKind::Neoplasm,         VariableKind::Morphology,
    VariableKind::TStage,           VariableKind::NStage,
    VariableKind::MStage,           VariableKind::StageGroup,
    VariableKind::Medications,      VariableKind::Outcome,
    VariableKind::Response,         VariableKind::TestedBiomarkers,
    VariableKind::Surgeries,        VariableKind::DiagnosticProcedures,
    VariableKind::CancerDiagnosisDate,
};

inline constexpr std::size_t index_of(VariableKind kind) {
  return static_cast<std::size_t>(kind);
}

// Canonical display name ("T-Stage", "Tested Biomarkers", ...).
std::string_view variable_name(VariableKind kind);
// Accepts the canonical names plus "Neoplasm Stage Group".
std::optional<VariableKind> parse_variable(std::string_view name);

// Axis whose concepts populate the variable. Cancer Diagnosis Date reads
// from the Neoplasm axis.
SemanticAxis variable_axis(VariableKind kind);
std::optional<VariableKind> variable_for_axis(SemanticAxis axis);
// Multi-valued variables keep every cluster above the readout threshold.
bool is_multi_valued(VariableKind kind);
bool is_multi_valued_axis(SemanticAxis axis);

enum class DocumentCategory : std::uint8_t {
  Pathology,
  Administrative,
  LabResults,
  SoapNote,
  LlmAnswer,
  Other,
};

std::string_view category_name(DocumentCategory category);
std::optional<DocumentCategory> parse_category(std::string_view name);

// Either an ontology concept reference or a free-text literal.
struct ValueRef {
  enum class Kind : std::uint8_t { Concept, Literal };
  Kind kind = Kind::Concept;
  std::string text;

  static ValueRef concept_ref(std::string id) { return {Kind::Concept, std::move(id)}; }
  static ValueRef literal(std::string text) { return {Kind::Literal, std::move(text)}; }

  bool is_concept() const { return kind == Kind::Concept; }
  // "concept:<id>" or "lit:<text>".
  std::string encode() const;
  static std::optional<ValueRef> decode(std::string_view text);

  auto operator<=>(const ValueRef&) const = default;
};

}  // namespace medrec
