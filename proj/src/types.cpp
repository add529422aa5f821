#include "medrec/types.hpp"

#include <cstdio>

#include "medrec/text.hpp"

namespace medrec {

namespace {

constexpr std::array<std::string_view, kAxisCount> kAxisNames = {
    "Neoplasm", "Morphology", "TStage",  "NStage",  "MStage",
    "StageGroup", "Medication", "Outcome", "Response", "Biomarker",
    "Surgery", "DiagnosticProcedure", "BodySite", "Other",
};

constexpr std::array<std::string_view, kVariableCount> kVariableNames = {
    "Neoplasm",    "Morphology", "T-Stage",  "N-Stage",           "M-Stage",
    "Stage Group", "Medications", "Outcome", "Response",          "Tested Biomarkers",
    "Surgeries",   "Diagnostic Procedures",  "Cancer Diagnosis Date",
};

constexpr std::array<std::string_view, 6> kCategoryNames = {
    "Pathology", "Administrative", "LabResults", "SoapNote", "LlmAnswer", "Other",
};

bool digits(std::string_view s) {
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return !s.empty();
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

bool Date::valid(int year, int month, int day) {
  if (year < 1 || year > 9999 || month < 1 || month > 12 || day < 1) return false;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  int max_day = kDays[month - 1] + ((month == 2 && leap) ? 1 : 0);
  return day <= max_day;
}

std::optional<Date> Date::parse_iso(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto y = text.substr(0, 4), m = text.substr(5, 2), d = text.substr(8, 2);
  if (!digits(y) || !digits(m) || !digits(d)) return std::nullopt;
  Date date{to_int(y), to_int(m), to_int(d)};
  if (!valid(date.year, date.month, date.day)) return std::nullopt;
  return date;
}

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::string_view axis_name(SemanticAxis axis) { return kAxisNames[static_cast<std::size_t>(axis)]; }

std::optional<SemanticAxis> parse_axis(std::string_view name) {
  for (std::size_t i = 0; i < kAxisNames.size(); ++i)
    if (kAxisNames[i] == name) return static_cast<SemanticAxis>(i);
  return std::nullopt;
}

std::string_view variable_name(VariableKind kind) { return kVariableNames[index_of(kind)]; }

std::optional<VariableKind> parse_variable(std::string_view name) {
  for (std::size_t i = 0; i < kVariableNames.size(); ++i)
    if (kVariableNames[i] == name) return static_cast<VariableKind>(i);
  if (name == "Neoplasm Stage Group") return VariableKind::StageGroup;
  return std::nullopt;
}

SemanticAxis variable_axis(VariableKind kind) {
  switch (kind) {
    case VariableKind::Neoplasm: return SemanticAxis::Neoplasm;
    case VariableKind::Morphology: return SemanticAxis::Morphology;
    case VariableKind::TStage: return SemanticAxis::TStage;
    case VariableKind::NStage: return SemanticAxis::NStage;
    case VariableKind::MStage: return SemanticAxis::MStage;
    case VariableKind::StageGroup: return SemanticAxis::StageGroup;
    case VariableKind::Medications: return SemanticAxis::Medication;
    case VariableKind::Outcome: return SemanticAxis::Outcome;
    case VariableKind::Response: return SemanticAxis::Response;
    case VariableKind::TestedBiomarkers: return SemanticAxis::Biomarker;
    case VariableKind::Surgeries: return SemanticAxis::Surgery;
    case VariableKind::DiagnosticProcedures: return SemanticAxis::DiagnosticProcedure;
    case VariableKind::CancerDiagnosisDate: return SemanticAxis::Neoplasm;
  }
  return SemanticAxis::Other;
}

std::optional<VariableKind> variable_for_axis(SemanticAxis axis) {
  for (VariableKind kind : kAllVariables)
    if (kind != VariableKind::CancerDiagnosisDate && variable_axis(kind) == axis) return kind;
  return std::nullopt;
}

bool is_multi_valued(VariableKind kind) {
  switch (kind) {
    case VariableKind::Medications:
    case VariableKind::Outcome:
    case VariableKind::Response:
    case VariableKind::TestedBiomarkers:
    case VariableKind::Surgeries:
    case VariableKind::DiagnosticProcedures:
      return true;
    default:
      return false;
  }
}

bool is_multi_valued_axis(SemanticAxis axis) {
  auto kind = variable_for_axis(axis);
  return kind && is_multi_valued(*kind);
}

std::string_view category_name(DocumentCategory category) {
  return kCategoryNames[static_cast<std::size_t>(category)];
}

std::optional<DocumentCategory> parse_category(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i)
    if (kCategoryNames[i] == name) return static_cast<DocumentCategory>(i);
  return std::nullopt;
}

std::string ValueRef::encode() const {
  return (kind == Kind::Concept ? "concept:" : "lit:") + text;
}

std::optional<ValueRef> ValueRef::decode(std::string_view s) {
  if (s.starts_with("concept:")) {
    auto id = text::trim(s.substr(8));
    if (id.empty()) return std::nullopt;
    return concept_ref(std::string(id));
  }
  if (s.starts_with("lit:")) {
    auto lit = text::trim(s.substr(4));
    if (lit.empty()) return std::nullopt;
    return literal(std::string(lit));
  }
  return std::nullopt;
}

}  // namespace medrec
