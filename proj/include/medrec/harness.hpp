#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "medrec/corpus.hpp"
#include "medrec/llm.hpp"
#include "medrec/ontology.hpp"
#include "medrec/preprocess.hpp"
#include "medrec/reasoning.hpp"

namespace medrec {

// ---------------------------------------------------------------------------
// Setups

enum class SetupKind : std::uint8_t {
  NlpReasoning,
  RetNlpReasoning,
  GenNlpReasoning,
  RetGenNlpReasoning,
  StandaloneLlm,
};

inline constexpr std::array<SetupKind, 5> kAllSetups = {SetupKind::NlpReasoning, SetupKind::RetNlpReasoning,
                                                        SetupKind::GenNlpReasoning, SetupKind::RetGenNlpReasoning,
                                                        SetupKind::StandaloneLlm};

// "NLP_REASONING", "RET_NLP_REASONING", ... "STANDALONE_LLM".
std::string_view setup_name(SetupKind setup);
// CLI spelling: nlp, ret, gen, retgen, standalone.
std::string_view setup_flag(SetupKind setup);
std::optional<SetupKind> parse_setup(std::string_view text);

bool needs_embedder(SetupKind setup);
bool needs_generator(SetupKind setup);

struct Backends {
  std::shared_ptr<const Embedder> embedder;
  std::shared_ptr<const Generator> generator;
};

struct SetupOptions {
  SetupKind setup = SetupKind::NlpReasoning;
  std::size_t chunk_size = 3000;
  std::size_t k = 4;
  double tau = 0.5;
  double temperature = 0.67;
  std::size_t context_budget = 16000;
  std::size_t workers = 0;  // 0: hardware concurrency
  PreprocessConfig preprocess;
};

// Throws Error when the setup lacks a backend it needs or a parameter is out
// of range. Called before any work is done.
void validate_setup(const SetupOptions& options, const Backends& backends);

// Everything the pipeline reads besides the records themselves.
struct PipelineContext {
  const OntologyGraph& onto;
  const QuestionBank& questions;
  const Deidentifier& deidentifier;
};

struct ChunkStats {
  std::size_t chunk_size = 0;
  std::size_t k = 0;
  std::size_t chunks = 0;             // produced by chunking
  std::size_t max_chunk_tokens = 0;
  std::size_t questions = 0;          // retrieval calls
  std::size_t max_per_question = 0;   // chunks returned by one call
  std::size_t max_before_dedup = 0;   // per patient, summed over questions
  std::size_t max_after_dedup = 0;

  void merge(const ChunkStats& other);
  // token budget, k per question and 31 * k per patient all hold.
  bool disciplined() const;
};

struct PatientRun {
  std::string patient_id;
  VariableReadout readout;
  std::vector<GeneratedAnswer> answers;
  ChunkStats chunk_stats;
  std::optional<std::string> error;  // set when the patient failed; readout is then empty
};

struct SetupRun {
  SetupKind setup = SetupKind::NlpReasoning;
  std::vector<PatientRun> patients;  // input order
  ChunkStats chunk_stats;
};

// Runs one patient through the setup's pipeline. Throws on failure.
PatientRun run_patient(const PatientRecordSet& patient, const SetupOptions& options, const Backends& backends,
                       const PipelineContext& ctx);

// Patients run on a worker pool; a failing patient is recorded and the rest
// continue. Results are in input order whatever the schedule.
SetupRun run_setup(const std::vector<PatientRecordSet>& patients, const SetupOptions& options,
                   const Backends& backends, const PipelineContext& ctx);

// The NLP_REASONING core on an explicit document list.
PatientGraph reason_over(const std::vector<ClinicalDocument>& docs, const OntologyGraph& onto,
                         const std::string& patient_id);

// ---------------------------------------------------------------------------
// Scoring

struct MatchCounts {
  std::size_t tp = 0, fp = 0, fn = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const MatchCounts&) const = default;
};

// Per variable: predictions, highest confidence first, each take the first
// unmatched gold value they match. A concept matches when it equals the gold
// concept or is a subtype of it; a literal matches equal text. When the gold
// value carries a date the prediction must carry the same date.
std::array<MatchCounts, kVariableCount> match_predictions(const VariableReadout& pred, const PatientGold& gold,
                                                          const OntologyGraph& onto);

struct VariableMetrics {
  VariableKind variable = VariableKind::Neoplasm;
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;

  bool operator==(const VariableMetrics&) const = default;
};

// Harmonic mean; 0 when p + r is 0. Works on fractions or percentages.
double f1_score(double precision, double recall);
VariableMetrics compute_metrics(VariableKind variable, const MatchCounts& counts);

// Unweighted mean over exactly 13 values; throws Error otherwise.
double macro_average(const std::vector<double>& f1s);
double macro_average(const std::vector<VariableMetrics>& rows);

struct PatientFailure {
  std::string patient_id;
  std::string message;

  bool operator==(const PatientFailure&) const = default;
};

struct SetupReport {
  SetupKind setup = SetupKind::NlpReasoning;
  std::vector<VariableMetrics> rows;  // 13, in variable order
  double macro_f1 = 0.0;
  std::size_t patients = 0;
  std::vector<PatientFailure> failures;
  ChunkStats chunk_stats;
};

// Scores patients present in the gold standard. Gold patients missing from
// the run count as empty predictions.
SetupReport score_setup(const SetupRun& run, const GoldStandard& gold, const OntologyGraph& onto);

struct EvalReport {
  static constexpr std::string_view kSchema = "medrec-report/1";
  std::vector<std::pair<std::string, std::string>> config;  // echoed run settings, in order
  std::vector<SetupReport> setups;
  std::string started_at, finished_at;  // metadata only
  std::vector<std::string> warnings;
};

// The metrics part of report.json: identical for identical inputs.
std::string metrics_payload(const EvalReport& report);
std::string report_json(const EvalReport& report);
// Table layout: one line per setup, one column per variable, then macro F1.
std::string report_table(const EvalReport& report);
EvalReport parse_report_json(std::string_view json);

// Writes report.json and report.txt under dir (created if missing).
void emit_report(const EvalReport& report, const std::filesystem::path& dir);
void write_predictions(const std::vector<SetupRun>& runs, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// End-to-end run from files

struct RunConfig {
  SetupKind setup = SetupKind::NlpReasoning;
  std::string embedder = "mock";   // mock | http:URL | none
  std::string generator = "mock";  // mock | http:URL | none
  std::string anomaly_modes = "none";
  std::size_t chunk_size = 3000;
  std::size_t k = 4;
  double tau = 0.5;
  double temperature = 0.67;
  std::size_t context_budget = 16000;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  bool embedding_segmenter = false;
  std::size_t segment_min_len = 200;
  std::filesystem::path corpus, ontology, gold, questions, gazetteer, out;

  std::vector<std::pair<std::string, std::string>> echo() const;
};

Backends make_backends(const RunConfig& cfg, const OntologyGraph& onto);

struct RunOutput {
  EvalReport report;
  SetupRun run;
};

// Loads inputs, runs the configured setup, scores it and, when cfg.out is
// set, writes report.json, report.txt and predictions.json there.
RunOutput run_from_config(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Published table consistency

struct PaperTables {
  struct Row {
    std::string kind;  // F1, Precision, Recall or MacroF1
    std::string setup;
    std::string model;
    std::vector<double> values;
  };
  std::vector<Row> rows;

  static PaperTables parse(std::istream& in, const std::string& source_name = "<stream>");
  static PaperTables load(const std::filesystem::path& path);
  const Row* find(std::string_view kind, std::string_view setup, std::string_view model) const;
};

struct CellCheck {
  std::string setup, model;
  VariableKind variable = VariableKind::Neoplasm;
  double precision = 0, recall = 0, reported_f1 = 0, computed_f1 = 0;
  bool pass = false;
};

struct MacroCheck {
  std::string setup, model;
  double reported = 0, computed = 0;
  bool pass = false;
};

// Every F1 row with matching precision and recall rows, cell by cell.
std::vector<CellCheck> check_f1_cells(const PaperTables& tables, double tolerance = 0.05);
// Every MacroF1 row against the mean of its F1 row.
std::vector<MacroCheck> check_macro_rows(const PaperTables& tables, double tolerance = 0.01);

}  // namespace medrec
