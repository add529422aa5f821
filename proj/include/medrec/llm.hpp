#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medrec/document.hpp"
#include "medrec/extraction.hpp"
#include "medrec/ontology.hpp"
#include "medrec/preprocess.hpp"
#include "medrec/reasoning.hpp"

namespace medrec {

// ---------------------------------------------------------------------------
// Chunking

// A budget-bounded slice of one document. token_count counts whitespace
// tokens; ordinal is the chunk's position within its source document.
struct Chunk {
  std::string chunk_id;  // "<source_doc_id>#<ordinal>"
  std::string patient_id;
  std::string source_doc_id;
  DocumentCategory category = DocumentCategory::Other;
  std::size_t ordinal = 0;
  std::string text;
  std::size_t token_count = 0;

  bool operator==(const Chunk&) const = default;
};

std::size_t count_tokens(std::string_view text);

// Greedy packing of whitespace tokens. When a document does not fit in the
// remaining budget the cut goes after the last sentence-final token inside
// the final tenth of the budget, or at the budget if there is none. Chunk
// text is the source slice from first to last token. Throws Error when
// chunk_size is 0.
std::vector<Chunk> chunk_documents(const std::vector<ClinicalDocument>& docs, std::size_t chunk_size);

// First occurrence of every chunk_id, order preserved.
std::vector<Chunk> dedup_chunks(const std::vector<Chunk>& chunks);

// Chunks viewed as documents for the reasoning pipeline.
std::vector<ClinicalDocument> chunks_to_documents(const std::vector<Chunk>& chunks);

// ---------------------------------------------------------------------------
// Backends

// Raised by backend calls. Transport failures are retriable, malformed
// responses are not.
class BackendError : public Error {
 public:
  BackendError(std::string backend_id, const std::string& message, bool retriable)
      : Error(backend_id + ": " + message), backend_id_(std::move(backend_id)), retriable_(retriable) {}
  const std::string& backend_id() const { return backend_id_; }
  bool retriable() const { return retriable_; }

 private:
  std::string backend_id_;
  bool retriable_;
};

enum class BackendKind : std::uint8_t { Embedder, Generator };

struct BackendConfig {
  std::string backend_id = "mock";
  BackendKind kind = BackendKind::Embedder;
  std::optional<std::string> endpoint;  // base URL of an HTTP backend
  std::size_t chunk_size = 3000;
  std::optional<double> temperature;  // generators only
  std::size_t k = 4;
  // Whitespace tokens a generator prompt may use.
  std::size_t context_budget = 16000;

  // k >= 1, chunk_size >= 1, temperature >= 0 and only on generators.
  void validate() const;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& texts) const = 0;
  virtual std::string backend_id() const = 0;
};

// Calls the backend and checks one vector per text, all of one dimension.
std::vector<std::vector<double>> embed(const std::vector<std::string>& texts, const Embedder& backend);

// L2-normalized term frequencies of lowercased alphanumeric tokens, hashed
// into a fixed number of buckets. Text without tokens maps to zeros.
class MockEmbedder : public Embedder {
 public:
  static constexpr std::size_t kDimension = 1024;

  std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& texts) const override;
  std::string backend_id() const override { return "mock-embedder"; }
};

// 0 when either vector is zero.
double cosine(const std::vector<double>& a, const std::vector<double>& b);

// Indices of the k best chunks by similarity, best first; ties by
// (source_doc_id, ordinal).
std::vector<std::size_t> rank_top_k(const std::vector<double>& query, const std::vector<std::vector<double>>& vectors,
                                    const std::vector<Chunk>& chunks, std::size_t k);

std::vector<Chunk> retrieve_top_k(const std::string& question, const std::vector<Chunk>& chunks,
                                  const Embedder& backend, std::size_t k);

// Embeds a patient's chunks once for repeated queries.
class ChunkIndex {
 public:
  ChunkIndex(std::vector<Chunk> chunks, const Embedder& backend);

  std::vector<Chunk> top_k(const std::string& question, std::size_t k) const;
  const std::vector<Chunk>& chunks() const { return chunks_; }

 private:
  std::vector<Chunk> chunks_;
  std::vector<std::vector<double>> vectors_;
  const Embedder& backend_;
};

// Cosine of embeddings of the text on either side of a candidate cut.
class EmbedderBoundaryScorer : public BoundaryScorer {
 public:
  explicit EmbedderBoundaryScorer(std::shared_ptr<const Embedder> backend) : backend_(std::move(backend)) {}
  double similarity(std::string_view left, std::string_view right) const override;

 private:
  std::shared_ptr<const Embedder> backend_;
};

// ---------------------------------------------------------------------------
// Questions

inline constexpr int kQuestionCount = 31;

// Variables a question is meant to populate, by 1-based index.
const std::vector<VariableKind>& question_targets(int question_index);

// The question whose answer supplies a variable when answers are read
// directly, without reasoning.
int answer_key_question(VariableKind kind);

class QuestionBank {
 public:
  // One question per line; '#' lines and blank lines are skipped. Exactly 31
  // questions are required.
  static QuestionBank parse(std::istream& in, const std::string& source_name = "<stream>");
  static QuestionBank load(const std::filesystem::path& path);

  std::size_t size() const { return questions_.size(); }
  const std::string& question(int index) const;
  const std::vector<std::string>& questions() const { return questions_; }

 private:
  std::vector<std::string> questions_;
};

// ---------------------------------------------------------------------------
// Generation

struct GeneratedAnswer {
  int question_index = 0;
  std::string answer_text;
  std::string backend_id;
  double temperature = 0.0;

  bool operator==(const GeneratedAnswer&) const = default;
};

// Raised when the backend fails on a question.
class GenerationError : public Error {
 public:
  GenerationError(int question_index, const std::string& message)
      : Error("question " + std::to_string(question_index) + ": " + message), question_index_(question_index) {}
  int question_index() const { return question_index_; }

 private:
  int question_index_;
};

struct GenerationRequest {
  int question_index = 0;
  std::string question;
  std::vector<Chunk> context;  // best first, already fitted to the budget
  std::string prompt;
  double temperature = 0.0;
};

class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string complete(const GenerationRequest& request) const = 0;
  virtual std::string backend_id() const = 0;
};

inline constexpr std::string_view kPromptVersion = "medrec-prompt-v1";
inline constexpr std::string_view kNoInformation = "no information found";

std::string build_prompt(const std::string& question, const std::vector<Chunk>& context);

// Drops the lowest-ranked chunks until the prompt fits in budget tokens.
// Throws Error if the question alone does not fit.
std::vector<Chunk> fit_context(const std::string& question, std::vector<Chunk> context, std::size_t budget);

// Empty context answers kNoInformation without calling the backend.
GeneratedAnswer generate_answer(int question_index, const std::string& question, std::vector<Chunk> context,
                                const Generator& backend, double temperature, std::size_t context_budget);

// One answer item: "<name>[ was <qualifier>][ on YYYY-MM-DD]". Items are
// joined with "; ".
struct AnswerItem {
  std::string name;
  std::optional<std::string> qualifier;
  std::optional<Date> date;

  bool operator==(const AnswerItem&) const = default;
};

std::string format_answer(const std::vector<AnswerItem>& items);
// kNoInformation and empty text give no items.
std::vector<AnswerItem> parse_answer(std::string_view text);

struct MockGeneratorOptions {
  std::uint64_t seed = 0;
  bool inconsistent = false;     // question 2 names a different cancer than the summary
  bool hallucinate = false;      // list answers gain a concept absent from the context
  bool confuse_generic = false;  // medication questions return the side-effect list

  // Comma-separated mode names; "none" or empty clears all.
  static MockGeneratorOptions parse_modes(std::string_view modes, std::uint64_t seed = 0);
  bool any() const { return inconsistent || hallucinate || confuse_generic; }
};

// Answers by running extraction and reasoning over the context chunks and
// listing the readout values of the question's target variables.
class MockGenerator : public Generator {
 public:
  MockGenerator(const OntologyGraph& onto, MockGeneratorOptions options = {});

  std::string complete(const GenerationRequest& request) const override;
  std::string backend_id() const override { return "mock-generator"; }

 private:
  std::vector<AnswerItem> distractors(const PatientGraph& pg) const;
  std::optional<AnswerItem> hallucination(SemanticAxis axis, const PatientGraph& pg) const;

  const OntologyGraph& onto_;
  MockGeneratorOptions options_;
  TagGraphBuilder builder_;
};

// Answer documents in question order: doc id "<patient>/answer-NN",
// category LlmAnswer.
std::vector<ClinicalDocument> answers_to_documents(std::vector<GeneratedAnswer> answers,
                                                   const std::string& patient_id);

// Reads each variable from its answer_key_question. Names resolve on the
// variable's axis; unresolved names on single-target questions become
// literals.
VariableReadout readout_from_answers(const std::vector<GeneratedAnswer>& answers, const OntologyGraph& onto);

// ---------------------------------------------------------------------------
// HTTP backends
//
//   POST <base>/embed     {"texts": [...]}                    -> {"vectors": [[...], ...]}
//   POST <base>/generate  {"prompt": "...", "temperature": x} -> {"text": "..."}

class HttpEmbedder : public Embedder {
 public:
  explicit HttpEmbedder(std::string base_url, int max_attempts = 2);
  std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& texts) const override;
  std::string backend_id() const override { return "http:" + base_url_; }

 private:
  std::string base_url_;
  int max_attempts_;
};

class HttpGenerator : public Generator {
 public:
  explicit HttpGenerator(std::string base_url, int max_attempts = 2);
  std::string complete(const GenerationRequest& request) const override;
  std::string backend_id() const override { return "http:" + base_url_; }

 private:
  std::string base_url_;
  int max_attempts_;
};

}  // namespace medrec
