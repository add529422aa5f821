#include "medrec/llm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>

#include "medrec/text.hpp"

namespace medrec {

// ---------------------------------------------------------------------------
// Chunking

namespace {

bool sentence_final(std::string_view token) {
  while (!token.empty() && (token.back() == '"' || token.back() == '\'' || token.back() == ')')) token.remove_suffix(1);
  return !token.empty() && (token.back() == '.' || token.back() == '!' || token.back() == '?');
}

}  // namespace

std::size_t count_tokens(std::string_view text) { return text::whitespace_tokens(text).size(); }

std::vector<Chunk> chunk_documents(const std::vector<ClinicalDocument>& docs, std::size_t chunk_size) {
  if (chunk_size == 0) throw Error("chunk_size must be at least 1");
  std::vector<Chunk> out;
  for (const auto& doc : docs) {
    auto tokens = text::whitespace_tokens(doc.text);
    std::size_t ordinal = 0;
    for (std::size_t i = 0; i < tokens.size();) {
      std::size_t end = std::min(tokens.size(), i + chunk_size);
      if (end < tokens.size()) {
        std::size_t window = std::max<std::size_t>(1, chunk_size / 10);
        for (std::size_t j = end; j > end - window; --j) {
          const auto& t = tokens[j - 1];
          if (sentence_final(std::string_view(doc.text).substr(t.begin, t.end - t.begin))) {
            end = j;
            break;
          }
        }
      }
      Chunk c;
      c.chunk_id = doc.doc_id + "#" + std::to_string(ordinal);
      c.patient_id = doc.patient_id;
      c.source_doc_id = doc.doc_id;
      c.category = doc.category;
      c.ordinal = ordinal++;
      c.text = doc.text.substr(tokens[i].begin, tokens[end - 1].end - tokens[i].begin);
      c.token_count = end - i;
      out.push_back(std::move(c));
      i = end;
    }
  }
  return out;
}

std::vector<Chunk> dedup_chunks(const std::vector<Chunk>& chunks) {
  std::set<std::string> seen;
  std::vector<Chunk> out;
  for (const auto& c : chunks)
    if (seen.insert(c.chunk_id).second) out.push_back(c);
  return out;
}

std::vector<ClinicalDocument> chunks_to_documents(const std::vector<Chunk>& chunks) {
  std::vector<ClinicalDocument> out;
  out.reserve(chunks.size());
  for (const auto& c : chunks) out.push_back({c.chunk_id, c.patient_id, c.category, c.text, 0});
  return out;
}

// ---------------------------------------------------------------------------
// Backends

void BackendConfig::validate() const {
  if (k < 1) throw Error(backend_id + ": k must be at least 1");
  if (chunk_size < 1) throw Error(backend_id + ": chunk_size must be at least 1");
  if (temperature) {
    if (kind != BackendKind::Generator) throw Error(backend_id + ": temperature applies to generators only");
    if (!(*temperature >= 0.0)) throw Error(backend_id + ": temperature must be non-negative");
  }
}

std::vector<std::vector<double>> embed(const std::vector<std::string>& texts, const Embedder& backend) {
  auto vectors = backend.embed_batch(texts);
  if (vectors.size() != texts.size())
    throw BackendError(backend.backend_id(),
                       "expected " + std::to_string(texts.size()) + " vectors, got " + std::to_string(vectors.size()),
                       false);
  for (const auto& v : vectors)
    if (v.size() != vectors.front().size()) throw BackendError(backend.backend_id(), "vector dimension mismatch", false);
  return vectors;
}

std::vector<std::vector<double>> MockEmbedder::embed_batch(const std::vector<std::string>& texts) const {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    std::vector<double> v(kDimension, 0.0);
    for (const auto& tok : text::alnum_tokens(t)) v[text::fnv1a(tok) % kDimension] += 1.0;
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& x : v) x /= norm;
    }
    out.push_back(std::move(v));
  }
  return out;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error("cosine of vectors with different dimensions");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::size_t> rank_top_k(const std::vector<double>& query, const std::vector<std::vector<double>>& vectors,
                                    const std::vector<Chunk>& chunks, std::size_t k) {
  if (vectors.size() != chunks.size()) throw Error("one vector per chunk required");
  std::vector<double> sim(chunks.size());
  for (std::size_t i = 0; i < chunks.size(); ++i) sim[i] = cosine(query, vectors[i]);
  std::vector<std::size_t> idx(chunks.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  auto better = [&](std::size_t a, std::size_t b) {
    if (sim[a] != sim[b]) return sim[a] > sim[b];
    if (chunks[a].source_doc_id != chunks[b].source_doc_id) return chunks[a].source_doc_id < chunks[b].source_doc_id;
    return chunks[a].ordinal < chunks[b].ordinal;
  };
  std::size_t take = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(), better);
  idx.resize(take);
  return idx;
}

std::vector<Chunk> retrieve_top_k(const std::string& question, const std::vector<Chunk>& chunks,
                                  const Embedder& backend, std::size_t k) {
  return ChunkIndex(chunks, backend).top_k(question, k);
}

ChunkIndex::ChunkIndex(std::vector<Chunk> chunks, const Embedder& backend)
    : chunks_(std::move(chunks)), backend_(backend) {
  std::vector<std::string> texts;
  texts.reserve(chunks_.size());
  for (const auto& c : chunks_) texts.push_back(c.text);
  if (!texts.empty()) vectors_ = embed(texts, backend_);
}

std::vector<Chunk> ChunkIndex::top_k(const std::string& question, std::size_t k) const {
  if (k < 1) throw Error("k must be at least 1");
  if (chunks_.empty()) return {};
  auto q = embed({question}, backend_).front();
  if (q.size() != vectors_.front().size())
    throw BackendError(backend_.backend_id(), "question vector dimension mismatch", false);
  std::vector<Chunk> out;
  for (std::size_t i : rank_top_k(q, vectors_, chunks_, k)) out.push_back(chunks_[i]);
  return out;
}

double EmbedderBoundaryScorer::similarity(std::string_view left, std::string_view right) const {
  auto v = embed({std::string(left), std::string(right)}, *backend_);
  return cosine(v[0], v[1]);
}

// ---------------------------------------------------------------------------
// Questions

namespace {

using V = VariableKind;

const std::vector<std::vector<VariableKind>>& target_table() {
  static const std::vector<std::vector<VariableKind>> t = {
      {V::Neoplasm, V::Morphology, V::StageGroup},  // 1 summary
      {V::Neoplasm},
      {V::Morphology},
      {V::TStage, V::NStage, V::MStage},
      {V::StageGroup},
      {V::TStage, V::NStage, V::MStage},
      {V::CancerDiagnosisDate},
      {V::MStage},
      {V::Outcome},  // 9 radiation therapy
      {V::Medications},
      {V::Medications},
      {V::Medications},
      {V::Surgeries},
      {V::Surgeries},
      {V::Surgeries},
      {V::Outcome},
      {V::Outcome},
      {V::Response},
      {V::Response},
      {V::Response},
      {V::TestedBiomarkers},
      {V::TestedBiomarkers},
      {V::TestedBiomarkers},
      {V::TestedBiomarkers},
      {V::TestedBiomarkers},
      {V::TestedBiomarkers},
      {V::TestedBiomarkers},
      {V::DiagnosticProcedures},
      {V::Surgeries, V::DiagnosticProcedures},
      {V::DiagnosticProcedures},
      {V::DiagnosticProcedures},
  };
  return t;
}

void check_index(int question_index) {
  if (question_index < 1 || question_index > kQuestionCount)
    throw Error("question index out of range: " + std::to_string(question_index));
}

}  // namespace

const std::vector<VariableKind>& question_targets(int question_index) {
  check_index(question_index);
  return target_table()[static_cast<std::size_t>(question_index - 1)];
}

int answer_key_question(VariableKind kind) {
  switch (kind) {
    case V::Neoplasm: return 2;
    case V::Morphology: return 3;
    case V::TStage:
    case V::NStage:
    case V::MStage: return 4;
    case V::StageGroup: return 5;
    case V::Medications: return 11;
    case V::Outcome: return 17;
    case V::Response: return 19;
    case V::TestedBiomarkers: return 22;
    case V::Surgeries: return 15;
    case V::DiagnosticProcedures: return 31;
    case V::CancerDiagnosisDate: return 7;
  }
  return 1;
}

QuestionBank QuestionBank::parse(std::istream& in, const std::string& source_name) {
  QuestionBank bank;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (bank.questions_.size() == static_cast<std::size_t>(kQuestionCount))
      throw ParseError(source_name, lineno, "more than " + std::to_string(kQuestionCount) + " questions");
    bank.questions_.emplace_back(t);
  }
  if (bank.questions_.size() != static_cast<std::size_t>(kQuestionCount))
    throw ParseError(source_name, lineno,
                     "expected " + std::to_string(kQuestionCount) + " questions, found " +
                         std::to_string(bank.questions_.size()));
  return bank;
}

QuestionBank QuestionBank::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open question bank: " + path.string());
  return parse(in, path.string());
}

const std::string& QuestionBank::question(int index) const {
  check_index(index);
  return questions_.at(static_cast<std::size_t>(index - 1));
}

// ---------------------------------------------------------------------------
// Generation

std::string build_prompt(const std::string& question, const std::vector<Chunk>& context) {
  std::string p;
  p += "[";
  p += kPromptVersion;
  p += "]\nAnswer the question from the numbered excerpts of one patient's records. List each finding as "
       "'<name> was <interpretation> on <YYYY-MM-DD>', omitting parts that are not stated, and separate "
       "findings with '; '. If the excerpts do not answer the question, reply '";
  p += kNoInformation;
  p += "'.\n\nQuestion: ";
  p += question;
  p += "\n\n";
  for (std::size_t i = 0; i < context.size(); ++i) {
    p += "Excerpt " + std::to_string(i + 1) + " (" + context[i].source_doc_id + "):\n";
    p += context[i].text;
    p += "\n\n";
  }
  p += "Answer:";
  return p;
}

std::vector<Chunk> fit_context(const std::string& question, std::vector<Chunk> context, std::size_t budget) {
  while (count_tokens(build_prompt(question, context)) > budget) {
    if (context.empty()) throw Error("prompt for question exceeds the context budget");
    context.pop_back();
  }
  return context;
}

GeneratedAnswer generate_answer(int question_index, const std::string& question, std::vector<Chunk> context,
                                const Generator& backend, double temperature, std::size_t context_budget) {
  check_index(question_index);
  GeneratedAnswer a{question_index, std::string(kNoInformation), backend.backend_id(), temperature};
  GenerationRequest req;
  req.question_index = question_index;
  req.question = question;
  req.temperature = temperature;
  try {
    req.context = fit_context(question, std::move(context), context_budget);
  } catch (const Error& e) {
    throw GenerationError(question_index, e.what());
  }
  if (req.context.empty()) return a;
  req.prompt = build_prompt(question, req.context);
  try {
    a.answer_text = backend.complete(req);
  } catch (const std::exception& e) {
    throw GenerationError(question_index, e.what());
  }
  return a;
}

std::string format_answer(const std::vector<AnswerItem>& items) {
  if (items.empty()) return std::string(kNoInformation);
  std::vector<std::string> parts;
  for (const auto& it : items) {
    std::string s = it.name;
    if (it.qualifier) s += " was " + *it.qualifier;
    if (it.date) s += " on " + it.date->iso();
    parts.push_back(std::move(s));
  }
  return text::join(parts, "; ");
}

std::vector<AnswerItem> parse_answer(std::string_view answer) {
  static const std::regex item_re(R"(^(.+?)(?: was (.+?))?(?: on (\d{4}-\d{2}-\d{2}))?$)");
  auto t = text::trim(answer);
  while (!t.empty() && t.back() == '.') t = text::trim(t.substr(0, t.size() - 1));
  std::vector<AnswerItem> out;
  if (t.empty() || text::lower(t) == kNoInformation) return out;
  for (const auto& raw : text::split(t, ';')) {
    std::string piece(text::trim(raw));
    if (piece.empty()) continue;
    std::smatch m;
    if (!std::regex_match(piece, m, item_re)) continue;
    AnswerItem it;
    it.name = m[1].str();
    if (m[2].matched) it.qualifier = m[2].str();
    if (m[3].matched) {
      it.date = Date::parse_iso(m[3].str());
      if (!it.date) it.name = piece;  // not a real date; keep the text whole
    }
    out.push_back(std::move(it));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mock generator

MockGeneratorOptions MockGeneratorOptions::parse_modes(std::string_view modes, std::uint64_t seed) {
  MockGeneratorOptions o;
  o.seed = seed;
  for (const auto& raw : text::split(modes, ',')) {
    auto m = text::lower(text::trim(raw));
    if (m.empty() || m == "none") continue;
    if (m == "inconsistent") o.inconsistent = true;
    else if (m == "hallucinate") o.hallucinate = true;
    else if (m == "confuse_generic") o.confuse_generic = true;
    else if (m == "all") o.inconsistent = o.hallucinate = o.confuse_generic = true;
    else throw Error("unknown anomaly mode: " + m);
  }
  return o;
}

MockGenerator::MockGenerator(const OntologyGraph& onto, MockGeneratorOptions options)
    : onto_(onto), options_(options), builder_(onto) {}

namespace {

bool in_subtree(const OntologyGraph& onto, const std::string& id, std::string_view root) {
  return onto.contains(root) && onto.is_subtype_of(id, root);
}

void push_unique(std::vector<AnswerItem>& items, AnswerItem it) {
  if (std::find(items.begin(), items.end(), it) == items.end()) items.push_back(std::move(it));
}

}  // namespace

std::vector<AnswerItem> MockGenerator::distractors(const PatientGraph& pg) const {
  std::vector<AnswerItem> out;
  for (const auto& o : pg.objects)
    if (o.axis == SemanticAxis::Other &&
        (in_subtree(onto_, o.concept_id, "adverse_effect") || in_subtree(onto_, o.concept_id, "supportive_medication")) &&
        o.concept_id != "adverse_effect" && o.concept_id != "supportive_medication")
      push_unique(out, {onto_.at(o.concept_id).preferred_name, std::nullopt, std::nullopt});
  if (out.empty())
    for (std::string_view id : {"nausea", "fatigue", "ondansetron"})
      if (onto_.contains(id)) out.push_back({onto_.at(id).preferred_name, std::nullopt, std::nullopt});
  return out;
}

std::optional<AnswerItem> MockGenerator::hallucination(SemanticAxis axis, const PatientGraph& pg) const {
  std::vector<std::string> pool;
  for (const auto& id : onto_.concepts_on(axis))
    if (onto_.is_leaf(id)) pool.push_back(id);
  if (pool.empty()) return std::nullopt;
  auto h = text::fnv1a(std::string(axis_name(axis)), text::fnv1a(std::to_string(options_.seed)));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& id = pool[(h + i) % pool.size()];
    bool present = std::any_of(pg.objects.begin(), pg.objects.end(),
                               [&](const MedicalObject& o) { return onto_.compatible(o.concept_id, id); });
    if (!present) return AnswerItem{onto_.at(id).preferred_name, std::nullopt, std::nullopt};
  }
  return std::nullopt;
}

std::string MockGenerator::complete(const GenerationRequest& request) const {
  const auto& targets = question_targets(request.question_index);
  if (request.context.empty()) return std::string(kNoInformation);

  std::vector<ObjectGraph> graphs;
  for (const auto& doc : chunks_to_documents(request.context))
    graphs.push_back(ground_tag_graph(builder_.build(doc), onto_));
  PatientGraph pg = consolidate_patient(graphs, onto_);
  VariableReadout readout = extract_variables(pg, onto_);

  auto has = [&](VariableKind v) { return std::find(targets.begin(), targets.end(), v) != targets.end(); };
  if (options_.confuse_generic && has(V::Medications)) return format_answer(distractors(pg));

  std::vector<AnswerItem> items;
  for (VariableKind v : targets) {
    if (v == V::CancerDiagnosisDate) {
      const auto& d = readout[V::CancerDiagnosisDate];
      const auto& n = readout[V::Neoplasm];
      if (!d.empty() && !n.empty())
        push_unique(items, {onto_.at(n.front().value.text).preferred_name, std::nullopt, d.front().date});
      continue;
    }
    for (const auto& rv : readout[v]) {
      AnswerItem it{onto_.at(rv.value.text).preferred_name, rv.qualifier, rv.date};
      if (v == V::Neoplasm && options_.inconsistent && request.question_index == 2) {
        // Contradict the cohort the summary reports.
        std::string other = in_subtree(onto_, rv.value.text, "breast_cancer") ? "lung_cancer" : "breast_cancer";
        if (onto_.contains(other)) it = {onto_.at(other).preferred_name, std::nullopt, std::nullopt};
      }
      push_unique(items, std::move(it));
    }
  }
  if (options_.hallucinate && !items.empty()) {
    for (VariableKind v : targets) {
      if (!is_multi_valued(v)) continue;
      if (auto extra = hallucination(variable_axis(v), pg)) push_unique(items, std::move(*extra));
      break;
    }
  }
  return format_answer(items);
}

// ---------------------------------------------------------------------------
// Answers downstream

std::vector<ClinicalDocument> answers_to_documents(std::vector<GeneratedAnswer> answers,
                                                   const std::string& patient_id) {
  std::stable_sort(answers.begin(), answers.end(),
                   [](const GeneratedAnswer& a, const GeneratedAnswer& b) { return a.question_index < b.question_index; });
  std::vector<ClinicalDocument> out;
  for (const auto& a : answers) {
    check_index(a.question_index);
    char num[8];
    std::snprintf(num, sizeof num, "%02d", a.question_index);
    out.push_back({patient_id + "/answer-" + num, patient_id, DocumentCategory::LlmAnswer, a.answer_text,
                   a.question_index});
  }
  return out;
}

VariableReadout readout_from_answers(const std::vector<GeneratedAnswer>& answers, const OntologyGraph& onto) {
  VariableReadout out;
  for (VariableKind v : kAllVariables) {
    int key = answer_key_question(v);
    auto a = std::find_if(answers.begin(), answers.end(),
                          [&](const GeneratedAnswer& g) { return g.question_index == key; });
    if (a == answers.end()) continue;
    const auto& targets = question_targets(key);
    for (const auto& item : parse_answer(a->answer_text)) {
      if (v == V::CancerDiagnosisDate) {
        if (item.date && out[v].empty()) out[v].push_back({ValueRef::literal(item.date->iso()), item.date, std::nullopt, 1.0});
        continue;
      }
      ValueRef ref;
      if (auto id = onto.lookup(item.name, variable_axis(v))) {
        ref = ValueRef::concept_ref(*id);
      } else {
        bool elsewhere = std::any_of(targets.begin(), targets.end(), [&](VariableKind t) {
          return t != v && onto.lookup(item.name, variable_axis(t)).has_value();
        });
        if (targets.size() > 1 || elsewhere) continue;
        ref = ValueRef::literal(item.name);
      }
      ReadoutValue rv{ref, item.date, item.qualifier, 1.0};
      if (!is_multi_valued(v)) {
        if (out[v].empty()) out[v].push_back(std::move(rv));
        continue;
      }
      if (std::find(out[v].begin(), out[v].end(), rv) == out[v].end()) out[v].push_back(std::move(rv));
    }
  }
  return out;
}

}  // namespace medrec
