#include "medrec/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "medrec/text.hpp"

namespace medrec {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Setups

namespace {

struct SetupNames {
  std::string_view name, flag;
};
constexpr std::array<SetupNames, 5> kSetupNames = {{
    {"NLP_REASONING", "nlp"},
    {"RET_NLP_REASONING", "ret"},
    {"GEN_NLP_REASONING", "gen"},
    {"RET_GEN_NLP_REASONING", "retgen"},
    {"STANDALONE_LLM", "standalone"},
}};

}  // namespace

std::string_view setup_name(SetupKind setup) { return kSetupNames[static_cast<std::size_t>(setup)].name; }
std::string_view setup_flag(SetupKind setup) { return kSetupNames[static_cast<std::size_t>(setup)].flag; }

std::optional<SetupKind> parse_setup(std::string_view text) {
  for (std::size_t i = 0; i < kSetupNames.size(); ++i)
    if (text == kSetupNames[i].name || text == kSetupNames[i].flag) return static_cast<SetupKind>(i);
  return std::nullopt;
}

bool needs_embedder(SetupKind setup) { return setup != SetupKind::NlpReasoning; }

bool needs_generator(SetupKind setup) {
  return setup == SetupKind::GenNlpReasoning || setup == SetupKind::RetGenNlpReasoning ||
         setup == SetupKind::StandaloneLlm;
}

void validate_setup(const SetupOptions& o, const Backends& b) {
  auto name = std::string(setup_name(o.setup));
  if (needs_embedder(o.setup) && !b.embedder) throw Error(name + " requires an embedder backend");
  if (needs_generator(o.setup) && !b.generator) throw Error(name + " requires a generator backend");
  if (o.chunk_size < 1) throw Error("chunk size must be at least 1");
  if (o.k < 1) throw Error("k must be at least 1");
  if (!(o.tau >= 0.0 && o.tau <= 1.0)) throw Error("tau must lie in [0, 1]");
  if (!(o.temperature >= 0.0)) throw Error("temperature must be non-negative");
}

void ChunkStats::merge(const ChunkStats& o) {
  chunk_size = std::max(chunk_size, o.chunk_size);
  k = std::max(k, o.k);
  chunks += o.chunks;
  max_chunk_tokens = std::max(max_chunk_tokens, o.max_chunk_tokens);
  questions += o.questions;
  max_per_question = std::max(max_per_question, o.max_per_question);
  max_before_dedup = std::max(max_before_dedup, o.max_before_dedup);
  max_after_dedup = std::max(max_after_dedup, o.max_after_dedup);
}

bool ChunkStats::disciplined() const {
  return max_chunk_tokens <= chunk_size && max_per_question <= k &&
         max_before_dedup <= static_cast<std::size_t>(kQuestionCount) * k && max_after_dedup <= max_before_dedup;
}

namespace {

PatientGraph reason_with(const TagGraphBuilder& builder, const std::vector<ClinicalDocument>& docs,
                         const OntologyGraph& onto, const std::string& patient_id) {
  std::vector<ObjectGraph> graphs;
  graphs.reserve(docs.size());
  for (const auto& d : docs) graphs.push_back(ground_tag_graph(builder.build(d), onto));
  return consolidate_patient(graphs, onto, patient_id);
}

}  // namespace

PatientGraph reason_over(const std::vector<ClinicalDocument>& docs, const OntologyGraph& onto,
                         const std::string& patient_id) {
  return reason_with(TagGraphBuilder(onto), docs, onto, patient_id);
}

PatientRun run_patient(const PatientRecordSet& patient, const SetupOptions& o, const Backends& b,
                       const PipelineContext& ctx) {
  PatientRun run;
  run.patient_id = patient.patient_id;
  run.chunk_stats.chunk_size = o.chunk_size;
  run.chunk_stats.k = o.k;
  ReasoningConfig rc{o.tau};
  TagGraphBuilder builder(ctx.onto);

  auto docs = preprocess_patient(patient, ctx.deidentifier, o.preprocess);
  if (o.setup == SetupKind::NlpReasoning) {
    run.readout = extract_variables(reason_with(builder, docs, ctx.onto, patient.patient_id), ctx.onto, rc);
    return run;
  }

  auto chunks = chunk_documents(docs, o.chunk_size);
  run.chunk_stats.chunks = chunks.size();
  for (const auto& c : chunks) run.chunk_stats.max_chunk_tokens = std::max(run.chunk_stats.max_chunk_tokens, c.token_count);
  ChunkIndex index(std::move(chunks), *b.embedder);

  std::vector<Chunk> retrieved;
  for (int q = 1; q <= kQuestionCount; ++q) {
    const auto& question = ctx.questions.question(q);
    auto top = index.top_k(question, o.k);
    ++run.chunk_stats.questions;
    run.chunk_stats.max_per_question = std::max(run.chunk_stats.max_per_question, top.size());
    retrieved.insert(retrieved.end(), top.begin(), top.end());
    if (needs_generator(o.setup))
      run.answers.push_back(generate_answer(q, question, std::move(top), *b.generator, o.temperature, o.context_budget));
  }
  run.chunk_stats.max_before_dedup = retrieved.size();
  auto unique = dedup_chunks(retrieved);
  run.chunk_stats.max_after_dedup = unique.size();

  if (o.setup == SetupKind::StandaloneLlm) {
    run.readout = readout_from_answers(run.answers, ctx.onto);
    return run;
  }
  std::vector<ClinicalDocument> input;
  if (o.setup == SetupKind::RetNlpReasoning || o.setup == SetupKind::RetGenNlpReasoning)
    input = chunks_to_documents(unique);
  if (o.setup == SetupKind::GenNlpReasoning || o.setup == SetupKind::RetGenNlpReasoning)
    for (auto& d : answers_to_documents(run.answers, patient.patient_id)) input.push_back(std::move(d));
  run.readout = extract_variables(reason_with(builder, input, ctx.onto, patient.patient_id), ctx.onto, rc);
  return run;
}

SetupRun run_setup(const std::vector<PatientRecordSet>& patients, const SetupOptions& o, const Backends& b,
                   const PipelineContext& ctx) {
  validate_setup(o, b);
  SetupRun out;
  out.setup = o.setup;
  out.patients.resize(patients.size());
  out.chunk_stats.chunk_size = o.chunk_size;
  out.chunk_stats.k = o.k;

  std::size_t workers = o.workers ? o.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, patients.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < patients.size();) {
      try {
        out.patients[i] = run_patient(patients[i], o, b, ctx);
      } catch (const std::exception& e) {
        PatientRun failed;
        failed.patient_id = patients[i].patient_id;
        failed.error = e.what();
        out.patients[i] = std::move(failed);
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& p : out.patients) out.chunk_stats.merge(p.chunk_stats);
  return out;
}

// ---------------------------------------------------------------------------
// Scoring

namespace {

bool value_matches(const ReadoutValue& p, const GoldValue& g, const OntologyGraph& onto) {
  if (p.value.kind != g.value.kind) return false;
  if (p.value.is_concept()) {
    if (!onto.contains(p.value.text) || !onto.is_subtype_of(p.value.text, g.value.text)) return false;
  } else if (p.value.text != g.value.text) {
    return false;
  }
  return !g.date || p.date == g.date;
}

}  // namespace

std::array<MatchCounts, kVariableCount> match_predictions(const VariableReadout& pred, const PatientGold& gold,
                                                          const OntologyGraph& onto) {
  std::array<MatchCounts, kVariableCount> out{};
  for (VariableKind v : kAllVariables) {
    const auto& gv = gold[v];
    std::vector<const ReadoutValue*> ps;
    for (const auto& p : pred[v]) ps.push_back(&p);
    std::stable_sort(ps.begin(), ps.end(),
                     [](const ReadoutValue* a, const ReadoutValue* b) { return a->confidence > b->confidence; });
    std::vector<bool> used(gv.size(), false);
    auto& c = out[index_of(v)];
    for (const ReadoutValue* p : ps) {
      std::size_t hit = gv.size();
      for (std::size_t g = 0; g < gv.size() && hit == gv.size(); ++g)
        if (!used[g] && p->value == gv[g].value && value_matches(*p, gv[g], onto)) hit = g;
      for (std::size_t g = 0; g < gv.size() && hit == gv.size(); ++g)
        if (!used[g] && value_matches(*p, gv[g], onto)) hit = g;
      if (hit == gv.size()) {
        ++c.fp;
      } else {
        used[hit] = true;
        ++c.tp;
      }
    }
    c.fn = static_cast<std::size_t>(std::count(used.begin(), used.end(), false));
  }
  return out;
}

double f1_score(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

VariableMetrics compute_metrics(VariableKind variable, const MatchCounts& c) {
  VariableMetrics m;
  m.variable = variable;
  m.tp = c.tp;
  m.fp = c.fp;
  m.fn = c.fn;
  auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

double macro_average(const std::vector<double>& f1s) {
  if (f1s.size() != kVariableCount)
    throw Error("macro average needs " + std::to_string(kVariableCount) + " values, got " + std::to_string(f1s.size()));
  double sum = 0.0;
  for (double f : f1s) sum += f;
  return sum / static_cast<double>(kVariableCount);
}

double macro_average(const std::vector<VariableMetrics>& rows) {
  std::vector<double> f1s;
  for (const auto& r : rows) f1s.push_back(r.f1);
  return macro_average(f1s);
}

SetupReport score_setup(const SetupRun& run, const GoldStandard& gold, const OntologyGraph& onto) {
  std::map<std::string, const PatientRun*> by_id;
  for (const auto& p : run.patients) by_id[p.patient_id] = &p;
  std::array<MatchCounts, kVariableCount> totals{};
  const VariableReadout empty;
  for (const auto& [pid, pg] : gold) {
    auto it = by_id.find(pid);
    const VariableReadout& pred = (it == by_id.end() || it->second->error) ? empty : it->second->readout;
    auto counts = match_predictions(pred, pg, onto);
    for (std::size_t i = 0; i < kVariableCount; ++i) totals[i] += counts[i];
  }
  SetupReport r;
  r.setup = run.setup;
  for (VariableKind v : kAllVariables) r.rows.push_back(compute_metrics(v, totals[index_of(v)]));
  r.macro_f1 = macro_average(r.rows);
  r.patients = run.patients.size();
  for (const auto& p : run.patients)
    if (p.error) r.failures.push_back({p.patient_id, *p.error});
  r.chunk_stats = run.chunk_stats;
  return r;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

json stats_json(const ChunkStats& s) {
  return json{{"chunk_size", s.chunk_size},         {"k", s.k},
              {"chunks", s.chunks},                 {"max_chunk_tokens", s.max_chunk_tokens},
              {"questions", s.questions},           {"max_per_question", s.max_per_question},
              {"max_before_dedup", s.max_before_dedup}, {"max_after_dedup", s.max_after_dedup}};
}

ChunkStats stats_from(const json& j) {
  ChunkStats s;
  s.chunk_size = j.at("chunk_size");
  s.k = j.at("k");
  s.chunks = j.at("chunks");
  s.max_chunk_tokens = j.at("max_chunk_tokens");
  s.questions = j.at("questions");
  s.max_per_question = j.at("max_per_question");
  s.max_before_dedup = j.at("max_before_dedup");
  s.max_after_dedup = j.at("max_after_dedup");
  return s;
}

json setups_json(const EvalReport& report) {
  json setups = json::array();
  for (const auto& s : report.setups) {
    json rows = json::array();
    for (const auto& m : s.rows)
      rows.push_back({{"variable", variable_name(m.variable)},
                      {"tp", m.tp},
                      {"fp", m.fp},
                      {"fn", m.fn},
                      {"precision", m.precision},
                      {"recall", m.recall},
                      {"f1", m.f1}});
    json failures = json::array();
    for (const auto& f : s.failures) failures.push_back({{"patient_id", f.patient_id}, {"message", f.message}});
    setups.push_back({{"setup", setup_name(s.setup)},
                      {"patients", s.patients},
                      {"macro_f1", s.macro_f1},
                      {"rows", rows},
                      {"failures", failures},
                      {"chunk_stats", stats_json(s.chunk_stats)}});
  }
  return setups;
}

std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << body;
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

std::string metrics_payload(const EvalReport& report) { return setups_json(report).dump(2); }

std::string report_json(const EvalReport& report) {
  json config = json::object();
  for (const auto& [k, v] : report.config) config[k] = v;
  json doc{{"schema", EvalReport::kSchema},
           {"config", config},
           {"setups", setups_json(report)},
           {"warnings", report.warnings},
           {"metadata", {{"started_at", report.started_at}, {"finished_at", report.finished_at}}}};
  return doc.dump(2) + "\n";
}

EvalReport parse_report_json(std::string_view text) {
  EvalReport r;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
  if (doc.value("schema", "") != EvalReport::kSchema) throw Error("unsupported report schema");
  try {
    for (const auto& [k, v] : doc.at("config").items()) r.config.emplace_back(k, v.get<std::string>());
    for (const auto& s : doc.at("setups")) {
      SetupReport sr;
      auto setup = parse_setup(s.at("setup").get<std::string>());
      if (!setup) throw Error("unknown setup in report");
      sr.setup = *setup;
      sr.patients = s.at("patients");
      sr.macro_f1 = s.at("macro_f1");
      for (const auto& row : s.at("rows")) {
        VariableMetrics m;
        auto v = parse_variable(row.at("variable").get<std::string>());
        if (!v) throw Error("unknown variable in report");
        m.variable = *v;
        m.tp = row.at("tp");
        m.fp = row.at("fp");
        m.fn = row.at("fn");
        m.precision = row.at("precision");
        m.recall = row.at("recall");
        m.f1 = row.at("f1");
        sr.rows.push_back(m);
      }
      for (const auto& f : s.at("failures")) sr.failures.push_back({f.at("patient_id"), f.at("message")});
      sr.chunk_stats = stats_from(s.at("chunk_stats"));
      r.setups.push_back(std::move(sr));
    }
    for (const auto& w : doc.at("warnings")) r.warnings.push_back(w);
    r.started_at = doc.at("metadata").at("started_at");
    r.finished_at = doc.at("metadata").at("finished_at");
  } catch (const json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string report_table(const EvalReport& report) {
  std::ostringstream out;
  auto cell = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%8.2f", 100.0 * v);
    return std::string(buf);
  };
  auto section = [&](const char* title, auto pick) {
    out << title << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-22s", "Setup");
    out << buf;
    for (VariableKind v : kAllVariables) {
      std::string n(variable_name(v));
      std::snprintf(buf, sizeof buf, " %8.8s", n.c_str());
      out << buf;
    }
    out << "    Macro\n";
    for (const auto& s : report.setups) {
      std::snprintf(buf, sizeof buf, "%-22s", std::string(setup_name(s.setup)).c_str());
      out << buf;
      std::vector<double> vals;
      for (const auto& m : s.rows) {
        vals.push_back(pick(m));
        out << " " << cell(vals.back());
      }
      out << " " << cell(macro_average(vals)) << "\n";
    }
    out << "\n";
  };
  out << "medrec evaluation (" << EvalReport::kSchema << ")\n\n";
  section("F1 (%)", [](const VariableMetrics& m) { return m.f1; });
  section("Precision (%)", [](const VariableMetrics& m) { return m.precision; });
  section("Recall (%)", [](const VariableMetrics& m) { return m.recall; });
  for (const auto& s : report.setups) {
    out << setup_name(s.setup) << ": " << s.patients << " patients, " << s.failures.size() << " failed\n";
    for (const auto& f : s.failures) out << "  " << f.patient_id << ": " << f.message << "\n";
  }
  return out.str();
}

void emit_report(const EvalReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "report.json", report_json(report));
  write_file(dir / "report.txt", report_table(report));
}

void write_predictions(const std::vector<SetupRun>& runs, const std::filesystem::path& path) {
  json doc = json::array();
  for (const auto& run : runs) {
    json patients = json::array();
    for (const auto& p : run.patients) {
      json vars = json::object();
      for (VariableKind v : kAllVariables) {
        json vals = json::array();
        for (const auto& rv : p.readout[v]) {
          json e{{"value", rv.value.encode()}, {"confidence", rv.confidence}};
          if (rv.date) e["date"] = rv.date->iso();
          if (rv.qualifier) e["qualifier"] = *rv.qualifier;
          vals.push_back(std::move(e));
        }
        vars[std::string(variable_name(v))] = std::move(vals);
      }
      json answers = json::array();
      for (const auto& a : p.answers) answers.push_back({{"question", a.question_index}, {"text", a.answer_text}});
      json entry{{"patient_id", p.patient_id}, {"variables", vars}};
      if (!answers.empty()) entry["answers"] = answers;
      if (p.error) entry["error"] = *p.error;
      patients.push_back(std::move(entry));
    }
    doc.push_back({{"setup", setup_name(run.setup)}, {"patients", patients}});
  }
  write_file(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// End-to-end run from files

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  auto num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return std::string(buf);
  };
  return {
      {"setup", std::string(setup_flag(setup))},
      {"embedder", embedder},
      {"generator", generator},
      {"anomaly_modes", anomaly_modes},
      {"chunk_size", std::to_string(chunk_size)},
      {"k", std::to_string(k)},
      {"tau", num(tau)},
      {"temperature", num(temperature)},
      {"context_budget", std::to_string(context_budget)},
      {"seed", std::to_string(seed)},
      {"embedding_segmenter", embedding_segmenter ? "on" : "off"},
      {"segment_min_len", std::to_string(segment_min_len)},
      {"corpus", corpus.string()},
      {"ontology", ontology.string()},
      {"gold", gold.string()},
      {"questions", questions.string()},
      {"gazetteer", gazetteer.string()},
  };
}

Backends make_backends(const RunConfig& cfg, const OntologyGraph& onto) {
  Backends b;
  auto http_url = [](const std::string& spec) -> std::optional<std::string> {
    if (spec.rfind("http:", 0) == 0 && spec.rfind("http://", 0) != 0) return spec.substr(5);
    if (spec.rfind("http://", 0) == 0) return spec;
    return std::nullopt;
  };
  if (cfg.embedder == "mock") b.embedder = std::make_shared<MockEmbedder>();
  else if (auto url = http_url(cfg.embedder)) b.embedder = std::make_shared<HttpEmbedder>(*url);
  else if (cfg.embedder != "none") throw Error("unknown embedder backend: " + cfg.embedder);

  if (cfg.generator == "mock")
    b.generator = std::make_shared<MockGenerator>(onto, MockGeneratorOptions::parse_modes(cfg.anomaly_modes, cfg.seed));
  else if (auto url = http_url(cfg.generator)) b.generator = std::make_shared<HttpGenerator>(*url);
  else if (cfg.generator != "none") throw Error("unknown generator backend: " + cfg.generator);
  return b;
}

RunOutput run_from_config(const RunConfig& cfg) {
  RunOutput out;
  out.report.started_at = utc_now();
  out.report.config = cfg.echo();

  auto onto = load_ontology(cfg.ontology);
  auto backends = make_backends(cfg, onto);

  SetupOptions o;
  o.setup = cfg.setup;
  o.chunk_size = cfg.chunk_size;
  o.k = cfg.k;
  o.tau = cfg.tau;
  o.temperature = cfg.temperature;
  o.context_budget = cfg.context_budget;
  o.workers = cfg.workers;
  o.preprocess.segmenter.min_length = cfg.segment_min_len;
  if (cfg.embedding_segmenter) {
    if (!backends.embedder) throw Error("the embedding segmenter needs an embedder backend");
    o.preprocess.scorer = std::make_shared<EmbedderBoundaryScorer>(backends.embedder);
  }
  validate_setup(o, backends);

  auto questions = QuestionBank::load(cfg.questions);
  Gazetteer gazetteer = cfg.gazetteer.empty() ? Gazetteer{} : Gazetteer::load(cfg.gazetteer);
  PatternDeidentifier deid(gazetteer);
  auto gold = load_gold_standard(cfg.gold, onto);
  auto corpus = load_patient_corpus(cfg.corpus);
  for (const auto& w : corpus.warnings)
    out.report.warnings.push_back(w.patient_id + (w.source_id.empty() ? "" : "/" + w.source_id) + ": " + w.message);
  for (const auto& p : corpus.patients)
    if (!gold.count(p.patient_id)) out.report.warnings.push_back(p.patient_id + ": no gold entry; not scored");

  PipelineContext ctx{onto, questions, deid};
  out.run = run_setup(corpus.patients, o, backends, ctx);
  out.report.setups.push_back(score_setup(out.run, gold, onto));
  out.report.finished_at = utc_now();

  if (!cfg.out.empty()) {
    emit_report(out.report, cfg.out);
    write_predictions({out.run}, cfg.out / "predictions.json");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Published table consistency

PaperTables PaperTables::parse(std::istream& in, const std::string& source_name) {
  PaperTables t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line[0] == '#') continue;
    auto f = text::split(line, '\t');
    if (f.size() < 4) throw ParseError(source_name, lineno, "expected kind, setup, model and values");
    Row r{f[0], f[1], f[2], {}};
    std::size_t want = r.kind == "MacroF1" ? 1 : kVariableCount;
    if (f.size() - 3 != want)
      throw ParseError(source_name, lineno, "expected " + std::to_string(want) + " values for " + r.kind);
    for (std::size_t i = 3; i < f.size(); ++i) {
      try {
        std::size_t used = 0;
        r.values.push_back(std::stod(f[i], &used));
        if (used != f[i].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError(source_name, lineno, "not a number: " + f[i]);
      }
    }
    t.rows.push_back(std::move(r));
  }
  return t;
}

PaperTables PaperTables::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open tables: " + path.string());
  return parse(in, path.string());
}

const PaperTables::Row* PaperTables::find(std::string_view kind, std::string_view setup,
                                          std::string_view model) const {
  for (const auto& r : rows)
    if (r.kind == kind && r.setup == setup && r.model == model) return &r;
  return nullptr;
}

std::vector<CellCheck> check_f1_cells(const PaperTables& tables, double tolerance) {
  std::vector<CellCheck> out;
  for (const auto& f : tables.rows) {
    if (f.kind != "F1") continue;
    const auto* p = tables.find("Precision", f.setup, f.model);
    const auto* r = tables.find("Recall", f.setup, f.model);
    if (!p || !r) continue;
    for (VariableKind v : kAllVariables) {
      std::size_t i = index_of(v);
      CellCheck c{f.setup, f.model, v, p->values[i], r->values[i], f.values[i], f1_score(p->values[i], r->values[i]),
                  false};
      c.pass = std::abs(c.computed_f1 - c.reported_f1) <= tolerance;
      out.push_back(c);
    }
  }
  return out;
}

std::vector<MacroCheck> check_macro_rows(const PaperTables& tables, double tolerance) {
  std::vector<MacroCheck> out;
  for (const auto& m : tables.rows) {
    if (m.kind != "MacroF1") continue;
    const auto* f = tables.find("F1", m.setup, m.model);
    if (!f) throw Error("no F1 row for macro entry " + m.setup + "/" + m.model);
    MacroCheck c{m.setup, m.model, m.values[0], macro_average(f->values), false};
    c.pass = std::abs(c.computed - c.reported) <= tolerance;
    out.push_back(c);
  }
  return out;
}

}  // namespace medrec
