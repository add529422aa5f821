#include "medrec/llm.hpp"

#include <gtest/gtest.h>

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "medrec/synthetic.hpp"
#include "medrec/text.hpp"

namespace medrec {
namespace {

const OntologyGraph& bundled() {
  static const OntologyGraph g = load_ontology(std::string(MEDREC_DATA_DIR) + "/ontology.txt");
  return g;
}

ClinicalDocument doc(std::string id, std::string text, DocumentCategory cat = DocumentCategory::SoapNote) {
  return {std::move(id), "P", cat, std::move(text), 0};
}

std::string words(std::size_t n, std::size_t sentence_every = 0) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += (i % 17 == 0) ? "\n" : " ";
    s += "w" + std::to_string(i);
    if (sentence_every && (i + 1) % sentence_every == 0) s += ".";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Chunking

TEST(Chunking, SmallDocumentIsOneChunk) {
  auto chunks = chunk_documents({doc("d", words(10))}, 3000);
  ASSERT_EQ(chunks.size(), 1u);
  EXPECT_EQ(chunks[0].token_count, 10u);
  EXPECT_EQ(chunks[0].text, words(10));
  EXPECT_EQ(chunks[0].chunk_id, "d#0");
  EXPECT_EQ(chunks[0].category, DocumentCategory::SoapNote);
}

TEST(Chunking, SixThousandTokensMakeTwoChunks) {
  auto chunks = chunk_documents({doc("d", words(6000))}, 3000);
  ASSERT_EQ(chunks.size(), 2u);
  for (const auto& c : chunks) EXPECT_LE(c.token_count, 3000u);
  EXPECT_EQ(chunks[0].token_count + chunks[1].token_count, 6000u);
}

TEST(Chunking, PrefersSentenceEndInLastTenthOfBudget) {
  // Sentence ends after every 7th token; budget 100 allows cuts at tokens 91..100.
  auto chunks = chunk_documents({doc("d", words(250, 7))}, 100);
  ASSERT_GE(chunks.size(), 3u);
  EXPECT_EQ(chunks[0].token_count, 98u);
  EXPECT_EQ(chunks[0].text.back(), '.');
  // No sentence end within the window: hard cut at the budget.
  auto hard = chunk_documents({doc("d", words(250, 50))}, 100);
  EXPECT_EQ(hard[0].token_count, 100u);
}

TEST(Chunking, ZeroBudgetIsAnError) { EXPECT_THROW(chunk_documents({doc("d", "x")}, 0), Error); }

TEST(Chunking, RandomDocumentsReconstructAndRespectBudget) {
  std::mt19937_64 rng(5);
  const std::string alphabet = "abc. !?\n\t";
  for (int round = 0; round < 1000; ++round) {
    std::vector<ClinicalDocument> docs;
    std::size_t ndocs = 1 + rng() % 4;
    for (std::size_t d = 0; d < ndocs; ++d) {
      std::string t;
      std::size_t len = rng() % 400;
      for (std::size_t i = 0; i < len; ++i) t += alphabet[rng() % alphabet.size()];
      docs.push_back(doc("doc" + std::to_string(d), t));
    }
    std::size_t budget = 1 + rng() % 40;
    auto chunks = chunk_documents(docs, budget);
    for (const auto& d : docs) {
      std::string joined;
      std::vector<std::string> expect_tokens, got_tokens;
      std::size_t ordinal = 0;
      for (const auto& c : chunks) {
        if (c.source_doc_id != d.doc_id) continue;
        ASSERT_LE(c.token_count, budget);
        ASSERT_FALSE(c.text.empty());
        ASSERT_EQ(c.ordinal, ordinal++);
        ASSERT_EQ(c.token_count, count_tokens(c.text));
        ASSERT_NE(d.text.find(c.text), std::string::npos);
        joined += c.text + " ";
      }
      for (const auto& s : text::whitespace_tokens(d.text)) expect_tokens.push_back(d.text.substr(s.begin, s.end - s.begin));
      for (const auto& s : text::whitespace_tokens(joined)) got_tokens.push_back(joined.substr(s.begin, s.end - s.begin));
      ASSERT_EQ(got_tokens, expect_tokens);
    }
  }
}

TEST(Chunking, DedupKeepsFirstOccurrence) {
  auto chunks = chunk_documents({doc("a", words(30)), doc("b", words(5))}, 10);
  std::vector<Chunk> doubled = {chunks[1], chunks[0], chunks[1], chunks[3], chunks[0]};
  auto d = dedup_chunks(doubled);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0].chunk_id, chunks[1].chunk_id);
  EXPECT_EQ(d[1].chunk_id, chunks[0].chunk_id);
  EXPECT_EQ(d[2].chunk_id, chunks[3].chunk_id);
}

// ---------------------------------------------------------------------------
// Embedding and retrieval

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

TEST(MockEmbedder, DeterministicUnitVectors) {
  MockEmbedder e;
  auto v = embed({"lung cancer", "lung cancer", "a b", "a b a", "EGFR was mutated on 2020-01-02"}, e);
  EXPECT_EQ(v[0], v[1]);
  for (const auto& x : v) {
    EXPECT_EQ(x.size(), MockEmbedder::kDimension);
    EXPECT_NEAR(norm(x), 1.0, 1e-9);
  }
  double c = cosine(v[2], v[3]);
  EXPECT_GT(c, 0.0);
  EXPECT_LT(c, 1.0);
  // (1,1)/sqrt2 . (2,1)/sqrt5
  EXPECT_NEAR(c, 3.0 / std::sqrt(10.0), 1e-12);
  EXPECT_NEAR(cosine(v[0], embed({"LUNG, cancer!"}, e)[0]), 1.0, 1e-12);
}

TEST(MockEmbedder, TokenlessTextIsZero) {
  auto v = embed({"  ...  "}, MockEmbedder{})[0];
  EXPECT_EQ(norm(v), 0.0);
  EXPECT_EQ(cosine(v, v), 0.0);
}

class FixedEmbedder : public Embedder {
 public:
  std::vector<std::vector<double>> out;
  std::vector<std::vector<double>> embed_batch(const std::vector<std::string>&) const override { return out; }
  std::string backend_id() const override { return "fixed"; }
};

TEST(Embed, RejectsDimensionMismatchAndWrongCount) {
  FixedEmbedder f;
  f.out = {{1, 0}, {1, 0, 0}};
  EXPECT_THROW(embed({"a", "b"}, f), BackendError);
  f.out = {{1, 0}};
  EXPECT_THROW(embed({"a", "b"}, f), BackendError);
}

TEST(Retrieval, SingleChunkIsReturnedWhateverK) {
  auto chunks = chunk_documents({doc("d", "only chunk")}, 100);
  auto top = retrieve_top_k("anything", chunks, MockEmbedder{}, 4);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0], chunks[0]);
}

TEST(Retrieval, RanksBySimilarity) {
  auto chunks = chunk_documents({doc("a", "the weather was mild"), doc("b", "cisplatin was started for lung cancer"),
                                 doc("c", "lung cancer")},
                                100);
  auto top = retrieve_top_k("what lung cancer medications", chunks, MockEmbedder{}, 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].source_doc_id, "c");
  EXPECT_EQ(top[1].source_doc_id, "b");
}

// Oracle: repeated linear scans for the best remaining chunk.
std::vector<std::size_t> scan_oracle(const std::vector<double>& q, const std::vector<std::vector<double>>& vecs,
                                     const std::vector<Chunk>& chunks, std::size_t k) {
  std::vector<double> sim;
  for (const auto& v : vecs) {
    double dot = 0, nq = 0, nv = 0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += q[i] * v[i], nq += q[i] * q[i], nv += v[i] * v[i];
    sim.push_back(nq == 0 || nv == 0 ? 0.0 : dot / (std::sqrt(nq) * std::sqrt(nv)));
  }
  std::vector<bool> used(chunks.size(), false);
  std::vector<std::size_t> out;
  while (out.size() < std::min(k, chunks.size())) {
    std::size_t best = chunks.size();
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      if (used[i]) continue;
      if (best == chunks.size() || sim[i] > sim[best] ||
          (sim[i] == sim[best] && std::tie(chunks[i].source_doc_id, chunks[i].ordinal) <
                                      std::tie(chunks[best].source_doc_id, chunks[best].ordinal)))
        best = i;
    }
    used[best] = true;
    out.push_back(best);
  }
  return out;
}

TEST(Retrieval, MatchesScanOracleOnRandomCorpora) {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 300; ++round) {
    std::size_t n = 1 + rng() % 200;
    std::size_t dim = 1 + rng() % 6;
    std::vector<Chunk> chunks;
    std::vector<std::vector<double>> vecs;
    for (std::size_t i = 0; i < n; ++i) {
      Chunk c;
      c.source_doc_id = "doc" + std::to_string(rng() % 7);
      c.ordinal = i;  // (doc, ordinal) keys are unique
      c.chunk_id = c.source_doc_id + "#" + std::to_string(c.ordinal);
      chunks.push_back(c);
      std::vector<double> v(dim);
      for (auto& x : v) x = static_cast<double>(rng() % 3);  // small values force ties
      vecs.push_back(v);
    }
    std::vector<double> q(dim);
    for (auto& x : q) x = static_cast<double>(rng() % 3);
    for (std::size_t k : {1u, 4u, 10u}) ASSERT_EQ(rank_top_k(q, vecs, chunks, k), scan_oracle(q, vecs, chunks, k));
  }
}

// ---------------------------------------------------------------------------
// Questions

TEST(QuestionBank, BundledFileMatchesReferenceList) {
  auto bank = QuestionBank::load(std::string(MEDREC_DATA_DIR) + "/questions.txt");
  ASSERT_EQ(bank.size(), 31u);
  // Independent transcription source: the numbered list in paper.md.
  std::ifstream in(std::string(MEDREC_SOURCE_DIR) + "/paper.md");
  ASSERT_TRUE(in);
  std::vector<std::string> reference;
  std::string line;
  std::regex item(R"(^- \((\d+)\) (.*)$)");
  while (std::getline(in, line) && line != "A.2 Questions") {
  }
  while (std::getline(in, line) && line != "A.3 Medical Variables") {
    std::smatch m;
    if (std::regex_match(line, m, item)) {
      ASSERT_EQ(std::stoi(m[1].str()), static_cast<int>(reference.size()) + 1);
      reference.push_back(m[2].str());
    }
  }
  EXPECT_EQ(bank.questions(), reference);
  EXPECT_EQ(bank.question(1), "Summarize the patient.");
  EXPECT_EQ(bank.question(20), "What is the date of diagnosing the patient’s response to the cancer-related "
                               "medications and treatments?");
}

TEST(QuestionBank, EveryVariableIsTargeted) {
  std::set<VariableKind> seen;
  for (int i = 1; i <= kQuestionCount; ++i) {
    EXPECT_FALSE(question_targets(i).empty());
    seen.insert(question_targets(i).begin(), question_targets(i).end());
  }
  EXPECT_EQ(seen.size(), kVariableCount);
  for (VariableKind v : kAllVariables) {
    const auto& t = question_targets(answer_key_question(v));
    EXPECT_NE(std::find(t.begin(), t.end(), v), t.end()) << variable_name(v);
  }
  EXPECT_THROW(question_targets(0), Error);
  EXPECT_THROW(question_targets(32), Error);
}

TEST(QuestionBank, WrongCountIsRejected) {
  std::string many;
  for (int i = 0; i < 32; ++i) many += "q" + std::to_string(i) + "?\n";
  std::istringstream too_many(many);
  EXPECT_THROW(QuestionBank::parse(too_many), ParseError);
  std::string few;
  for (int i = 0; i < 30; ++i) few += "q" + std::to_string(i) + "?\n";
  std::istringstream too_few(few);
  EXPECT_THROW(QuestionBank::parse(too_few), ParseError);
}

// ---------------------------------------------------------------------------
// Generation

TEST(AnswerFormat, RoundTrip) {
  std::vector<AnswerItem> items = {{"EGFR", "mutated", Date{2020, 1, 2}},
                                   {"cisplatin", std::nullopt, Date{2020, 3, 4}},
                                   {"stage IIIA", std::nullopt, std::nullopt},
                                   {"HER2", "not amplified", std::nullopt}};
  auto text = format_answer(items);
  EXPECT_EQ(text, "EGFR was mutated on 2020-01-02; cisplatin on 2020-03-04; stage IIIA; HER2 was not amplified");
  EXPECT_EQ(parse_answer(text), items);
  EXPECT_EQ(parse_answer(text + "."), items);
  EXPECT_EQ(format_answer({}), kNoInformation);
  EXPECT_TRUE(parse_answer("No information found.").empty());
  EXPECT_EQ(parse_answer("x on 2020-02-30")[0].name, "x on 2020-02-30");
}

TEST(Prompt, OverflowDropsLowestRankedChunks) {
  auto chunks = chunk_documents({doc("a", words(50)), doc("b", words(50)), doc("c", words(50))}, 100);
  std::string q = "What cancer does the patient have?";
  auto base = count_tokens(build_prompt(q, {}));
  auto one = count_tokens(build_prompt(q, {chunks[0]}));
  auto fitted = fit_context(q, chunks, one + 20);
  ASSERT_EQ(fitted.size(), 1u);
  EXPECT_EQ(fitted[0], chunks[0]);
  EXPECT_EQ(fit_context(q, chunks, 100000).size(), 3u);
  EXPECT_TRUE(fit_context(q, chunks, base).empty());
  EXPECT_THROW(fit_context(q, chunks, base - 1), Error);
  EXPECT_NE(build_prompt(q, chunks).find(kPromptVersion), std::string::npos);
}

class FailingGenerator : public Generator {
 public:
  std::string complete(const GenerationRequest&) const override { throw BackendError("boom", "down", true); }
  std::string backend_id() const override { return "boom"; }
};

TEST(GenerateAnswer, EmptyContextAndBackendFailure) {
  FailingGenerator g;
  auto a = generate_answer(3, "What is the morphology of the cancer?", {}, g, 0.67, 1000);
  EXPECT_EQ(a.answer_text, kNoInformation);
  EXPECT_EQ(a.temperature, 0.67);
  try {
    generate_answer(5, "q", chunk_documents({doc("d", "text")}, 10), g, 1.0, 1000);
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.question_index(), 5);
  }
}

std::string ask(const MockGenerator& g, int qi, const std::vector<Chunk>& ctx) {
  return generate_answer(qi, "q", ctx, g, 0.0, 100000).answer_text;
}

TEST(MockGenerator, AnswersFromContext) {
  MockGenerator g(bundled());
  auto ctx = chunk_documents({doc("d", "The patient was diagnosed with lung cancer.")}, 3000);
  EXPECT_EQ(ask(g, 2, ctx), "lung cancer");
  EXPECT_EQ(ask(g, 10, ctx), kNoInformation);
  auto meds = chunk_documents({doc("n", "Started cisplatin on 2019-05-01. Pemetrexed was started on 6/2/2019.")}, 3000);
  EXPECT_EQ(ask(g, 11, meds), "cisplatin on 2019-05-01; pemetrexed on 2019-06-02");
  auto lab = chunk_documents({doc("l", "On 2019-03-10, EGFR was mutated by PCR.", DocumentCategory::LabResults)}, 3000);
  EXPECT_EQ(ask(g, 22, lab), "EGFR was mutated on 2019-03-10");
}

TEST(MockGenerator, InconsistentModeContradictsSummary) {
  MockGenerator g(bundled(), MockGeneratorOptions::parse_modes("inconsistent"));
  auto ctx = chunk_documents({doc("d", "The patient was diagnosed with lung cancer.")}, 3000);
  EXPECT_EQ(ask(g, 1, ctx), "lung cancer");
  EXPECT_EQ(ask(g, 2, ctx), "breast cancer");
  auto breast = chunk_documents({doc("d", "Known breast cancer.")}, 3000);
  EXPECT_EQ(ask(g, 2, breast), "lung cancer");
}

TEST(MockGenerator, ConfuseGenericReturnsDistractorList) {
  auto ctx = chunk_documents(
      {doc("n", "Started cisplatin on 2019-05-01."),
       doc("h", "Common side effects during treatment include nausea, fatigue and hair loss. Medicines such as "
                "ondansetron may be prescribed.",
           DocumentCategory::Other)},
      3000);
  MockGenerator plain(bundled());
  EXPECT_EQ(ask(plain, 10, ctx), "cisplatin on 2019-05-01");
  MockGenerator g(bundled(), MockGeneratorOptions::parse_modes("confuse_generic"));
  auto items = parse_answer(ask(g, 10, ctx));
  std::set<std::string> names;
  for (const auto& it : items) names.insert(it.name);
  EXPECT_EQ(names, (std::set<std::string>{"nausea", "fatigue", "hair loss", "ondansetron"}));
  EXPECT_EQ(ask(g, 2, ctx), kNoInformation);
}

TEST(MockGenerator, HallucinateAddsConceptAbsentFromContext) {
  auto ctx = chunk_documents({doc("n", "Started cisplatin on 2019-05-01.")}, 3000);
  MockGenerator g(bundled(), MockGeneratorOptions::parse_modes("hallucinate", 4));
  auto items = parse_answer(ask(g, 10, ctx));
  ASSERT_EQ(items.size(), 2u);
  EXPECT_EQ(items[0].name, "cisplatin");
  auto id = bundled().lookup(items[1].name, SemanticAxis::Medication);
  ASSERT_TRUE(id.has_value());
  EXPECT_FALSE(bundled().compatible(*id, "cisplatin"));
  EXPECT_EQ(ctx[0].text.find(items[1].name), std::string::npos);
  // Pure function of input, seed and mode.
  EXPECT_EQ(ask(g, 10, ctx), ask(MockGenerator(bundled(), MockGeneratorOptions::parse_modes("hallucinate", 4)), 10, ctx));
  EXPECT_THROW(MockGeneratorOptions::parse_modes("dream"), Error);
}

TEST(MockGenerator, ConcurrentCallsAgree) {
  auto corpus = generate_synthetic_corpus({.seed = 2, .n_patients = 1}, bundled());
  std::vector<ClinicalDocument> docs;
  for (const auto& d : corpus.patients[0].documents) docs.push_back(doc(d.source_id, d.text, d.category));
  auto chunks = chunk_documents(docs, 200);
  MockGenerator g(bundled(), MockGeneratorOptions::parse_modes("all", 3));
  std::vector<std::string> serial, parallel(kQuestionCount);
  for (int q = 1; q <= kQuestionCount; ++q) serial.push_back(ask(g, q, chunks));
  std::vector<std::thread> pool;
  for (int q = 1; q <= kQuestionCount; ++q)
    pool.emplace_back([&, q] { parallel[static_cast<std::size_t>(q - 1)] = ask(g, q, chunks); });
  for (auto& t : pool) t.join();
  EXPECT_EQ(serial, parallel);
}

TEST(AnswerDocuments, OrderedWrappedAndRoundTrip) {
  EXPECT_TRUE(answers_to_documents({}, "P").empty());
  std::vector<GeneratedAnswer> answers;
  for (int q = kQuestionCount; q >= 1; --q) answers.push_back({q, "a" + std::to_string(q), "mock", 0.0});
  auto docs = answers_to_documents(answers, "P7");
  ASSERT_EQ(docs.size(), 31u);
  for (int q = 1; q <= kQuestionCount; ++q) {
    const auto& d = docs[static_cast<std::size_t>(q - 1)];
    EXPECT_EQ(d.question_index, q);
    EXPECT_EQ(d.category, DocumentCategory::LlmAnswer);
    EXPECT_EQ(d.text, "a" + std::to_string(q));
    EXPECT_EQ(d.patient_id, "P7");
  }
  EXPECT_EQ(docs[4].doc_id, "P7/answer-05");
  EXPECT_THROW(answers_to_documents({{0, "x", "m", 0.0}}, "P"), Error);
}

TEST(StandaloneParse, ReadsKeyQuestions) {
  std::vector<GeneratedAnswer> answers = {
      {2, "non-small cell lung cancer on 2019-03-04", "m", 0},
      {4, "T2a; N1; M0", "m", 0},
      {7, "non-small cell lung cancer on 2019-03-04", "m", 0},
      {11, "cisplatin on 2019-05-01; nausea", "m", 0},
      {22, "EGFR was mutated on 2019-03-10", "m", 0},
      {10, "carboplatin", "m", 0},  // not a key question
  };
  auto r = readout_from_answers(answers, bundled());
  ASSERT_EQ(r[VariableKind::Neoplasm].size(), 1u);
  EXPECT_EQ(r[VariableKind::Neoplasm][0].value, ValueRef::concept_ref("non_small_cell_lung_cancer"));
  EXPECT_EQ(r[VariableKind::TStage][0].value, ValueRef::concept_ref("t2a"));
  EXPECT_EQ(r[VariableKind::NStage][0].value, ValueRef::concept_ref("n1"));
  EXPECT_EQ(r[VariableKind::MStage][0].value, ValueRef::concept_ref("m0"));
  EXPECT_EQ(r[VariableKind::CancerDiagnosisDate][0].value, ValueRef::literal("2019-03-04"));
  ASSERT_EQ(r[VariableKind::Medications].size(), 2u);
  EXPECT_EQ(r[VariableKind::Medications][0].date, (Date{2019, 5, 1}));
  EXPECT_EQ(r[VariableKind::Medications][1].value, ValueRef::literal("nausea"));
  EXPECT_EQ(r[VariableKind::TestedBiomarkers][0].qualifier, "mutated");
  EXPECT_TRUE(r[VariableKind::Surgeries].empty());
}

// ---------------------------------------------------------------------------
// HTTP backends

class LocalServer {
 public:
  LocalServer() {
    server_.Post("/v1/embed", [](const httplib::Request& req, httplib::Response& res) {
      auto body = nlohmann::json::parse(req.body);
      nlohmann::json vectors = nlohmann::json::array();
      for (const auto& t : body.at("texts")) vectors.push_back({static_cast<double>(t.get<std::string>().size()), 1.0});
      res.set_content(nlohmann::json{{"vectors", vectors}}.dump(), "application/json");
    });
    server_.Post("/v1/generate", [](const httplib::Request& req, httplib::Response& res) {
      auto body = nlohmann::json::parse(req.body);
      std::string text = "t=" + std::to_string(body.at("temperature").get<double>()).substr(0, 4) +
                         (body.at("prompt").get<std::string>().find("Question: Q?") != std::string::npos ? " ok" : "");
      res.set_content(nlohmann::json{{"text", text}}.dump(), "application/json");
    });
    server_.Post("/bad/embed", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("{\"vectors\": 3}", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  std::string url(const std::string& prefix) const { return "http://127.0.0.1:" + std::to_string(port_) + prefix; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(HttpBackends, WireContract) {
  LocalServer server;
  HttpEmbedder e(server.url("/v1"));
  auto v = embed({"abc", "de"}, e);
  EXPECT_EQ(v, (std::vector<std::vector<double>>{{3, 1}, {2, 1}}));
  HttpGenerator g(server.url("/v1/"));
  auto a = generate_answer(9, "Q?", chunk_documents({doc("d", "context")}, 10), g, 0.67, 1000);
  EXPECT_EQ(a.answer_text, "t=0.67 ok");
  EXPECT_EQ(a.backend_id, "http:" + server.url("/v1/"));
  try {
    embed({"x"}, HttpEmbedder(server.url("/bad")));
    FAIL();
  } catch (const BackendError& err) {
    EXPECT_FALSE(err.retriable());
  }
}

TEST(HttpBackends, UnreachableIsRetriable) {
  try {
    // Nothing listens on port 1; the connection is refused.
    embed({"x"}, HttpEmbedder("http://127.0.0.1:1", 1));
    FAIL();
  } catch (const BackendError& err) {
    EXPECT_TRUE(err.retriable());
    EXPECT_NE(err.backend_id().find("127.0.0.1"), std::string::npos);
  }
  EXPECT_THROW(HttpEmbedder("ftp://host"), Error);
}

TEST(EmbedderBoundaryScorer, CutsBetweenUnrelatedHalves) {
  auto scorer = std::make_shared<EmbedderBoundaryScorer>(std::make_shared<MockEmbedder>());
  std::string a, b;
  for (int i = 0; i < 20; ++i) a += "tumor biopsy carcinoma margins specimen\n";
  for (int i = 0; i < 20; ++i) b += "insurance billing signature policy holder\n";
  SegmenterConfig cfg;
  cfg.scorer_window = 200;
  auto segs = segment_documents({"r", a + b, (a + b).size()}, "P", scorer.get(), cfg);
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0].text, text::trim(a));
  EXPECT_GT(scorer->similarity("lung cancer", "lung cancer"), 0.999);
}

}  // namespace
}  // namespace medrec
