#include "medrec/preprocess.hpp"

#include <gtest/gtest.h>

#include <random>

#include "medrec/synthetic.hpp"
#include "medrec/text.hpp"

namespace medrec {
namespace {

const OntologyGraph& bundled() {
  static const OntologyGraph g = load_ontology(std::string(MEDREC_DATA_DIR) + "/ontology.txt");
  return g;
}

const Gazetteer& gazetteer() {
  static const Gazetteer g = Gazetteer::load(std::string(MEDREC_DATA_DIR) + "/gazetteer.txt");
  return g;
}

TEST(Deidentify, NameAndPhone) {
  auto r = deidentify("Dr. Smith called 555-0100", Gazetteer({"Smith"}));
  EXPECT_EQ(r.redacted_text, "Dr. [REDACTED:NAME] called [REDACTED:PHONE]");
  ASSERT_EQ(r.phi_spans.size(), 2u);
  EXPECT_EQ(r.phi_spans[0], (PhiSpan{4, 9, "NAME"}));
  EXPECT_EQ(r.phi_spans[1], (PhiSpan{17, 25, "PHONE"}));
}

TEST(Deidentify, DatesArePreserved) {
  Gazetteer g({"Smith"});
  for (std::string t : {"Diagnosed 2019-03-04", "Seen 3/4/2019 and March 4, 2019."})
    EXPECT_EQ(deidentify(t, g).redacted_text, t);
}

TEST(Deidentify, BuiltInPatterns) {
  auto r = deidentify(
      "SSN: 123-45-6789\nMRN: 4839201\nEmail: jo.doe@example.org\nAddress: 42 Birch Lane\nPhone: (617) 555-0142",
      Gazetteer());
  EXPECT_EQ(r.redacted_text,
            "SSN: [REDACTED:SSN]\nMRN: [REDACTED:MRN]\nEmail: [REDACTED:EMAIL]\nAddress: [REDACTED:ADDRESS]\n"
            "Phone: [REDACTED:PHONE]");
}

TEST(Deidentify, EmptyAndCaseInsensitiveNames) {
  EXPECT_EQ(deidentify("", gazetteer()).redacted_text, "");
  EXPECT_EQ(deidentify("ABERNATHY and abernathy, not Abernathys", gazetteer()).redacted_text,
            "[REDACTED:NAME] and [REDACTED:NAME], not Abernathys");
}

std::string random_phi(std::mt19937_64& rng, std::string& kind) {
  auto d = [&](int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += static_cast<char>('0' + rng() % 10);
    return s;
  };
  const auto& names = synthetic_person_names();
  switch (rng() % 6) {
    case 0: kind = "NAME"; return names[rng() % names.size()];
    case 1: kind = "PHONE"; return rng() % 2 ? d(3) + "-" + d(4) : "(" + d(3) + ") " + d(3) + "-" + d(4);
    case 2: kind = "SSN"; return d(3) + "-" + d(2) + "-" + d(4);
    case 3: kind = "MRN"; return d(7);
    case 4: kind = "EMAIL"; return "user" + d(2) + "@clinic.example.com";
    default: kind = "ADDRESS"; return std::to_string(1 + rng() % 999) + " Cedar Street";
  }
}

const std::vector<std::string> kWords = {"the", "patient", "lung", "cancer", "reports", "was", "seen", ",",
                                         ".",   "\n",      "on",   "2020-05-06", "3/7/2021", "pain", "stage", "IIIA"};

TEST(DeidentifyProperty, InjectedPhiIsAlwaysRedacted) {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 600; ++round) {
    std::string t;
    struct Injected {
      std::size_t begin, end;
      std::string value, kind;
    };
    std::vector<Injected> injected;
    int n = 1 + static_cast<int>(rng() % 8);
    for (int k = 0; k < n; ++k) {
      for (int w = static_cast<int>(rng() % 4); w >= 0; --w) t += kWords[rng() % kWords.size()] + " ";
      std::string kind;
      auto phi = random_phi(rng, kind);
      if (kind == "MRN") t += "MRN: ";
      injected.push_back({t.size(), t.size() + phi.size(), phi, kind});
      t += phi + " ";
    }
    auto r = deidentify(t, gazetteer());
    for (const auto& inj : injected) {
      bool covered = std::any_of(r.phi_spans.begin(), r.phi_spans.end(),
                                 [&](const PhiSpan& s) { return s.begin <= inj.begin && inj.end <= s.end; });
      ASSERT_TRUE(covered) << inj.kind << " '" << inj.value << "' in: " << t;
      if (inj.kind != "NAME") ASSERT_EQ(r.redacted_text.find(inj.value), std::string::npos);
    }
    for (std::size_t i = 1; i < r.phi_spans.size(); ++i) ASSERT_LE(r.phi_spans[i - 1].end, r.phi_spans[i].begin);
    for (const auto& s : r.phi_spans) ASSERT_LE(s.end, t.size());
    for (std::string date : {"2020-05-06", "3/7/2021"}) {
      if (t.find(date) != std::string::npos) ASSERT_NE(r.redacted_text.find(date), std::string::npos);
    }
    ASSERT_EQ(deidentify(r.redacted_text, gazetteer()).redacted_text, r.redacted_text);
  }
}

TEST(DeidentifyProperty, IdempotentOnArbitraryText) {
  const std::string alphabet = "abcXYZ0123456789-.@()[]: \n";
  std::vector<std::string> pieces = {"Jasper", "555-", "0100", "MRN", "[REDACTED:NAME]", "Street", "Oak", "@x.org"};
  std::mt19937_64 rng(77);
  for (int round = 0; round < 1000; ++round) {
    std::string t;
    int n = static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) {
      if (rng() % 4 == 0) t += pieces[rng() % pieces.size()];
      else t += alphabet[rng() % alphabet.size()];
    }
    auto once = deidentify(t, gazetteer()).redacted_text;
    ASSERT_EQ(deidentify(once, gazetteer()).redacted_text, once) << t;
  }
}

std::string filler(std::size_t chars, char tag) {
  std::string s;
  while (s.size() < chars) s += std::string("Line of body text ") + tag + " continues here.\n";
  return s;
}

RawDocumentText raw(std::string t) { return {"r", t, t.size()}; }

TEST(Segment, TwoReportHeaders) {
  auto text = "PATHOLOGY REPORT\n" + filler(250, 'a') + "RADIOLOGY REPORT\n" + filler(250, 'b');
  auto docs = segment_documents(raw(text), "P");
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_TRUE(docs[0].text.starts_with("PATHOLOGY REPORT"));
  EXPECT_TRUE(docs[1].text.starts_with("RADIOLOGY REPORT"));
  EXPECT_EQ(docs[1].doc_id, "P/r/1");
}

TEST(Segment, NoMarkersGivesIdentity) {
  auto text = filler(900, 'x');
  text.pop_back();
  auto docs = segment_documents(raw(text), "P");
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].text, text);
}

TEST(Segment, PageMarkersAndFormFeeds) {
  auto body = filler(250, 'a');
  EXPECT_EQ(segment_documents(raw(body + "Page 1 of 2\n" + body + "Page 2 of 2\n" + body), "P").size(), 2u);
  EXPECT_EQ(segment_documents(raw(body + "Page 1 of 3\n" + body), "P").size(), 1u);
  EXPECT_EQ(segment_documents(raw(body + "\f" + body + "\f" + body), "P").size(), 3u);
}

TEST(Segment, ShortFragmentsMerge) {
  auto text = filler(300, 'a') + "LAB RESULTS\nshort\n" + "PROGRESS NOTE\n" + filler(300, 'b');
  auto docs = segment_documents(raw(text), "P");
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_NE(docs[0].text.find("LAB RESULTS"), std::string::npos);
  SegmenterConfig tiny;
  tiny.min_length = 1;
  EXPECT_EQ(segment_documents(raw(text), "P", nullptr, tiny).size(), 3u);
}

class MarkerScorer : public BoundaryScorer {
 public:
  double similarity(std::string_view, std::string_view right) const override {
    return right.starts_with("TOPIC") ? 0.1 : 0.9;
  }
};

TEST(Segment, ScorerAddsCuts) {
  auto text = filler(300, 'a') + "TOPIC change\n" + filler(300, 'b');
  EXPECT_EQ(segment_documents(raw(text), "P").size(), 1u);
  MarkerScorer scorer;
  EXPECT_EQ(segment_documents(raw(text), "P", &scorer).size(), 2u);
}

TEST(Segment, AssembledSyntheticDocumentsSplitBack) {
  auto corpus = generate_synthetic_corpus({.seed = 5, .n_patients = 3, .distractors = true}, bundled());
  std::mt19937_64 rng(5);
  for (int round = 0; round < 50; ++round) {
    const auto& p = corpus.patients[rng() % corpus.patients.size()];
    std::vector<std::string> parts;
    std::string text;
    for (int k = 0; k < 3; ++k) {
      parts.emplace_back(text::trim(p.documents[rng() % p.documents.size()].text));
      text += parts.back() + (rng() % 2 ? "\n\n" : "\n");
    }
    auto docs = segment_documents(raw(text), p.patient_id);
    ASSERT_EQ(docs.size(), 3u) << text;
    for (int k = 0; k < 3; ++k) EXPECT_EQ(docs[k].text, parts[k]);
  }
}

TEST(SegmentProperty, ReconstructsInput) {
  const std::vector<std::string> tokens = {"word", "PATHOLOGY REPORT\n", "Page 1 of 1\n", "Page 1 of 2\n", "\f",
                                           "\n", " ", "text here.", "PROGRESS NOTE\n", "x"};
  std::mt19937_64 rng(31);
  for (int round = 0; round < 1000; ++round) {
    std::string t;
    int n = static_cast<int>(rng() % 200);
    for (int i = 0; i < n; ++i) t += tokens[rng() % tokens.size()];
    SegmenterConfig cfg;
    cfg.min_length = rng() % 80;
    auto docs = segment_documents(raw(t), "P", nullptr, cfg);
    std::size_t pos = 0;
    std::string between;
    for (const auto& d : docs) {
      ASSERT_FALSE(d.text.empty());
      auto at = t.find(d.text, pos);
      ASSERT_NE(at, std::string::npos);
      between += t.substr(pos, at - pos);
      pos = at + d.text.size();
    }
    between += t.substr(pos);
    ASSERT_TRUE(text::trim(between).empty()) << t;
    ASSERT_EQ(docs, segment_documents(raw(t), "P", nullptr, cfg));
  }
}

ClinicalDocument doc(std::string text) {
  ClinicalDocument d;
  d.text = std::move(text);
  return d;
}

TEST(Classify, CueExamples) {
  EXPECT_EQ(classify_document(doc("The specimen shows histology of interest; margins clear.")), DocumentCategory::Pathology);
  EXPECT_EQ(classify_document(doc("Insurance authorization form. Policy holder signature required.")),
            DocumentCategory::Administrative);
  EXPECT_EQ(classify_document(doc("Subjective: fine. Objective: fine. Assessment: stable. Plan: continue.")),
            DocumentCategory::SoapNote);
  EXPECT_EQ(classify_document(doc("Hemoglobin within the reference range.")), DocumentCategory::LabResults);
  EXPECT_EQ(classify_document(doc("Nothing to see.")), DocumentCategory::Other);
  EXPECT_EQ(classify_document(doc("")), DocumentCategory::Other);
}

TEST(Classify, TiesFollowPrecedence) {
  EXPECT_EQ(classify_document(doc("specimen laboratory")), DocumentCategory::LabResults);
  EXPECT_EQ(classify_document(doc("specimen reference range")), DocumentCategory::Pathology);
  EXPECT_EQ(classify_document(doc("insurance subjective")), DocumentCategory::SoapNote);
}

TEST(Classify, SyntheticCorpusAccuracy) {
  auto corpus = generate_synthetic_corpus({.seed = 9, .n_patients = 10, .distractors = true}, bundled());
  PatternDeidentifier deid(gazetteer());
  std::size_t total = 0, correct = 0;
  for (const auto& p : corpus.patients) {
    PatientRecordSet rs;
    rs.patient_id = p.patient_id;
    for (const auto& d : p.documents) rs.records.push_back({d.source_id, d.text, d.text.size()});
    auto docs = preprocess_patient(rs, deid);
    ASSERT_EQ(docs.size(), p.documents.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
      ++total;
      correct += docs[i].category == p.documents[i].category;
      ASSERT_EQ(docs[i].category, classify_document(docs[i]));
      for (const auto& phi : p.documents[i].phi) EXPECT_EQ(docs[i].text.find(phi), std::string::npos) << phi;
    }
  }
  EXPECT_GE(static_cast<double>(correct) / static_cast<double>(total), 0.95);
}

}  // namespace
}  // namespace medrec
