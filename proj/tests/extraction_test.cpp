#include "medrec/extraction.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

namespace medrec {
namespace {

const OntologyGraph& bundled() {
  static const OntologyGraph g = load_ontology(std::string(MEDREC_DATA_DIR) + "/ontology.txt");
  return g;
}

ClinicalDocument doc(std::string text) {
  ClinicalDocument d;
  d.doc_id = "d1";
  d.patient_id = "P1";
  d.category = DocumentCategory::SoapNote;
  d.text = std::move(text);
  return d;
}

TEST(TagEntities, LongestMatchWins) {
  std::istringstream in("cancer|Neoplasm|cancer||\nlung_cancer|Neoplasm|lung cancer|cancer|\n");
  auto onto = parse_ontology(in);
  auto ms = tag_entities(doc("History of Lung  Cancer."), onto);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].surface, "Lung  Cancer");
  EXPECT_EQ(ms[0].candidates.front().concept_id, "lung_cancer");
  EXPECT_EQ(ms[0].axis, SemanticAxis::Neoplasm);
}

TEST(TagEntities, RespectsWordBoundaries) {
  auto ms = tag_entities(doc("precancerous cancers"), bundled());
  EXPECT_TRUE(ms.empty());
}

TEST(TagEntities, TnmCodesBecomeStageMentions) {
  auto ms = tag_entities(doc("pT2 N1 M0"), bundled());
  ASSERT_EQ(ms.size(), 3u);
  EXPECT_EQ(ms[0].axis, SemanticAxis::TStage);
  EXPECT_EQ(ms[1].axis, SemanticAxis::NStage);
  EXPECT_EQ(ms[2].axis, SemanticAxis::MStage);
  EXPECT_EQ(ms[0].candidates.front().concept_id, "t2");
  EXPECT_EQ(ms[1].candidates.front().concept_id, "n1");
  EXPECT_EQ(ms[2].candidates.front().concept_id, "m0");
}

TEST(TagEntities, CombinedAndPrefixedTnm) {
  auto ms = tag_entities(doc("Staging ypT2aN1M0 and cT4d, Tis. Tissue M5"), bundled());
  std::vector<std::string> got;
  for (const auto& m : ms) got.push_back(m.surface + "=" + m.candidates.front().concept_id);
  EXPECT_EQ(got, (std::vector<std::string>{"ypT2a=t2a", "N1=n1", "M0=m0", "cT4d=t4d", "Tis=tis"}));
}

TEST(TagEntities, DatePatterns) {
  auto ms = tag_entities(doc("on 2019-03-04, 3/7/2020 and March 5, 2021 but not 2021-02-30 or 13/01/2020"), bundled());
  std::vector<std::string> got;
  for (const auto& m : ms) {
    ASSERT_TRUE(m.is_date());
    got.push_back(m.date->iso());
  }
  EXPECT_EQ(got, (std::vector<std::string>{"2019-03-04", "2020-03-07", "2021-03-05"}));
}

TEST(TagEntities, LeapDays) {
  EXPECT_EQ(find_dates("2020-02-29").size(), 1u);
  EXPECT_EQ(find_dates("2019-02-29").size(), 0u);
  EXPECT_EQ(find_dates("1900-02-29").size(), 0u);
  EXPECT_EQ(find_dates("Feb. 29, 2000").size(), 1u);
}

TEST(ClassifyRelations, AdjacentDateAttaches) {
  auto d = doc("lobectomy performed on 2020-01-15");
  auto g = build_tag_graph(d, bundled());
  ASSERT_EQ(g.mentions.size(), 2u);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges[0].kind, RelationKind::HasDate);
  EXPECT_EQ(g.find(g.edges[0].from_mention)->surface, "lobectomy");
  EXPECT_TRUE(g.find(g.edges[0].to_mention)->is_date());
}

TEST(ClassifyRelations, DistantSentencesDoNotRelate) {
  std::string filler(2000, 'x');
  for (std::size_t i = 5; i < filler.size(); i += 6) filler[i] = ' ';
  auto g = build_tag_graph(doc("lobectomy. " + filler + ". 2020-01-15"), bundled());
  EXPECT_EQ(g.mentions.size(), 2u);
  EXPECT_TRUE(g.edges.empty());
}

TEST(ClassifyRelations, DateBeforeEntity) {
  auto g = build_tag_graph(doc("On 2020-01-15, the patient underwent right hemicolectomy."), bundled());
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.find(g.edges[0].from_mention)->surface, "right hemicolectomy");
}

TEST(ClassifyRelations, InterpretationAndMethod) {
  auto g = build_tag_graph(doc("EGFR: positive by NGS."), bundled());
  std::vector<std::string> kinds;
  for (const auto& e : g.edges) kinds.emplace_back(relation_kind_name(e.kind));
  std::sort(kinds.begin(), kinds.end());
  EXPECT_EQ(kinds, (std::vector<std::string>{"HasInterpretation", "HasMethod"}));
}

TEST(BuildTagGraph, EmptyAndSmallGraphs) {
  auto empty = build_tag_graph(doc("Nothing of interest here."), bundled());
  EXPECT_TRUE(empty.mentions.empty());
  EXPECT_TRUE(empty.edges.empty());
  auto small = build_tag_graph(doc("lung cancer diagnosed on 2019-03-04"), bundled());
  EXPECT_EQ(small.mentions.size(), 2u);
  EXPECT_EQ(small.edges.size(), 1u);
}

TEST(RelationRules, ParseAndOverride) {
  std::istringstream bad("HasDate|*|Date|([|1.0\n");
  EXPECT_THROW(parse_relation_rules(bad), ParseError);
  std::istringstream bad_weight("HasDate|*|Date|x|2\n");
  EXPECT_THROW(parse_relation_rules(bad_weight), ParseError);
  std::istringstream custom("# only one rule\nHasDate|Surgery|Date| (?:at|on) |0.5\n");
  auto rules = parse_relation_rules(custom);
  ASSERT_EQ(rules.size(), 1u);
  TagGraphBuilder builder(bundled(), nullptr, rules);
  auto g = builder.build(doc("lobectomy at 2020-01-15; CT scan on 2020-01-16"));
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_DOUBLE_EQ(g.edges[0].score, 0.5);
}

// ---------------------------------------------------------------------------
// Randomized properties

const std::vector<std::string> kFiller = {"lorem", "ipsum", "dolor", "sit", "amet", ",", ";", "\n", "zq", "quux"};

struct Injected {
  std::size_t begin, end;
  std::string concept_id;
};

TEST(TagEntitiesProperty, RecoversInjectedMentions) {
  const auto& onto = bundled();
  auto entries = onto.surface_entries();
  std::erase_if(entries, [&](const auto& e) {
    auto axis = onto.at(e.second).axis;
    return axis == SemanticAxis::TStage || axis == SemanticAxis::NStage || axis == SemanticAxis::MStage;
  });
  LexiconTagger tagger(onto);
  std::mt19937_64 rng(99);
  for (int round = 0; round < 300; ++round) {
    std::string text;
    std::vector<Injected> injected;
    int n = 1 + static_cast<int>(rng() % 12);
    for (int k = 0; k < n; ++k) {
      text += kFiller[rng() % kFiller.size()] + " ";
      const auto& [surface, id] = entries[rng() % entries.size()];
      std::string written = surface;
      if (rng() % 2) {
        for (char& c : written) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      }
      injected.push_back({text.size(), text.size() + written.size(), id});
      text += written + " ";
    }
    auto ms = tagger.tag(text);
    ASSERT_EQ(ms.size(), injected.size()) << text;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      EXPECT_EQ(ms[i].begin, injected[i].begin);
      EXPECT_EQ(ms[i].end, injected[i].end);
      bool found = false;
      for (const auto& c : ms[i].candidates) found |= c.concept_id == injected[i].concept_id;
      EXPECT_TRUE(found) << injected[i].concept_id;
    }
  }
}

std::string random_document(std::mt19937_64& rng, const std::vector<std::pair<std::string, std::string>>& entries) {
  static const std::vector<std::string> extra = {"pT2a", "N1", "M0", "2020-01-15", "3/4/2021", "June 1, 2019",
                                                 "on", "performed on", "(", ")", ":", ".", "-", "was", "by"};
  std::string text;
  int n = 5 + static_cast<int>(rng() % 40);
  for (int k = 0; k < n; ++k) {
    switch (rng() % 3) {
      case 0: text += kFiller[rng() % kFiller.size()]; break;
      case 1: text += extra[rng() % extra.size()]; break;
      default: text += entries[rng() % entries.size()].first; break;
    }
    text += (rng() % 5 == 0) ? "" : " ";
  }
  return text;
}

TEST(TagEntitiesProperty, TrieMatchesNaiveScan) {
  const auto& onto = bundled();
  auto entries = onto.surface_entries();
  LexiconTagger trie(onto);
  NaiveScanTagger naive(onto);
  std::mt19937_64 rng(5);
  for (int round = 0; round < 150; ++round) {
    auto text = random_document(rng, entries);
    ASSERT_EQ(trie.tag(text), naive.tag(text)) << text;
  }
}

TEST(TagGraphProperty, StructuralInvariants) {
  const auto& onto = bundled();
  auto entries = onto.surface_entries();
  TagGraphBuilder builder(onto);
  std::mt19937_64 rng(17);
  for (int round = 0; round < 300; ++round) {
    auto d = doc(random_document(rng, entries));
    auto g = builder.build(d);
    ASSERT_EQ(g, builder.build(d));
    std::size_t last_end = 0;
    for (std::size_t i = 0; i < g.mentions.size(); ++i) {
      const auto& m = g.mentions[i];
      ASSERT_EQ(m.mention_id, "m" + std::to_string(i));
      ASSERT_LE(last_end, m.begin);
      ASSERT_LT(m.begin, m.end);
      ASSERT_LE(m.end, d.text.size());
      ASSERT_EQ(m.surface, d.text.substr(m.begin, m.end - m.begin));
      ASSERT_NE(m.is_date(), !m.candidates.empty());
      for (std::size_t c = 1; c < m.candidates.size(); ++c)
        ASSERT_GE(m.candidates[c - 1].score, m.candidates[c].score);
      last_end = m.end;
    }
    for (const auto& e : g.edges) {
      ASSERT_NE(g.find(e.from_mention), nullptr);
      ASSERT_NE(g.find(e.to_mention), nullptr);
      ASSERT_NE(e.from_mention, e.to_mention);
      ASSERT_GE(e.score, 0.0);
      ASSERT_LE(e.score, 1.0);
    }
  }
}

}  // namespace
}  // namespace medrec
