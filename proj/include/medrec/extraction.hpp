#pragma once

#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "medrec/document.hpp"
#include "medrec/ontology.hpp"

namespace medrec {

struct Candidate {
  std::string concept_id;
  double score = 0.0;

  bool operator==(const Candidate&) const = default;
};

// A tagged span. Concept mentions carry an axis and ranked candidates;
// date mentions carry a parsed date and no candidates.
struct EntityMention {
  std::string mention_id;
  std::string surface;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::optional<SemanticAxis> axis;
  std::optional<Date> date;
  std::vector<Candidate> candidates;

  bool is_date() const { return date.has_value(); }
  bool operator==(const EntityMention&) const = default;
};

enum class RelationKind : std::uint8_t {
  HasDate,
  HasStage,
  HasMorphology,
  HasInterpretation,
  HasMethod,
  TreatedWith,
  ResultedIn,
};

std::string_view relation_kind_name(RelationKind kind);
std::optional<RelationKind> parse_relation_kind(std::string_view name);

struct RelationEdge {
  std::string from_mention;
  std::string to_mention;
  RelationKind kind = RelationKind::HasDate;
  double score = 0.0;

  bool operator==(const RelationEdge&) const = default;
};

struct TagGraph {
  std::string doc_id;
  DocumentCategory category = DocumentCategory::Other;
  std::vector<EntityMention> mentions;
  std::vector<RelationEdge> edges;

  const EntityMention* find(std::string_view mention_id) const;
  bool operator==(const TagGraph&) const = default;
};

// Tagger contract: mentions sorted by start, non-overlapping, surface equal
// to the text slice, ids "m0", "m1", ... in start order, candidates sorted
// by score descending.
class EntityTagger {
 public:
  virtual ~EntityTagger() = default;
  virtual std::vector<EntityMention> tag(std::string_view text) const = 0;
  virtual std::string_view name() const = 0;
};

// Trie over the normalized ontology surfaces plus date and TNM patterns.
// TNM axes are matched by pattern only.
class LexiconTagger : public EntityTagger {
 public:
  explicit LexiconTagger(const OntologyGraph& onto);
  ~LexiconTagger() override;

  std::vector<EntityMention> tag(std::string_view text) const override;
  std::string_view name() const override { return "lexicon"; }

 private:
  struct Trie;
  const OntologyGraph& onto_;
  std::unique_ptr<Trie> trie_;
};

// Brute-force tagger: tries every surface at every offset. Slow; used to
// check the trie and to exercise tagger substitutability.
class NaiveScanTagger : public EntityTagger {
 public:
  explicit NaiveScanTagger(const OntologyGraph& onto);

  std::vector<EntityMention> tag(std::string_view text) const override;
  std::string_view name() const override { return "naive-scan"; }

 private:
  const OntologyGraph& onto_;
  std::vector<std::pair<std::string, std::vector<std::string>>> surfaces_;
};

std::vector<EntityMention> tag_entities(const ClinicalDocument& doc, const OntologyGraph& onto);

// Date patterns: YYYY-MM-DD, MM/DD/YYYY and "Month D, YYYY". Returns
// (begin, end, date) for every valid calendar date on word boundaries.
struct DateMatch {
  std::size_t begin;
  std::size_t end;
  Date date;
};
std::vector<DateMatch> find_dates(std::string_view text);

// Axis selector used by relation rules: an axis name, "Date", "*" (any
// concept axis) or "Axis/ancestor_id" to restrict to a subtree.
struct AxisSelector {
  enum class Kind : std::uint8_t { Any, Date, Axis };
  Kind kind = Kind::Any;
  SemanticAxis axis = SemanticAxis::Other;
  std::string ancestor;

  static AxisSelector parse(std::string_view text);
};

struct RelationRule {
  RelationKind kind = RelationKind::HasDate;
  AxisSelector from;
  AxisSelector to;
  std::string cue;
  std::regex cue_regex;
  double weight = 1.0;
  // Written as a leading '<' on the to-selector: the to-mention precedes
  // the from-mention in the text.
  bool to_first = false;
};

// Line format: relation_kind|from_axis|to_axis|cue_regex|weight. The cue is
// matched case-insensitively against the whole text between the two
// mentions. By default the from-mention comes first.
std::vector<RelationRule> parse_relation_rules(std::istream& in, const std::string& source_name = "<stream>");
std::vector<RelationRule> load_relation_rules(const std::filesystem::path& path);
const std::vector<RelationRule>& default_relation_rules();

class RelationClassifier {
 public:
  static constexpr std::size_t kWindow = 200;

  explicit RelationClassifier(const OntologyGraph& onto, std::vector<RelationRule> rules = default_relation_rules());

  std::vector<RelationEdge> classify(const std::vector<EntityMention>& mentions, std::string_view text) const;

 private:
  bool selects(const AxisSelector& sel, const EntityMention& m) const;

  const OntologyGraph& onto_;
  std::vector<RelationRule> rules_;
};

std::vector<RelationEdge> classify_relations(const std::vector<EntityMention>& mentions, std::string_view doc_text,
                                             const OntologyGraph& onto);

// Bundles a tagger and a relation classifier for repeated use.
class TagGraphBuilder {
 public:
  explicit TagGraphBuilder(const OntologyGraph& onto, std::shared_ptr<const EntityTagger> tagger = nullptr,
                           std::vector<RelationRule> rules = default_relation_rules());

  TagGraph build(const ClinicalDocument& doc) const;
  const EntityTagger& tagger() const { return *tagger_; }

 private:
  std::shared_ptr<const EntityTagger> tagger_;
  RelationClassifier classifier_;
};

TagGraph build_tag_graph(const ClinicalDocument& doc, const OntologyGraph& onto);

}  // namespace medrec
