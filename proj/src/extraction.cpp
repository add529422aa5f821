#include "medrec/extraction.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>

#include "medrec/text.hpp"

namespace medrec {

namespace {

constexpr std::array<std::string_view, 7> kRelationNames = {
    "HasDate", "HasStage", "HasMorphology", "HasInterpretation", "HasMethod", "TreatedWith", "ResultedIn",
};

bool is_tnm_axis(SemanticAxis axis) {
  return axis == SemanticAxis::TStage || axis == SemanticAxis::NStage || axis == SemanticAxis::MStage;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool boundary_before(std::string_view s, std::size_t i) { return i == 0 || !text::is_alnum(s[i - 1]); }
bool boundary_after(std::string_view s, std::size_t i) { return i >= s.size() || !text::is_alnum(s[i]); }

// Matches a normalized surface at `pos`; a space in the surface consumes a
// whitespace run. Returns the end offset or npos.
std::size_t match_surface_at(std::string_view s, std::size_t pos, std::string_view surface) {
  std::size_t i = pos;
  for (char c : surface) {
    if (i >= s.size()) return std::string_view::npos;
    if (c == ' ') {
      if (!text::is_space(s[i])) return std::string_view::npos;
      while (i < s.size() && text::is_space(s[i])) ++i;
    } else {
      if (text::to_lower(s[i]) != c) return std::string_view::npos;
      ++i;
    }
  }
  return i;
}

// Candidates for a surface: non-TNM concepts, deeper first, then by id.
std::vector<std::string> rank_concepts(const OntologyGraph& onto, std::vector<std::string> ids) {
  std::erase_if(ids, [&](const std::string& id) { return is_tnm_axis(onto.at(id).axis); });
  std::sort(ids.begin(), ids.end(), [&](const std::string& a, const std::string& b) {
    int da = onto.depth(a), db = onto.depth(b);
    if (da != db) return da > db;
    return a < b;
  });
  return ids;
}

struct SpanCandidate {
  std::size_t begin;
  std::size_t end;
  int priority;  // dates before stage codes before lexicon hits
  EntityMention mention;
};

std::vector<EntityMention> resolve(std::string_view s, std::vector<SpanCandidate> pool) {
  std::stable_sort(pool.begin(), pool.end(), [](const SpanCandidate& a, const SpanCandidate& b) {
    std::size_t la = a.end - a.begin, lb = b.end - b.begin;
    if (la != lb) return la > lb;
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.priority < b.priority;
  });
  std::vector<bool> taken(s.size(), false);
  std::vector<EntityMention> out;
  for (auto& c : pool) {
    bool free = true;
    for (std::size_t i = c.begin; i < c.end && free; ++i) free = !taken[i];
    if (!free) continue;
    for (std::size_t i = c.begin; i < c.end; ++i) taken[i] = true;
    c.mention.begin = c.begin;
    c.mention.end = c.end;
    c.mention.surface = std::string(s.substr(c.begin, c.end - c.begin));
    out.push_back(std::move(c.mention));
  }
  std::sort(out.begin(), out.end(), [](const EntityMention& a, const EntityMention& b) { return a.begin < b.begin; });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].mention_id = "m" + std::to_string(i);
  return out;
}

SpanCandidate concept_candidate(const OntologyGraph& onto, std::size_t b, std::size_t e,
                                const std::vector<std::string>& ranked) {
  SpanCandidate c{b, e, 2, {}};
  c.mention.axis = onto.at(ranked.front()).axis;
  for (const auto& id : ranked) c.mention.candidates.push_back({id, static_cast<double>(e - b)});
  return c;
}


constexpr std::array<std::string_view, 12> kMonths = {
    "january", "february", "march",     "april",   "may",      "june",
    "july",    "august",   "september", "october", "november", "december",
};

std::size_t read_digits(std::string_view s, std::size_t i, std::size_t min_n, std::size_t max_n, int& value) {
  std::size_t n = 0;
  value = 0;
  while (i + n < s.size() && n < max_n && is_digit(s[i + n])) value = value * 10 + (s[i + n++] - '0');
  if (n < min_n || (i + n < s.size() && is_digit(s[i + n]))) return std::string_view::npos;
  return i + n;
}

// Month name (full or three-letter, optional '.') at i; returns end or npos.
std::size_t read_month(std::string_view s, std::size_t i, int& month) {
  for (std::size_t m = 0; m < kMonths.size(); ++m) {
    for (std::size_t len : {kMonths[m].size(), std::size_t{3}}) {
      if (i + len > s.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < len && ok; ++k) ok = text::to_lower(s[i + k]) == kMonths[m][k];
      if (!ok) continue;
      std::size_t e = i + len;
      if (e < s.size() && text::is_alnum(s[e])) continue;
      if (len == 3 && e < s.size() && s[e] == '.') ++e;
      month = static_cast<int>(m) + 1;
      return e;
    }
  }
  return std::string_view::npos;
}

std::optional<DateMatch> date_at(std::string_view s, std::size_t i) {
  if (!boundary_before(s, i)) return std::nullopt;
  constexpr auto npos = std::string_view::npos;
  int a = 0, b = 0, c = 0;
  if (is_digit(s[i])) {
    std::size_t e = read_digits(s, i, 4, 4, a);
    if (e != npos && e < s.size() && s[e] == '-') {
      std::size_t e2 = read_digits(s, e + 1, 2, 2, b);
      if (e2 != npos && e2 < s.size() && s[e2] == '-') {
        std::size_t e3 = read_digits(s, e2 + 1, 2, 2, c);
        if (e3 != npos && boundary_after(s, e3) && Date::valid(a, b, c)) return DateMatch{i, e3, {a, b, c}};
      }
    }
    e = read_digits(s, i, 1, 2, a);
    if (e != npos && e < s.size() && s[e] == '/') {
      std::size_t e2 = read_digits(s, e + 1, 1, 2, b);
      if (e2 != npos && e2 < s.size() && s[e2] == '/') {
        std::size_t e3 = read_digits(s, e2 + 1, 4, 4, c);
        if (e3 != npos && boundary_after(s, e3) && Date::valid(c, a, b)) return DateMatch{i, e3, {c, a, b}};
      }
    }
    return std::nullopt;
  }
  int month = 0;
  std::size_t e = read_month(s, i, month);
  if (e == npos || e >= s.size() || !text::is_space(s[e])) return std::nullopt;
  while (e < s.size() && text::is_space(s[e])) ++e;
  std::size_t e2 = read_digits(s, e, 1, 2, b);
  if (e2 == npos || e2 >= s.size() || s[e2] != ',') return std::nullopt;
  ++e2;
  while (e2 < s.size() && text::is_space(s[e2])) ++e2;
  std::size_t e3 = read_digits(s, e2, 4, 4, c);
  if (e3 == npos || !boundary_after(s, e3) || !Date::valid(c, month, b)) return std::nullopt;
  return DateMatch{i, e3, {c, month, b}};
}

struct TnmPart {
  std::size_t begin;
  std::size_t end;
  SemanticAxis axis;
  std::string concept_id;
};

// One TNM component at i: y?[pcr]?[TNM](is|[0-4X][a-d]?).
std::optional<TnmPart> tnm_part_at(const OntologyGraph& onto, std::string_view s, std::size_t i) {
  std::size_t j = i;
  if (j < s.size() && s[j] == 'y') ++j;
  if (j < s.size() && (s[j] == 'p' || s[j] == 'c' || s[j] == 'r')) ++j;
  if (j >= s.size()) return std::nullopt;
  char letter = s[j];
  SemanticAxis axis;
  if (letter == 'T') axis = SemanticAxis::TStage;
  else if (letter == 'N') axis = SemanticAxis::NStage;
  else if (letter == 'M') axis = SemanticAxis::MStage;
  else return std::nullopt;
  ++j;
  std::string value;
  if (letter == 'T' && s.substr(j, 2) == "is") {
    value = "is";
    j += 2;
  } else if (j < s.size() && ((s[j] >= '0' && s[j] <= '4') || s[j] == 'X')) {
    value.push_back(text::to_lower(s[j++]));
    if (j < s.size() && s[j] >= 'a' && s[j] <= 'd') value.push_back(s[j++]);
  } else {
    return std::nullopt;
  }
  std::string id = std::string(1, text::to_lower(letter)) + value;
  const Concept* c = onto.find(id);
  if ((!c || c->axis != axis) && value.size() == 2 && value != "is") {
    id.pop_back();
    c = onto.find(id);
  }
  if (!c || c->axis != axis) return std::nullopt;
  return TnmPart{i, j, axis, id};
}

void add_pattern_candidates(const OntologyGraph& onto, std::string_view s, std::vector<SpanCandidate>& pool) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!boundary_before(s, i)) continue;
    if (auto d = date_at(s, i)) {
      SpanCandidate c{d->begin, d->end, 0, {}};
      c.mention.date = d->date;
      pool.push_back(std::move(c));
      continue;
    }
    std::vector<TnmPart> parts;
    std::size_t j = i;
    while (auto part = tnm_part_at(onto, s, j)) {
      parts.push_back(*part);
      j = part->end;
      if (boundary_after(s, j)) break;
    }
    if (parts.empty() || !boundary_after(s, j)) continue;
    for (const auto& p : parts) {
      SpanCandidate c{p.begin, p.end, 1, {}};
      c.mention.axis = p.axis;
      c.mention.candidates.push_back({p.concept_id, static_cast<double>(p.end - p.begin)});
      pool.push_back(std::move(c));
    }
  }
}

}  // namespace

std::string_view relation_kind_name(RelationKind kind) { return kRelationNames[static_cast<std::size_t>(kind)]; }

std::optional<RelationKind> parse_relation_kind(std::string_view name) {
  for (std::size_t i = 0; i < kRelationNames.size(); ++i)
    if (kRelationNames[i] == name) return static_cast<RelationKind>(i);
  return std::nullopt;
}

const EntityMention* TagGraph::find(std::string_view mention_id) const {
  for (const auto& m : mentions)
    if (m.mention_id == mention_id) return &m;
  return nullptr;
}

std::vector<DateMatch> find_dates(std::string_view text) {
  std::vector<DateMatch> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (auto d = date_at(text, i)) {
      out.push_back(*d);
      i = d->end - 1;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lexicon trie

struct LexiconTagger::Trie {
  struct Node {
    std::vector<std::pair<char, std::uint32_t>> next;
    int terminal = -1;
  };
  std::vector<Node> nodes{1};
  std::vector<std::vector<std::string>> ranked;

  std::uint32_t child(std::uint32_t n, char c) const {
    for (const auto& [k, v] : nodes[n].next)
      if (k == c) return v;
    return 0;
  }

  void insert(const std::string& surface, std::vector<std::string> ids) {
    std::uint32_t n = 0;
    for (char c : surface) {
      std::uint32_t nx = child(n, c);
      if (nx == 0) {
        nx = static_cast<std::uint32_t>(nodes.size());
        nodes[n].next.emplace_back(c, nx);
        nodes.emplace_back();
      }
      n = nx;
    }
    nodes[n].terminal = static_cast<int>(ranked.size());
    ranked.push_back(std::move(ids));
  }
};

LexiconTagger::LexiconTagger(const OntologyGraph& onto) : onto_(onto), trie_(std::make_unique<Trie>()) {
  std::map<std::string, std::vector<std::string>> by_surface;
  for (const auto& [surface, id] : onto.surface_entries()) by_surface[surface].push_back(id);
  for (auto& [surface, ids] : by_surface) {
    auto ranked = rank_concepts(onto, std::move(ids));
    if (!ranked.empty()) trie_->insert(surface, std::move(ranked));
  }
}

LexiconTagger::~LexiconTagger() = default;

std::vector<EntityMention> LexiconTagger::tag(std::string_view s) const {
  std::vector<SpanCandidate> pool;
  add_pattern_candidates(onto_, s, pool);
  for (std::size_t b = 0; b < s.size(); ++b) {
    if (text::is_space(s[b]) || !boundary_before(s, b)) continue;
    std::uint32_t n = 0;
    std::size_t i = b;
    while (i < s.size()) {
      char c = text::is_space(s[i]) ? ' ' : text::to_lower(s[i]);
      n = trie_->child(n, c);
      if (n == 0) break;
      if (c == ' ') {
        while (i < s.size() && text::is_space(s[i])) ++i;
      } else {
        ++i;
      }
      int t = trie_->nodes[n].terminal;
      if (t >= 0 && boundary_after(s, i)) pool.push_back(concept_candidate(onto_, b, i, trie_->ranked[t]));
    }
  }
  return resolve(s, std::move(pool));
}

NaiveScanTagger::NaiveScanTagger(const OntologyGraph& onto) : onto_(onto) {
  std::map<std::string, std::vector<std::string>> by_surface;
  for (const auto& [surface, id] : onto.surface_entries()) by_surface[surface].push_back(id);
  for (auto& [surface, ids] : by_surface) {
    auto ranked = rank_concepts(onto, std::move(ids));
    if (!ranked.empty()) surfaces_.emplace_back(surface, std::move(ranked));
  }
}

std::vector<EntityMention> NaiveScanTagger::tag(std::string_view s) const {
  std::vector<SpanCandidate> pool;
  add_pattern_candidates(onto_, s, pool);
  for (std::size_t b = 0; b < s.size(); ++b) {
    if (!boundary_before(s, b)) continue;
    for (const auto& [surface, ranked] : surfaces_) {
      std::size_t e = match_surface_at(s, b, surface);
      if (e != std::string_view::npos && boundary_after(s, e)) pool.push_back(concept_candidate(onto_, b, e, ranked));
    }
  }
  return resolve(s, std::move(pool));
}

std::vector<EntityMention> tag_entities(const ClinicalDocument& doc, const OntologyGraph& onto) {
  return LexiconTagger(onto).tag(doc.text);
}

// ---------------------------------------------------------------------------
// Relations

AxisSelector AxisSelector::parse(std::string_view text_in) {
  auto t = text::trim(text_in);
  AxisSelector sel;
  if (t == "*") return sel;
  if (t == "Date") {
    sel.kind = Kind::Date;
    return sel;
  }
  auto slash = t.find('/');
  auto axis = parse_axis(text::trim(t.substr(0, slash)));
  if (!axis) throw Error("unknown axis selector '" + std::string(t) + "'");
  sel.kind = Kind::Axis;
  sel.axis = *axis;
  if (slash != std::string_view::npos) sel.ancestor = std::string(text::trim(t.substr(slash + 1)));
  return sel;
}

namespace {

// A leading '<' on the to-selector means the to-mention precedes the
// from-mention in the text.
RelationRule make_rule(RelationKind kind, std::string_view from, std::string_view to, std::string cue,
                       double weight) {
  RelationRule r;
  r.kind = kind;
  to = text::trim(to);
  r.to_first = !to.empty() && to.front() == '<';
  if (r.to_first) to.remove_prefix(1);
  r.from = AxisSelector::parse(from);
  r.to = AxisSelector::parse(to);
  r.cue = std::move(cue);
  r.cue_regex = std::regex(r.cue, std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
  r.weight = weight;
  return r;
}

constexpr const char* kDefaultRules = R"(# relation_kind|from_axis|to_axis|cue_regex|weight
HasDate|*|Date|[ \t]*,?[ \t]*(?:(?:was|were|is|has been)[ \t]+)?(?:[a-z]+[ \t]+){0,2}(?:on|dated)[ \t]+|1.0
HasDate|*|Date|[ \t]*[(:,-]?[ \t]*|0.9
HasDate|*|<Date|[ \t]*,?[ \t]+(?:the[ \t]+)?(?:patient[ \t]+)?(?:[a-z]+[ \t]+){0,3}|0.8
HasStage|Neoplasm|StageGroup|[ \t]*[,:(-]?[ \t]*(?:(?:is|was|at|clinical|pathologic|pathological)[ \t]+){0,2}|0.9
HasStage|Neoplasm|TStage|[ \t]*[,:(-]?[ \t]*(?:(?:is|was|staged|as)[ \t]+){0,2}|0.8
HasStage|Neoplasm|NStage|[^.\n]{0,40}|0.6
HasStage|Neoplasm|MStage|[^.\n]{0,40}|0.6
HasMorphology|Neoplasm|Morphology|[ \t]*[,:(-]?[ \t]*(?:(?:with|showing|histology|type|consistent with)[ \t:]*)?|0.9
HasMorphology|Neoplasm|<Morphology|[ \t]+(?:of|in)[ \t]+(?:the[ \t]+)?|0.8
HasInterpretation|Biomarker|Other/biomarker_interpretation|[ \t]*(?:[:(=-][ \t]*|(?:(?:is|was|were|tested)[ \t]+){1,2})?|1.0
HasInterpretation|Biomarker|<Other/biomarker_interpretation|[ \t]+for[ \t]+|0.8
HasMethod|Biomarker|Other/testing_method|[^.\n]{0,60}?[ \t(](?:by|via|using)[ \t]+|0.9
TreatedWith|Neoplasm|Medication|[^.\n]{0,80}?(?:treated|started|initiated|began|received)(?:[ \t]+[a-z]+){0,2}[ \t]+|0.8
TreatedWith|Neoplasm|Surgery|[^.\n]{0,80}?(?:underwent|treated with)[ \t]+(?:an?[ \t]+)?|0.8
ResultedIn|Medication|Response|[^.\n]{0,80}?(?:with|showed|resulted in|achieving|achieved)[ \t]+|0.7
ResultedIn|Surgery|Outcome|[^.\n]{0,80}?(?:with|followed by|resulted in)[ \t]+|0.7
ResultedIn|Medication|Outcome|[^.\n]{0,80}?(?:with|followed by|resulted in|achieving|achieved)[ \t]+|0.7
)";

}  // namespace

std::vector<RelationRule> parse_relation_rules(std::istream& in, const std::string& source_name) {
  std::vector<RelationRule> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    // The cue may itself contain '|', so split three fields off the front
    // and one off the back.
    std::vector<std::string_view> head;
    std::string_view rest = body;
    for (int k = 0; k < 3; ++k) {
      auto p = rest.find('|');
      if (p == std::string_view::npos) throw ParseError(source_name, line_no, "expected 5 '|'-separated fields");
      head.push_back(rest.substr(0, p));
      rest.remove_prefix(p + 1);
    }
    auto last = rest.rfind('|');
    if (last == std::string_view::npos) throw ParseError(source_name, line_no, "expected 5 '|'-separated fields");
    std::string cue(rest.substr(0, last));
    std::string weight_text(text::trim(rest.substr(last + 1)));
    auto kind = parse_relation_kind(text::trim(head[0]));
    if (!kind) throw ParseError(source_name, line_no, "unknown relation kind '" + std::string(head[0]) + "'");
    double weight = 0;
    try {
      std::size_t used = 0;
      weight = std::stod(weight_text, &used);
      if (used != weight_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(source_name, line_no, "bad weight '" + weight_text + "'");
    }
    if (!(weight >= 0.0 && weight <= 1.0)) throw ParseError(source_name, line_no, "weight outside [0,1]");
    try {
      rules.push_back(make_rule(*kind, head[1], head[2], cue, weight));
    } catch (const std::regex_error& e) {
      throw ParseError(source_name, line_no, std::string("bad cue regex: ") + e.what());
    } catch (const Error& e) {
      throw ParseError(source_name, line_no, e.what());
    }
  }
  return rules;
}

std::vector<RelationRule> load_relation_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open relation rule file: " + path.string());
  return parse_relation_rules(in, path.string());
}

const std::vector<RelationRule>& default_relation_rules() {
  static const std::vector<RelationRule> rules = [] {
    std::istringstream in(kDefaultRules);
    return parse_relation_rules(in, "<default rules>");
  }();
  return rules;
}

RelationClassifier::RelationClassifier(const OntologyGraph& onto, std::vector<RelationRule> rules)
    : onto_(onto), rules_(std::move(rules)) {}

bool RelationClassifier::selects(const AxisSelector& sel, const EntityMention& m) const {
  switch (sel.kind) {
    case AxisSelector::Kind::Any: return !m.is_date();
    case AxisSelector::Kind::Date: return m.is_date();
    case AxisSelector::Kind::Axis:
      if (m.is_date() || !m.axis || *m.axis != sel.axis || m.candidates.empty()) return false;
      return sel.ancestor.empty() || (onto_.contains(sel.ancestor) &&
                                      onto_.is_subtype_of(m.candidates.front().concept_id, sel.ancestor));
  }
  return false;
}

std::vector<RelationEdge> RelationClassifier::classify(const std::vector<EntityMention>& mentions,
                                                       std::string_view s) const {
  // sentence[p] counts boundaries strictly before offset p.
  std::vector<std::uint32_t> sentence(s.size() + 1, 0);
  for (std::size_t p = 0; p < s.size(); ++p) {
    bool cut = s[p] == '\n' ||
               ((s[p] == '.' || s[p] == '!' || s[p] == '?') && (p + 1 >= s.size() || text::is_space(s[p + 1])));
    sentence[p + 1] = sentence[p] + (cut ? 1 : 0);
  }

  std::vector<std::size_t> order(mentions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mentions[a].begin < mentions[b].begin; });

  std::map<std::tuple<std::size_t, std::size_t, RelationKind>, RelationEdge> best;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const EntityMention& left = mentions[order[oi]];
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const EntityMention& right = mentions[order[oj]];
      if (right.begin < left.end) continue;
      std::size_t gap_len = right.begin - left.end;
      bool same_sentence = sentence[left.end] == sentence[right.begin];
      if (!same_sentence && gap_len > kWindow) break;
      std::string_view gap = s.substr(left.end, gap_len);
      for (const auto& rule : rules_) {
        const EntityMention& from = rule.to_first ? right : left;
        const EntityMention& to = rule.to_first ? left : right;
        if (!selects(rule.from, from) || !selects(rule.to, to)) continue;
        if (!std::regex_match(gap.begin(), gap.end(), rule.cue_regex)) continue;
        std::size_t a = std::min(order[oi], order[oj]), b = std::max(order[oi], order[oj]);
        auto key = std::make_tuple(a, b, rule.kind);
        auto it = best.find(key);
        if (it == best.end() || it->second.score < rule.weight)
          best[key] = RelationEdge{from.mention_id, to.mention_id, rule.kind, rule.weight};
      }
    }
  }
  std::vector<RelationEdge> edges;
  edges.reserve(best.size());
  for (auto& [key, edge] : best) edges.push_back(std::move(edge));
  return edges;
}

std::vector<RelationEdge> classify_relations(const std::vector<EntityMention>& mentions, std::string_view doc_text,
                                             const OntologyGraph& onto) {
  return RelationClassifier(onto).classify(mentions, doc_text);
}

TagGraphBuilder::TagGraphBuilder(const OntologyGraph& onto, std::shared_ptr<const EntityTagger> tagger,
                                 std::vector<RelationRule> rules)
    : tagger_(tagger ? std::move(tagger) : std::make_shared<LexiconTagger>(onto)),
      classifier_(onto, std::move(rules)) {}

TagGraph TagGraphBuilder::build(const ClinicalDocument& doc) const {
  TagGraph g;
  g.doc_id = doc.doc_id;
  g.category = doc.category;
  g.mentions = tagger_->tag(doc.text);
  g.edges = classifier_.classify(g.mentions, doc.text);
  return g;
}

TagGraph build_tag_graph(const ClinicalDocument& doc, const OntologyGraph& onto) {
  return TagGraphBuilder(onto).build(doc);
}

}  // namespace medrec
