#include "medrec/preprocess.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>

#include "medrec/text.hpp"

namespace medrec {

namespace {

constexpr std::string_view kTokenPrefix = "[REDACTED:";

bool is_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

std::vector<std::pair<std::size_t, std::size_t>> protected_regions(std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t pos = 0;
  while ((pos = text.find(kTokenPrefix, pos)) != std::string_view::npos) {
    std::size_t close = text.find(']', pos);
    if (close == std::string_view::npos) break;
    out.emplace_back(pos, close + 1);
    pos = close + 1;
  }
  return out;
}

bool overlaps(std::size_t b1, std::size_t e1, std::size_t b2, std::size_t e2) { return b1 < e2 && b2 < e1; }

}  // namespace

// ---------------------------------------------------------------------------
// Gazetteer

Gazetteer::Gazetteer(const std::vector<std::string>& names) {
  for (const auto& n : names)
    for (const auto& span : text::whitespace_tokens(n)) names_.insert(text::lower(n.substr(span.begin, span.end - span.begin)));
}

Gazetteer Gazetteer::parse(std::istream& in) {
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    names.emplace_back(t);
  }
  return Gazetteer(names);
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open gazetteer " + path.string());
  return parse(in);
}

bool Gazetteer::contains(std::string_view token) const { return names_.count(text::lower(token)) > 0; }

// ---------------------------------------------------------------------------
// De-identification

PatternDeidentifier::PatternDeidentifier(Gazetteer gazetteer) : gazetteer_(std::move(gazetteer)) {
  auto add = [&](std::string kind, const char* re, int group) {
    patterns_.push_back({std::move(kind), std::regex(re, std::regex::ECMAScript | std::regex::optimize), group});
  };
  add("EMAIL", R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})", 0);
  add("SSN", R"(\b\d{3}-\d{2}-\d{4}\b)", 0);
  add("PHONE", R"(\(\d{3}\)\s?\d{3}-\d{4}\b|\b(?:\d{3}[-.]){1,2}\d{4}\b)", 0);
  add("MRN", R"(\b(?:MRN|Medical record number)\s*[:#]?\s*([A-Z]{0,2}\d{5,10})\b)", 1);
  add("ADDRESS",
      R"(\b\d{1,5}\s+(?:[A-Z][a-z]+\s+){1,2}(?:Street|St\.|Avenue|Ave\.|Road|Rd\.|Lane|Ln\.|Boulevard|Blvd\.|Drive|Way|Court|Place|Terrace)(?![A-Za-z]))",
      0);
}

std::vector<PhiSpan> PatternDeidentifier::find_hits(const std::string& s) const {
  struct Hit {
    std::size_t begin, end;
    std::size_t rank;  // pattern order, names last
  };
  std::vector<Hit> hits;
  for (std::size_t p = 0; p < patterns_.size(); ++p) {
    const auto& pat = patterns_[p];
    for (auto it = std::sregex_iterator(s.begin(), s.end(), pat.re); it != std::sregex_iterator(); ++it) {
      const auto& m = (*it)[pat.group];
      if (!m.matched || m.length() == 0) continue;
      auto b = static_cast<std::size_t>(m.first - s.begin());
      hits.push_back({b, b + static_cast<std::size_t>(m.length()), p});
    }
  }
  // Name tokens: letter runs, allowing an inner apostrophe or hyphen.
  for (std::size_t i = 0; i < s.size();) {
    if (!is_letter(s[i]) || (i > 0 && text::is_alnum(s[i - 1]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && (is_letter(s[j]) || ((s[j] == '\'' || s[j] == '-') && j + 1 < s.size() && is_letter(s[j + 1]))))
      ++j;
    if ((j >= s.size() || !text::is_alnum(s[j])) && gazetteer_.contains(std::string_view(s).substr(i, j - i)))
      hits.push_back({i, j, patterns_.size()});
    i = j;
  }

  auto guarded = protected_regions(s);
  std::erase_if(hits, [&](const Hit& h) {
    return std::any_of(guarded.begin(), guarded.end(), [&](const auto& g) { return overlaps(h.begin, h.end, g.first, g.second); });
  });
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.end - a.begin != b.end - b.begin) return a.end - a.begin > b.end - b.begin;
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.rank < b.rank;
  });
  std::vector<PhiSpan> chosen;
  for (const auto& h : hits) {
    if (std::any_of(chosen.begin(), chosen.end(), [&](const PhiSpan& c) { return overlaps(h.begin, h.end, c.begin, c.end); }))
      continue;
    chosen.push_back({h.begin, h.end, h.rank < patterns_.size() ? patterns_[h.rank].kind : "NAME"});
  }
  std::sort(chosen.begin(), chosen.end(), [](const PhiSpan& a, const PhiSpan& b) { return a.begin < b.begin; });
  return chosen;
}

namespace {

std::string render(const std::string& s, const std::vector<PhiSpan>& spans) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& sp : spans) {
    out.append(s, pos, sp.begin - pos);
    out += std::string(kTokenPrefix) + sp.kind + "]";
    pos = sp.end;
  }
  out.append(s, pos, std::string::npos);
  return out;
}

// Maps an offset in render(s, spans) that lies outside every token back to s.
std::size_t to_original(std::size_t offset, const std::vector<PhiSpan>& spans) {
  std::ptrdiff_t shift = 0;
  for (const auto& sp : spans) {
    std::size_t token_begin = sp.begin + static_cast<std::size_t>(shift);
    if (offset < token_begin) break;
    shift += static_cast<std::ptrdiff_t>(kTokenPrefix.size() + sp.kind.size() + 1) -
             static_cast<std::ptrdiff_t>(sp.end - sp.begin);
  }
  return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(offset) - shift);
}

}  // namespace

// Replacing PHI can expose new word boundaries next to leftover text, so
// the rendered text is rescanned until nothing new matches. This is what
// makes redact(redact(t)) == redact(t).
RedactionResult PatternDeidentifier::redact(std::string_view text) const {
  const std::string s(text);
  auto spans = find_hits(s);
  while (true) {
    auto rendered = render(s, spans);
    auto extra = find_hits(rendered);
    if (extra.empty()) break;
    for (auto& h : extra) {
      h.begin = to_original(h.begin, spans);
      h.end = to_original(h.end, spans);
    }
    spans.insert(spans.end(), extra.begin(), extra.end());
    std::sort(spans.begin(), spans.end(), [](const PhiSpan& a, const PhiSpan& b) { return a.begin < b.begin; });
  }
  return {render(s, spans), spans};
}

RedactionResult deidentify(std::string_view text, const Gazetteer& gazetteer) {
  return PatternDeidentifier(gazetteer).redact(text);
}

// ---------------------------------------------------------------------------
// Segmentation

namespace {

constexpr std::array<std::string_view, 10> kTitleWords = {"REPORT",  "NOTE",    "RESULTS", "FORM",   "SUMMARY",
                                                          "HANDOUT", "SHEET",   "LETTER",  "CONSULTATION", "NOTES"};

bool is_title_line(std::string_view line) {
  auto t = text::trim(line);
  if (t.size() < 4) return false;
  int letters = 0;
  for (char c : t) {
    if (c >= 'A' && c <= 'Z') ++letters;
    else if (c == ' ' || c == '&' || c == '/' || c == '-' || c == ',' || (c >= '0' && c <= '9')) continue;
    else return false;
  }
  if (letters < 4) return false;
  auto space = t.find_last_of(' ');
  auto last = space == std::string_view::npos ? t : t.substr(space + 1);
  return std::find(kTitleWords.begin(), kTitleWords.end(), last) != kTitleWords.end();
}

// "Page k of n" with k == n.
bool is_last_page_marker(std::string_view line) {
  auto t = text::trim(line);
  if (t.size() < 11 || text::lower(t.substr(0, 5)) != "page ") return false;
  auto number = [&](std::size_t& i) {
    std::size_t start = i;
    while (i < t.size() && t[i] >= '0' && t[i] <= '9') ++i;
    return i > start ? std::optional<std::string_view>(t.substr(start, i - start)) : std::nullopt;
  };
  std::size_t i = 5;
  auto k = number(i);
  if (!k || t.substr(i, 4) != " of ") return false;
  i += 4;
  auto n = number(i);
  auto strip = [](std::string_view d) { return d.substr(std::min(d.find_first_not_of('0'), d.size())); };
  return n && i == t.size() && strip(*k) == strip(*n);
}

}  // namespace

std::vector<ClinicalDocument> segment_documents(const RawDocumentText& record, const std::string& patient_id,
                                                const BoundaryScorer* scorer, const SegmenterConfig& config) {
  std::string_view s = record.text;
  std::vector<std::size_t> cuts;
  bool run_below = false;
  std::pair<std::size_t, double> run_best{0, 0.0};

  std::size_t line_start = 0;
  while (line_start < s.size()) {
    std::size_t nl = s.find('\n', line_start);
    std::size_t line_end = nl == std::string_view::npos ? s.size() : nl;
    std::size_t next = nl == std::string_view::npos ? s.size() : nl + 1;
    auto line = s.substr(line_start, line_end - line_start);
    if (is_title_line(line)) cuts.push_back(line_start);
    if (is_last_page_marker(line)) cuts.push_back(next);
    for (std::size_t i = line_start; i < line_end; ++i)
      if (s[i] == '\f') cuts.push_back(i + 1);
    if (scorer && line_start > 0) {
      auto left = s.substr(line_start - std::min(line_start, config.scorer_window),
                           std::min(line_start, config.scorer_window));
      auto right = s.substr(line_start, config.scorer_window);
      if (!text::trim(left).empty() && !text::trim(right).empty()) {
        double sim = scorer->similarity(left, right);
        bool below = sim < config.similarity_threshold;
        // Consecutive low lines straddle one topic change; keep the deepest.
        if (below && run_below && sim < run_best.second) run_best = {line_start, sim};
        if (below && !run_below) run_best = {line_start, sim};
        if (!below && run_below) cuts.push_back(run_best.first);
        run_below = below;
      }
    }
    line_start = next;
  }
  if (run_below) cuts.push_back(run_best.first);
  cuts.push_back(0);
  cuts.push_back(s.size());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Short slices merge into the preceding segment; a short leading run is
  // carried forward instead.
  std::vector<std::pair<std::size_t, std::size_t>> pieces;
  std::optional<std::size_t> pending;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    std::size_t b = pending.value_or(cuts[i]), e = cuts[i + 1];
    if (text::trim(s.substr(b, e - b)).size() < config.min_length) {
      if (!pieces.empty()) pieces.back().second = e;
      else pending = b;
      continue;
    }
    pieces.emplace_back(b, e);
    pending.reset();
  }
  if (pending) pieces.emplace_back(*pending, s.size());

  std::vector<ClinicalDocument> out;
  for (const auto& [b, e] : pieces) {
    auto body = text::trim(s.substr(b, e - b));
    if (body.empty()) continue;
    ClinicalDocument d;
    d.doc_id = patient_id + "/" + record.source_id + "/" + std::to_string(out.size());
    d.patient_id = patient_id;
    d.category = DocumentCategory::Other;
    d.text = std::string(body);
    out.push_back(std::move(d));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classification

namespace {

struct Cue {
  std::string_view phrase;
  double weight;
};

// Indexed in precedence order: Pathology, LabResults, SoapNote,
// Administrative, Other.
const std::array<std::vector<Cue>, 5>& cue_table() {
  static const std::array<std::vector<Cue>, 5> kCues = {{
      {{"pathology report", 3}, {"surgical pathology", 3}, {"specimen", 2}, {"histology", 2}, {"margins", 2},
       {"gross description", 2}, {"microscopic", 2}, {"final diagnosis", 2}, {"pathologic stage", 2},
       {"pathologist", 1}, {"biopsy", 1}},
      {{"laboratory", 3}, {"lab results", 3}, {"reference range", 2}, {"results", 1}, {"hemoglobin", 1},
       {"platelets", 1}, {"creatinine", 1}, {"wbc", 1}, {"tested", 1}, {"assay", 1}},
      {{"progress note", 3}, {"clinic note", 3}, {"soap", 2}, {"subjective", 2}, {"objective", 2},
       {"assessment", 2}, {"plan", 1}, {"vital signs", 1}, {"follow up", 1}, {"attending", 1}},
      {{"insurance", 2}, {"authorization", 2}, {"registration", 2}, {"billing", 2}, {"policy", 1},
       {"signature", 1}, {"consent", 1}, {"form", 1}},
      {{"education", 3}, {"handout", 3}, {"side effects", 1}},
  }};
  return kCues;
}

std::array<double, 5> score_all(std::string_view text) {
  std::string lower = text::lower(text);
  std::array<double, 5> scores{};
  const auto& table = cue_table();
  for (std::size_t c = 0; c < table.size(); ++c) {
    for (const auto& cue : table[c]) {
      std::size_t pos = 0;
      while ((pos = lower.find(cue.phrase, pos)) != std::string::npos) {
        if (text::on_word_boundaries(lower, pos, pos + cue.phrase.size())) scores[c] += cue.weight;
        pos += cue.phrase.size();
      }
    }
  }
  return scores;
}

constexpr std::array<DocumentCategory, 5> kPrecedence = {DocumentCategory::Pathology, DocumentCategory::LabResults,
                                                         DocumentCategory::SoapNote, DocumentCategory::Administrative,
                                                         DocumentCategory::Other};

}  // namespace

CategoryScores category_scores(std::string_view text) {
  auto s = score_all(text);
  return {s[0], s[1], s[2], s[3], s[4]};
}

DocumentCategory classify_document(const ClinicalDocument& doc) {
  auto scores = score_all(doc.text);
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  if (scores[best] <= 0) return DocumentCategory::Other;
  return kPrecedence[best];
}

// ---------------------------------------------------------------------------

std::vector<ClinicalDocument> preprocess_patient(const PatientRecordSet& patient, const Deidentifier& deid,
                                                 const PreprocessConfig& config) {
  std::vector<ClinicalDocument> out;
  for (const auto& record : patient.records) {
    auto red = deid.redact(record.text);
    RawDocumentText clean{record.source_id, red.redacted_text, red.redacted_text.size()};
    for (auto& d : segment_documents(clean, patient.patient_id, config.scorer.get(), config.segmenter)) {
      d.category = classify_document(d);
      out.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace medrec
