#include "medrec/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "medrec/text.hpp"

namespace medrec {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::string_view, 4> kCohortNames = {"Colorectal", "Breast", "Lung", "Other"};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, CancerCohort> read_cohorts(const fs::path& path) {
  std::map<std::string, CancerCohort> out;
  if (!fs::exists(path)) return out;
  std::ifstream in(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = text::split(t, '\t');
    if (fields.size() != 2) throw ParseError(path.string(), lineno, "expected patient_id<TAB>cohort");
    auto cohort = parse_cohort(text::trim(fields[1]));
    if (!cohort) throw ParseError(path.string(), lineno, "unknown cohort '" + fields[1] + "'");
    out[std::string(text::trim(fields[0]))] = *cohort;
  }
  return out;
}

}  // namespace

std::string_view cohort_name(CancerCohort cohort) { return kCohortNames[static_cast<std::size_t>(cohort)]; }

std::optional<CancerCohort> parse_cohort(std::string_view name) {
  for (std::size_t i = 0; i < kCohortNames.size(); ++i)
    if (kCohortNames[i] == name) return static_cast<CancerCohort>(i);
  return std::nullopt;
}

CorpusLoad load_patient_corpus(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error("corpus root not found: " + root.string());
  auto cohorts = read_cohorts(root / "cohorts.tsv");

  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());

  CorpusLoad out;
  for (const auto& dir : dirs) {
    PatientRecordSet patient;
    patient.patient_id = dir.filename().string();
    if (auto it = cohorts.find(patient.patient_id); it != cohorts.end()) patient.cancer_cohort = it->second;

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    for (const auto& file : files) {
      auto source_id = file.stem().string();
      auto body = read_file(file);
      if (text::trim(body).empty()) {
        out.warnings.push_back({patient.patient_id, source_id, "empty file skipped"});
        continue;
      }
      patient.records.push_back({source_id, body, body.size()});
    }
    if (patient.records.empty()) {
      out.warnings.push_back({patient.patient_id, "", "patient has no non-empty records; skipped"});
      continue;
    }
    out.patients.push_back(std::move(patient));
  }
  return out;
}

GoldStandard parse_gold_standard(std::istream& in, const OntologyGraph& onto, const std::string& source_name) {
  GoldStandard gold;
  std::set<std::string> seen_lines;
  std::set<std::string> closed;  // patients whose block has ended
  std::string current;
  std::string line;
  std::size_t lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.front() == '#') continue;
    auto fail = [&](const std::string& msg) { throw ParseError(source_name, lineno, msg); };

    auto fields = text::split(line, '\t');
    if (fields.size() < 3 || fields.size() > 5) fail("expected 3 to 5 tab-separated fields");
    for (auto& f : fields) f = std::string(text::trim(f));

    const auto& pid = fields[0];
    if (pid.empty()) fail("empty patient id");
    if (pid != current) {
      if (closed.count(pid)) fail("duplicate patient entry '" + pid + "'");
      if (!current.empty()) closed.insert(current);
      current = pid;
    }
    if (!seen_lines.insert(line).second) fail("duplicate line for patient '" + pid + "'");

    auto kind = parse_variable(fields[1]);
    if (!kind) fail("unknown variable '" + fields[1] + "'");
    auto value = ValueRef::decode(fields[2]);
    if (!value) fail("value must be concept:<id> or lit:<text>, got '" + fields[2] + "'");
    if (value->is_concept()) {
      const Concept* c = onto.find(value->text);
      if (!c) fail("unknown concept '" + value->text + "'");
      if (c->axis != variable_axis(*kind))
        fail("concept '" + value->text + "' is not on the " + std::string(axis_name(variable_axis(*kind))) + " axis");
    }

    GoldValue gv{*value, std::nullopt, std::nullopt};
    if (fields.size() >= 4 && !fields[3].empty()) {
      gv.date = Date::parse_iso(fields[3]);
      if (!gv.date) fail("invalid date '" + fields[3] + "'");
    }
    if (fields.size() == 5 && !fields[4].empty()) gv.qualifier = fields[4];
    gold[pid][*kind].push_back(std::move(gv));
  }
  for (auto& [pid, pg] : gold)
    for (auto& vs : pg.values) std::sort(vs.begin(), vs.end());
  return gold;
}

GoldStandard load_gold_standard(const fs::path& path, const OntologyGraph& onto) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open gold standard " + path.string());
  return parse_gold_standard(in, onto, path.string());
}

void write_gold_standard(std::ostream& out, const GoldStandard& gold) {
  for (const auto& [pid, pg] : gold) {
    for (VariableKind kind : kAllVariables) {
      for (const auto& gv : pg[kind]) {
        out << pid << '\t' << variable_name(kind) << '\t' << gv.value.encode();
        if (gv.date || gv.qualifier) out << '\t' << (gv.date ? gv.date->iso() : "");
        if (gv.qualifier) out << '\t' << *gv.qualifier;
        out << '\n';
      }
    }
  }
}

}  // namespace medrec
