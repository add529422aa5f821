#include "medrec/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "medrec/text.hpp"

namespace medrec {

namespace fs = std::filesystem;

namespace {

using Rng = std::mt19937_64;

std::size_t below(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

int between(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); }

bool chance(Rng& rng, int percent) { return static_cast<int>(rng() % 100) < percent; }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[below(rng, v.size())];
}

template <class T>
void shuffle(Rng& rng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(rng, i)]);
}

template <class T>
std::vector<T> sample(Rng& rng, std::vector<T> pool, std::size_t k) {
  shuffle(rng, pool);
  pool.resize(std::min(k, pool.size()));
  return pool;
}

Date add_days(const Date& d, int n) {
  using namespace std::chrono;
  sys_days t = sys_days{year{d.year} / month{static_cast<unsigned>(d.month)} / day{static_cast<unsigned>(d.day)}};
  year_month_day r{t + days{n}};
  return {static_cast<int>(r.year()), static_cast<int>(static_cast<unsigned>(r.month())),
          static_cast<int>(static_cast<unsigned>(r.day()))};
}

const char* const kMonths[] = {"January", "February", "March",     "April",   "May",      "June",
                               "July",    "August",   "September", "October", "November", "December"};

std::string write_date(Rng& rng, const Date& d) {
  switch (below(rng, 3)) {
    case 0: return d.iso();
    case 1: return std::to_string(d.month) + "/" + std::to_string(d.day) + "/" + std::to_string(d.year);
    default: return std::string(kMonths[d.month - 1]) + " " + std::to_string(d.day) + ", " + std::to_string(d.year);
  }
}

// ---------------------------------------------------------------------------
// Cohort profiles

struct NeoplasmProfile {
  std::string neoplasm;
  std::vector<std::string> morphologies;
};

struct Profile {
  CancerCohort cohort;
  std::vector<NeoplasmProfile> neoplasms;
  std::vector<std::string> medications;
  std::vector<std::string> biomarkers;
  std::vector<std::string> surgeries;
  std::vector<std::string> diagnostics;
  std::string specimen_site;
};

const std::vector<Profile>& profiles() {
  static const std::vector<Profile> kProfiles = {
      {CancerCohort::Lung,
       {{"non_small_cell_lung_cancer", {"adenocarcinoma", "squamous_cell_carcinoma", "large_cell_carcinoma"}},
        {"small_cell_lung_cancer", {"small_cell_carcinoma"}}},
       {"cisplatin", "carboplatin", "pemetrexed", "paclitaxel", "docetaxel", "gemcitabine", "etoposide", "osimertinib",
        "erlotinib", "alectinib", "crizotinib", "pembrolizumab", "nivolumab", "atezolizumab", "durvalumab",
        "bevacizumab"},
       {"egfr", "alk", "ros1", "kras", "braf", "pd_l1"},
       {"right_upper_lobectomy", "right_lower_lobectomy", "left_upper_lobectomy", "left_lower_lobectomy",
        "pneumonectomy", "wedge_resection", "mediastinal_lymph_node_dissection"},
       {"ct_scan", "pet_ct", "mri", "chest_xray", "bone_scan", "bronchoscopy", "ebus", "ct_guided_lung_biopsy"},
       "lung"},
      {CancerCohort::Breast,
       {{"triple_negative_breast_cancer", {"invasive_ductal_carcinoma", "invasive_lobular_carcinoma"}},
        {"her2_positive_breast_cancer", {"invasive_ductal_carcinoma", "ductal_carcinoma_in_situ"}},
        {"hormone_receptor_positive_breast_cancer", {"invasive_ductal_carcinoma", "invasive_lobular_carcinoma"}}},
       {"doxorubicin", "epirubicin", "cyclophosphamide", "paclitaxel", "docetaxel", "trastuzumab", "pertuzumab",
        "tamoxifen", "letrozole", "anastrozole", "exemestane", "palbociclib", "capecitabine", "carboplatin"},
       {"her2", "estrogen_receptor", "progesterone_receptor", "ki67", "brca1", "brca2", "pd_l1"},
       {"lumpectomy", "modified_radical_mastectomy", "total_mastectomy", "sentinel_lymph_node_biopsy",
        "axillary_lymph_node_dissection"},
       {"mammogram", "breast_ultrasound", "mri", "core_needle_biopsy", "ct_scan", "bone_scan", "pet_ct"},
       "breast"},
      {CancerCohort::Colorectal,
       {{"sigmoid_colon_cancer", {"adenocarcinoma", "mucinous_adenocarcinoma", "signet_ring_cell_carcinoma"}},
        {"ascending_colon_cancer", {"adenocarcinoma", "mucinous_adenocarcinoma"}},
        {"rectal_cancer", {"adenocarcinoma", "mucinous_adenocarcinoma"}}},
       {"fluorouracil", "capecitabine", "oxaliplatin", "irinotecan", "bevacizumab", "cetuximab", "panitumumab",
        "pembrolizumab"},
       {"kras", "nras", "braf", "msi", "cea"},
       {"right_hemicolectomy", "left_hemicolectomy", "sigmoid_colectomy", "low_anterior_resection",
        "abdominoperineal_resection"},
       {"colonoscopy", "ct_scan", "mri", "pet_ct"},
       "colon"},
  };
  return kProfiles;
}

// Neoplasms no cohort uses; planted as family history in distractor mode.
const std::vector<std::string> kUnrelatedNeoplasms = {"prostate_cancer", "pancreatic_cancer", "ovarian_cancer"};

std::vector<std::string> interpretations(const std::string& biomarker, const std::string& neoplasm) {
  bool tnbc = neoplasm == "triple_negative_breast_cancer";
  bool her2pos = neoplasm == "her2_positive_breast_cancer";
  bool hrpos = neoplasm == "hormone_receptor_positive_breast_cancer";
  if (biomarker == "her2") {
    if (tnbc || hrpos) return {"negative", "not_amplified"};
    if (her2pos) return {"positive", "amplified"};
  }
  if (biomarker == "estrogen_receptor" || biomarker == "progesterone_receptor") {
    if (tnbc || her2pos) return {"negative"};
    return {"positive"};
  }
  if (biomarker == "alk" || biomarker == "ros1") return {"rearranged", "negative"};
  if (biomarker == "egfr" || biomarker == "kras" || biomarker == "braf" || biomarker == "nras" ||
      biomarker == "brca1" || biomarker == "brca2")
    return {"mutated", "wild_type"};
  return {"positive", "negative"};
}

std::vector<std::string> methods_for(const std::string& biomarker) {
  if (biomarker == "her2") return {"ihc", "fish"};
  if (biomarker == "estrogen_receptor" || biomarker == "progesterone_receptor" || biomarker == "ki67" ||
      biomarker == "pd_l1")
    return {"ihc"};
  if (biomarker == "cea") return {"pcr"};
  return {"pcr", "ngs"};
}

struct StageChoice {
  std::string t, n, m, group;
};

StageChoice choose_stage(Rng& rng) {
  static const std::vector<std::string> kT = {"t1a", "t1b", "t1c", "t2a", "t2b", "t3", "t4a", "t4b"};
  static const std::vector<std::string> kN = {"n0", "n1", "n2", "n3"};
  StageChoice s;
  s.t = pick(rng, kT);
  s.n = pick(rng, kN);
  s.m = chance(rng, 25) ? (chance(rng, 50) ? "m1a" : "m1b") : "m0";
  if (s.m != "m0") {
    s.group = chance(rng, 50) ? "stage_iva" : "stage_ivb";
  } else if (s.n == "n0") {
    s.group = pick(rng, std::vector<std::string>{"stage_ia", "stage_ib", "stage_iia"});
  } else if (s.n == "n1") {
    s.group = pick(rng, std::vector<std::string>{"stage_iib", "stage_iiia"});
  } else if (s.n == "n2") {
    s.group = pick(rng, std::vector<std::string>{"stage_iiia", "stage_iiib"});
  } else {
    s.group = pick(rng, std::vector<std::string>{"stage_iiib", "stage_iiic"});
  }
  return s;
}

// ---------------------------------------------------------------------------
// Patient plan

struct DatedFact {
  std::string concept_id;
  Date date;
  std::string qualifier;  // biomarkers only: interpretation concept id
  std::string method;     // biomarkers only: testing method concept id
};

struct PatientPlan {
  std::string pid;
  const Profile* profile = nullptr;
  std::string neoplasm;
  std::string morphology;
  StageChoice stage;
  std::string t_surface, n_surface, m_surface;
  Date diagnosis;
  std::vector<DatedFact> medications, responses, outcomes, biomarkers, surgeries, diagnostics;
  std::string family_history;
  std::string first_name, last_name, doctor, mrn, phone, ssn, address, email;
};

const std::vector<std::string> kPersonNames = {
    "Abernathy", "Alvarez", "Brennan", "Castillo", "Delgado", "Eriksen", "Fitzgerald", "Gallagher", "Haverford",
    "Ingram",    "Jablonski", "Kowalczyk", "Lindqvist", "Montgomery", "Nakamura", "Okonkwo",   "Pemberton", "Quintero",
    "Rasmussen", "Schaefer", "Thornton", "Underwood", "Valdivia",   "Whitfield", "Yamamoto", "Zimmerman", "Adeline",
    "Bartholomew", "Cordelia", "Desmond", "Evangeline", "Florian",  "Genevieve", "Horatio",  "Isadora",   "Jasper",
    "Leopold",   "Marisol",  "Nathaniel", "Ophelia",   "Percival",   "Rosalind", "Sebastian", "Theodora", "Wilhelmina",
};

const std::vector<std::string> kStreets = {"Oak", "Maple", "Cedar", "Willow", "Birch", "Elm", "Chestnut", "Juniper"};
const std::vector<std::string> kStreetKinds = {"Street", "Avenue", "Road", "Lane", "Drive", "Boulevard"};

std::string digits(Rng& rng, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += static_cast<char>('0' + below(rng, 10));
  if (s[0] == '0') s[0] = '1';
  return s;
}

std::vector<DatedFact> dated(Rng& rng, const std::vector<std::string>& pool, std::size_t lo, std::size_t hi,
                             const Date& anchor, int from_day, int to_day) {
  std::size_t k = lo + below(rng, hi - lo + 1);
  std::vector<DatedFact> out;
  std::set<Date> used;
  for (const auto& id : sample(rng, pool, k)) {
    Date d;
    do {
      d = add_days(anchor, between(rng, from_day, to_day));
    } while (!used.insert(d).second);
    out.push_back({id, d, "", ""});
  }
  return out;
}

PatientPlan plan_patient(Rng& rng, const std::string& pid, bool distractors) {
  PatientPlan p;
  p.pid = pid;
  p.profile = &profiles()[below(rng, profiles().size())];
  const auto& np = pick(rng, p.profile->neoplasms);
  p.neoplasm = np.neoplasm;
  p.morphology = pick(rng, np.morphologies);
  p.stage = choose_stage(rng);
  p.diagnosis = add_days(Date{2015, 1, 1}, between(rng, 0, 7 * 365));

  p.diagnostics = dated(rng, p.profile->diagnostics, 1, 3, p.diagnosis, -45, -1);
  p.biomarkers = dated(rng, p.profile->biomarkers, 1, 3, p.diagnosis, 0, 30);
  for (auto& b : p.biomarkers) {
    b.qualifier = pick(rng, interpretations(b.concept_id, p.neoplasm));
    b.method = pick(rng, methods_for(b.concept_id));
  }
  p.surgeries = dated(rng, p.profile->surgeries, 1, 2, p.diagnosis, 10, 60);
  p.medications = dated(rng, p.profile->medications, 1, 4, p.diagnosis, 70, 400);
  p.responses = dated(rng, {"complete_response", "partial_response", "stable_disease", "progressive_disease"}, 1, 2,
                      p.diagnosis, 420, 700);
  p.outcomes = dated(rng, {"complete_remission", "partial_remission", "no_evidence_of_disease", "local_recurrence",
                           "distant_recurrence"},
                     1, 2, p.diagnosis, 720, 1000);
  if (distractors) p.family_history = pick(rng, kUnrelatedNeoplasms);

  p.first_name = pick(rng, kPersonNames);
  p.last_name = pick(rng, kPersonNames);
  p.doctor = pick(rng, kPersonNames);
  p.mrn = digits(rng, 7);
  p.phone = "555-" + digits(rng, 4);
  p.ssn = digits(rng, 3) + "-" + digits(rng, 2) + "-" + digits(rng, 4);
  p.address = std::to_string(between(rng, 10, 9999)) + " " + pick(rng, kStreets) + " " + pick(rng, kStreetKinds);
  p.email = text::lower(p.first_name) + "." + text::lower(p.last_name) + "@example.org";
  return p;
}

// ---------------------------------------------------------------------------
// Text assembly

class DocBuilder {
 public:
  DocBuilder(Rng& rng, const OntologyGraph& onto) : rng_(rng), onto_(onto) {}

  void text(std::string_view s) { out_ += s; }
  void line(std::string_view s) {
    out_ += s;
    out_ += '\n';
  }
  void phi(const std::string& s) {
    out_ += s;
    phi_.push_back(s);
  }

  // Preferred name most of the time, otherwise a synonym.
  std::string surface(const std::string& id) {
    const Concept& c = onto_.at(id);
    if (!c.synonyms.empty() && chance(rng_, 30)) return pick(rng_, c.synonyms);
    return c.preferred_name;
  }

  // An undated mention of id or one of its non-root ancestors.
  std::string loose_surface(const std::string& id) {
    if (chance(rng_, 70)) return surface(id);
    std::vector<std::string> up;
    std::vector<std::string> frontier = onto_.at(id).parents;
    while (!frontier.empty()) {
      auto cur = frontier.back();
      frontier.pop_back();
      if (std::find(up.begin(), up.end(), cur) != up.end()) continue;
      up.push_back(cur);
      for (const auto& par : onto_.at(cur).parents) frontier.push_back(par);
    }
    if (up.empty()) return surface(id);
    return surface(pick(rng_, up));
  }

  // Template with {E} (the fact's concept) and optionally {D} (its date).
  void fact(std::string_view tmpl, const std::string& id, const std::string& surf, std::optional<Date> date) {
    SyntheticFact f{id, date, 0, 0, 0, 0};
    bool sentence_start = true;
    std::size_t i = 0;
    while (i < tmpl.size()) {
      if (tmpl.substr(i, 3) == "{E}") {
        f.begin = out_.size();
        std::string s = surf;
        if (sentence_start && !s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
        out_ += s;
        f.end = out_.size();
        i += 3;
      } else if (tmpl.substr(i, 3) == "{D}") {
        f.date_begin = out_.size();
        out_ += write_date(rng_, *date);
        f.date_end = out_.size();
        i += 3;
      } else {
        out_ += tmpl[i++];
      }
      sentence_start = false;
    }
    facts_.push_back(f);
  }

  std::size_t size() const { return out_.size(); }

  SyntheticDocument finish(DocumentCategory category) {
    return {"", category, std::move(out_), std::move(facts_), std::move(phi_)};
  }

  Rng& rng() { return rng_; }

 private:
  Rng& rng_;
  const OntologyGraph& onto_;
  std::string out_;
  std::vector<SyntheticFact> facts_;
  std::vector<std::string> phi_;
};

std::string fill(std::string tmpl, const std::string& key, const std::string& value) {
  auto pos = tmpl.find(key);
  if (pos != std::string::npos) tmpl.replace(pos, key.size(), value);
  return tmpl;
}

const std::vector<std::string> kSubjective = {
    "Subjective: The patient reports a stable appetite and is walking daily.",
    "Subjective: Mild tiredness in the afternoons, otherwise feeling well.",
    "Subjective: No new complaints since the last visit.",
    "Subjective: Sleeping well; occasional aches in the lower back.",
};
const std::vector<std::string> kObjective = {
    "Objective: Vital signs within normal limits. Weight stable.",
    "Objective: Alert and oriented. Heart rate regular. Breath sounds clear.",
    "Objective: Afebrile. Abdomen soft and nontender.",
};
const std::vector<std::string> kPlan = {
    "Plan: Continue current management and return to clinic in three weeks.",
    "Plan: Review labs at the next visit. Patient agrees with the plan.",
    "Plan: Follow up in four weeks with repeat blood work.",
};
const std::vector<std::string> kLabRows = {
    "Hemoglobin 12.4 g/dL (reference range 12.0-15.5)", "WBC 6.1 x10^9/L (reference range 4.0-11.0)",
    "Platelets 231 x10^9/L (reference range 150-400)",  "Creatinine 0.9 mg/dL (reference range 0.6-1.2)",
    "ALT 24 U/L (reference range 7-56)",                "Sodium 139 mmol/L (reference range 135-145)",
};
const std::vector<std::string> kAdminLines = {
    "Insurance carrier: Blue Harbor Health Plan. Policy holder signature required before scheduling.",
    "Prior authorization requested for outpatient services. Billing office will contact the member.",
    "Consent for release of records signed and placed on file.",
    "Please bring a photo identification card and the insurance card to every appointment.",
};
const std::vector<std::string> kHandoutLines = {
    "Common side effects during treatment include {A}, {B} and {C}.",
    "Call your care team if you notice {A} lasting more than two days.",
    "Medicines such as {S} or {T} may be prescribed to ease {A}.",
    "Some people experience {B}; resting and drinking fluids can help.",
};
const std::vector<std::string> kAdverse = {"nausea", "vomiting", "fatigue", "hair loss", "diarrhea",
                                           "peripheral neuropathy", "mouth sores", "neutropenia"};
const std::vector<std::string> kSupportive = {"ondansetron", "dexamethasone", "filgrastim", "pegfilgrastim",
                                              "loperamide", "prochlorperazine"};

std::string stage_line(const PatientPlan& p, DocBuilder& b) {
  return p.t_surface + " " + p.n_surface + " " + p.m_surface + ", " + b.surface(p.stage.group);
}

void header(DocBuilder& b, const PatientPlan& p, std::string_view title) {
  b.line(title);
  b.text("Patient: ");
  b.phi(p.first_name);
  b.text(" ");
  b.phi(p.last_name);
  b.text("    MRN: ");
  b.phi(p.mrn);
  b.text("\n");
}

void footer(DocBuilder& b) {
  if (chance(b.rng(), 40)) b.line("Page 1 of 1");
}

struct Assignment {
  std::vector<const DatedFact*> note_facts;
  std::vector<const DatedFact*> lab_facts;
};

SyntheticDocument primary_pathology(DocBuilder& b, const PatientPlan& p) {
  header(b, p, "PATHOLOGY REPORT");
  b.line("Specimen: " + p.profile->specimen_site + " tissue, received in formalin.");
  b.line("Gross description: A tan-white firm portion of tissue measuring 2.1 cm in greatest dimension.");
  b.line("Microscopic: Sections show an infiltrating tumor with desmoplastic stroma.");
  b.fact("Clinical history: {E}.\n", p.neoplasm, b.loose_surface(p.neoplasm), std::nullopt);
  b.fact("Final diagnosis: {E}, diagnosed on {D}.\n", p.neoplasm, b.surface(p.neoplasm), p.diagnosis);
  b.fact("Histology: {E}.\n", p.morphology, b.surface(p.morphology), std::nullopt);
  b.line("Pathologic stage: " + stage_line(p, b) + ".");
  b.line("Margins: negative. Pathologist: Dr. " + p.doctor + ".");
  footer(b);
  return b.finish(DocumentCategory::Pathology);
}

SyntheticDocument secondary_pathology(DocBuilder& b, const PatientPlan& p) {
  header(b, p, "SURGICAL PATHOLOGY REPORT");
  b.line("Specimen: resection specimen from the " + p.profile->specimen_site + ".");
  b.line("Gross description: Received fresh, inked and serially sectioned.");
  b.fact("Findings consistent with the previously reported {E}.\n", p.neoplasm, b.loose_surface(p.neoplasm),
         std::nullopt);
  b.fact("Histology: {E}.\n", p.morphology, b.surface(p.morphology), std::nullopt);
  b.line("Margins: negative. Microscopic review confirms the prior staging.");
  footer(b);
  return b.finish(DocumentCategory::Pathology);
}

SyntheticDocument lab_results(DocBuilder& b, const PatientPlan& p, const std::vector<const DatedFact*>& facts) {
  header(b, p, "LABORATORY RESULTS");
  b.line("Ordering clinician: Dr. " + p.doctor);
  for (const auto& row : sample(b.rng(), kLabRows, 3)) b.line(row);
  for (const DatedFact* f : facts) {
    std::string tmpl = chance(b.rng(), 50) ? "On {D}, {E} was {Q} by {M}.\n" : "On {D}, {E} tested {Q} by {M}.\n";
    tmpl = fill(tmpl, "{Q}", b.surface(f->qualifier));
    tmpl = fill(tmpl, "{M}", b.surface(f->method));
    b.fact(tmpl, f->concept_id, b.surface(f->concept_id), f->date);
  }
  b.line("All results reviewed and released to the chart.");
  footer(b);
  return b.finish(DocumentCategory::LabResults);
}

void dated_note_fact(DocBuilder& b, const DatedFact& f, SemanticAxis axis) {
  static const std::map<SemanticAxis, std::vector<std::string>> kTemplates = {
      {SemanticAxis::Medication, {"Started {E} on {D}.", "{E} was started on {D}.", "On {D}, the patient started {E}."}},
      {SemanticAxis::Surgery, {"{E} was performed on {D}.", "On {D}, the patient underwent {E}."}},
      {SemanticAxis::DiagnosticProcedure,
       {"{E} was performed on {D}.", "{E} dated {D} was reviewed.", "On {D}, the patient underwent {E}."}},
      {SemanticAxis::Response, {"Restaging showed {E} on {D}.", "{E} was documented on {D}."}},
      {SemanticAxis::Outcome, {"{E} was documented on {D}.", "Surveillance on {D} confirmed {E}."}},
  };
  b.fact(pick(b.rng(), kTemplates.at(axis)) + " ", f.concept_id, b.surface(f.concept_id), f.date);
}

void undated_note_fact(DocBuilder& b, const DatedFact& f, SemanticAxis axis) {
  static const std::map<SemanticAxis, std::vector<std::string>> kTemplates = {
      {SemanticAxis::Medication, {"Tolerating {E} well.", "Continues {E} without interruption."}},
      {SemanticAxis::Surgery, {"Status post {E}.", "Recovered well after {E}."}},
      {SemanticAxis::DiagnosticProcedure, {"Prior {E} reviewed with the patient."}},
      {SemanticAxis::Response, {"Imaging review again noted {E}."}},
      {SemanticAxis::Outcome, {"Discussed {E} with the family."}},
  };
  b.fact(pick(b.rng(), kTemplates.at(axis)) + " ", f.concept_id, b.loose_surface(f.concept_id), std::nullopt);
}

struct NoteFact {
  const DatedFact* fact;
  SemanticAxis axis;
};

SyntheticDocument progress_note(DocBuilder& b, const PatientPlan& p, const std::vector<NoteFact>& dated_facts,
                                const std::vector<NoteFact>& all_facts, bool family_history) {
  header(b, p, chance(b.rng(), 70) ? "PROGRESS NOTE" : "ONCOLOGY CLINIC NOTE");
  b.line("Attending: Dr. " + p.doctor);
  b.line(pick(b.rng(), kSubjective));
  if (family_history) b.fact("Family history is notable for {E} in a parent.\n", p.family_history,
                             b.surface(p.family_history), std::nullopt);
  b.line(pick(b.rng(), kObjective));
  b.fact("Assessment: {E}. ", p.neoplasm, b.loose_surface(p.neoplasm), std::nullopt);
  if (chance(b.rng(), 40)) b.text("Staging: " + stage_line(p, b) + ". ");
  for (const auto& nf : dated_facts) dated_note_fact(b, *nf.fact, nf.axis);
  if (!all_facts.empty() && chance(b.rng(), 60)) {
    const auto& nf = pick(b.rng(), all_facts);
    undated_note_fact(b, *nf.fact, nf.axis);
  }
  b.text("\n");
  b.line(pick(b.rng(), kPlan));
  footer(b);
  return b.finish(DocumentCategory::SoapNote);
}

SyntheticDocument admin_form(DocBuilder& b, const PatientPlan& p) {
  b.line(chance(b.rng(), 50) ? "INSURANCE AUTHORIZATION FORM" : "PATIENT REGISTRATION FORM");
  b.text("Patient name: ");
  b.phi(p.first_name);
  b.text(" ");
  b.phi(p.last_name);
  b.text("\nAddress: ");
  b.phi(p.address);
  b.text("\nPhone: ");
  b.phi(p.phone);
  b.text("\nSSN: ");
  b.phi(p.ssn);
  b.text("\nEmail: ");
  b.phi(p.email);
  b.text("\nMRN: ");
  b.phi(p.mrn);
  b.text("\n");
  for (const auto& l : sample(b.rng(), kAdminLines, 2)) b.line(l);
  b.fact("Reason for services: {E}.\n", p.neoplasm, b.loose_surface(p.neoplasm), std::nullopt);
  b.line("Signature: ______________________");
  return b.finish(DocumentCategory::Administrative);
}

SyntheticDocument handout(DocBuilder& b) {
  b.line("PATIENT EDUCATION HANDOUT");
  b.line("Managing side effects at home");
  auto adverse = sample(b.rng(), kAdverse, 3);
  auto supportive = sample(b.rng(), kSupportive, 2);
  for (auto l : kHandoutLines) {
    l = fill(l, "{A}", adverse[0]);
    l = fill(l, "{B}", adverse[1]);
    l = fill(l, "{C}", adverse[2]);
    l = fill(l, "{S}", supportive[0]);
    l = fill(l, "{T}", supportive[1]);
    b.line(l);
  }
  return b.finish(DocumentCategory::Other);
}

std::vector<std::size_t> record_counts(Rng& rng, const SyntheticOptions& o) {
  std::vector<std::size_t> counts;
  if (o.n_patients == 0) return counts;
  std::size_t total = 0;
  for (std::size_t i = 0; i < o.n_patients; ++i) {
    counts.push_back(o.min_records + below(rng, o.max_records - o.min_records + 1));
    total += counts.back();
  }
  auto target = static_cast<std::size_t>(std::llround(o.mean_records * static_cast<double>(o.n_patients)));
  target = std::clamp(target, o.min_records * o.n_patients, o.max_records * o.n_patients);
  while (total > target) {
    auto& c = counts[below(rng, counts.size())];
    if (c > o.min_records) --c, --total;
  }
  while (total < target) {
    auto& c = counts[below(rng, counts.size())];
    if (c < o.max_records) ++c, ++total;
  }
  return counts;
}

SyntheticPatient build_patient(Rng& rng, const OntologyGraph& onto, const PatientPlan& p, std::size_t n_docs,
                               bool distractors) {
  enum class Kind { PrimaryPath, SecondaryPath, Lab, Note, Admin, Handout };
  std::vector<Kind> kinds = {Kind::PrimaryPath, Kind::Lab, Kind::Note, Kind::Admin};
  if (distractors) kinds.push_back(Kind::Handout);
  while (kinds.size() < n_docs) {
    int r = static_cast<int>(below(rng, 100));
    if (r < 5) kinds.push_back(Kind::SecondaryPath);
    else if (r < 20) kinds.push_back(Kind::Lab);
    else if (r < 35) kinds.push_back(Kind::Admin);
    else if (r < 50 && distractors) kinds.push_back(Kind::Handout);
    else kinds.push_back(Kind::Note);
  }
  shuffle(rng, kinds);

  std::vector<std::size_t> notes, labs;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (kinds[i] == Kind::Note) notes.push_back(i);
    if (kinds[i] == Kind::Lab) labs.push_back(i);
  }
  std::map<std::size_t, std::vector<NoteFact>> note_facts;
  std::map<std::size_t, std::vector<const DatedFact*>> lab_facts;
  std::vector<NoteFact> all;
  auto spread = [&](const std::vector<DatedFact>& facts, SemanticAxis axis) {
    for (const auto& f : facts) {
      note_facts[pick(rng, notes)].push_back({&f, axis});
      all.push_back({&f, axis});
    }
  };
  spread(p.diagnostics, SemanticAxis::DiagnosticProcedure);
  spread(p.surgeries, SemanticAxis::Surgery);
  spread(p.medications, SemanticAxis::Medication);
  spread(p.responses, SemanticAxis::Response);
  spread(p.outcomes, SemanticAxis::Outcome);
  for (const auto& f : p.biomarkers) lab_facts[pick(rng, labs)].push_back(&f);
  std::size_t family_note = distractors ? pick(rng, notes) : kinds.size();

  SyntheticPatient out;
  out.patient_id = p.pid;
  out.cohort = p.profile->cohort;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    DocBuilder b(rng, onto);
    SyntheticDocument doc;
    switch (kinds[i]) {
      case Kind::PrimaryPath: doc = primary_pathology(b, p); break;
      case Kind::SecondaryPath: doc = secondary_pathology(b, p); break;
      case Kind::Lab: doc = lab_results(b, p, lab_facts[i]); break;
      case Kind::Note: doc = progress_note(b, p, note_facts[i], all, i == family_note); break;
      case Kind::Admin: doc = admin_form(b, p); break;
      case Kind::Handout: doc = handout(b); break;
    }
    char name[32];
    std::snprintf(name, sizeof(name), "doc_%03zu", i + 1);
    doc.source_id = name;
    out.documents.push_back(std::move(doc));
  }
  return out;
}

PatientGold gold_for(const PatientPlan& p, const OntologyGraph& onto) {
  PatientGold g;
  auto ref = [](const std::string& id) { return ValueRef::concept_ref(id); };
  g[VariableKind::Neoplasm].push_back({ref(p.neoplasm), std::nullopt, std::nullopt});
  g[VariableKind::Morphology].push_back({ref(p.morphology), std::nullopt, std::nullopt});
  g[VariableKind::TStage].push_back({ref(p.stage.t), std::nullopt, std::nullopt});
  g[VariableKind::NStage].push_back({ref(p.stage.n), std::nullopt, std::nullopt});
  g[VariableKind::MStage].push_back({ref(p.stage.m), std::nullopt, std::nullopt});
  g[VariableKind::StageGroup].push_back({ref(p.stage.group), std::nullopt, std::nullopt});
  auto add = [&](VariableKind kind, const std::vector<DatedFact>& facts) {
    for (const auto& f : facts) {
      std::optional<std::string> q;
      if (!f.qualifier.empty()) q = onto.at(f.qualifier).preferred_name;
      g[kind].push_back({ref(f.concept_id), f.date, q});
    }
  };
  add(VariableKind::Medications, p.medications);
  add(VariableKind::Outcome, p.outcomes);
  add(VariableKind::Response, p.responses);
  add(VariableKind::TestedBiomarkers, p.biomarkers);
  add(VariableKind::Surgeries, p.surgeries);
  add(VariableKind::DiagnosticProcedures, p.diagnostics);
  g[VariableKind::CancerDiagnosisDate].push_back({ValueRef::literal(p.diagnosis.iso()), p.diagnosis, std::nullopt});
  for (auto& vs : g.values) std::sort(vs.begin(), vs.end());
  return g;
}

void validate_profiles(const OntologyGraph& onto) {
  auto check = [&](const std::string& id) { (void)onto.at(id); };
  for (const auto& pr : profiles()) {
    for (const auto& np : pr.neoplasms) {
      check(np.neoplasm);
      for (const auto& m : np.morphologies) check(m);
    }
    for (const auto* pool : {&pr.medications, &pr.biomarkers, &pr.surgeries, &pr.diagnostics})
      for (const auto& id : *pool) check(id);
  }
  for (const auto& id : kUnrelatedNeoplasms) check(id);
}

}  // namespace

const std::vector<std::string>& synthetic_person_names() { return kPersonNames; }

SyntheticCorpus generate_synthetic_corpus(const SyntheticOptions& options, const OntologyGraph& onto) {
  if (options.min_records < 5 || options.min_records > options.max_records)
    throw Error("synthetic corpus needs 5 <= min_records <= max_records");
  validate_profiles(onto);
  Rng rng(options.seed);
  auto counts = record_counts(rng, options);

  SyntheticCorpus corpus;
  for (std::size_t i = 0; i < options.n_patients; ++i) {
    char pid[32];
    std::snprintf(pid, sizeof(pid), "P%03zu", i + 1);
    PatientPlan plan = plan_patient(rng, pid, options.distractors);
    plan.t_surface = "p" + onto.at(plan.stage.t).preferred_name;
    plan.n_surface = onto.at(plan.stage.n).preferred_name;
    plan.m_surface = onto.at(plan.stage.m).preferred_name;
    corpus.patients.push_back(build_patient(rng, onto, plan, counts[i], options.distractors));
    corpus.gold[plan.pid] = gold_for(plan, onto);
  }
  return corpus;
}

void write_synthetic_corpus(const SyntheticCorpus& corpus, const fs::path& out) {
  auto write = [](const fs::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << body;
  };
  fs::create_directories(out / "corpus");
  std::string cohorts, labels;
  for (const auto& p : corpus.patients) {
    fs::create_directories(out / "corpus" / p.patient_id);
    for (const auto& d : p.documents) {
      write(out / "corpus" / p.patient_id / (d.source_id + ".txt"), d.text);
      labels += p.patient_id + "\t" + d.source_id + "\t" + std::string(category_name(d.category)) + "\n";
    }
    cohorts += p.patient_id + "\t" + std::string(cohort_name(p.cohort)) + "\n";
  }
  write(out / "corpus" / "cohorts.tsv", cohorts);
  write(out / "labels.tsv", labels);
  std::ofstream gold(out / "gold.tsv", std::ios::binary);
  if (!gold) throw Error("cannot write " + (out / "gold.tsv").string());
  write_gold_standard(gold, corpus.gold);
}

std::vector<PatientRecordSet> record_sets(const SyntheticCorpus& corpus) {
  std::vector<PatientRecordSet> out;
  for (const auto& p : corpus.patients) {
    PatientRecordSet r;
    r.patient_id = p.patient_id;
    r.cancer_cohort = p.cohort;
    for (const auto& d : p.documents) r.records.push_back({d.source_id, d.text, d.text.size()});
    std::sort(r.records.begin(), r.records.end(),
              [](const RawDocumentText& a, const RawDocumentText& b) { return a.source_id < b.source_id; });
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(),
            [](const PatientRecordSet& a, const PatientRecordSet& b) { return a.patient_id < b.patient_id; });
  return out;
}

}  // namespace medrec
