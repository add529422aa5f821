#include "medrec/reasoning.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace medrec {

namespace {

std::size_t span_distance(const EntityMention& a, const EntityMention& b) {
  if (a.end <= b.begin) return b.begin - a.end;
  if (b.end <= a.begin) return a.begin - b.end;
  return 0;
}

// Earliest doc id in the provenance list; the consolidation sort key.
const std::string& primary_doc(const MedicalObject& o, const std::string& fallback) {
  if (o.provenance.empty()) return fallback;
  return std::min_element(o.provenance.begin(), o.provenance.end(),
                          [](const Provenance& a, const Provenance& b) { return a.doc_id < b.doc_id; })
      ->doc_id;
}

template <typename T>
bool consistent(const std::optional<T>& a, const std::optional<T>& b) {
  return !a || !b || *a == *b;
}

bool attributes_consistent(const ObjectAttributes& a, const ObjectAttributes& b) {
  return consistent(a.date, b.date) && consistent(a.stage_value, b.stage_value);
}

struct Entry {
  const MedicalObject* object;
  std::string graph_doc;
  std::string sort_doc;
  double mass;
};

struct Cluster {
  std::vector<const Entry*> members;
};

bool better_concept(const OntologyGraph& onto, const std::string& a, const std::string& b) {
  int da = onto.depth(a), db = onto.depth(b);
  if (da != db) return da > db;
  return a < b;
}

}  // namespace

double provenance_weight(const Provenance& p) { return p.kind == DocumentCategory::LlmAnswer ? 0.5 : 1.0; }

double provenance_mass(const std::vector<Provenance>& provenance) {
  double s = 0;
  for (const auto& p : provenance) s += provenance_weight(p);
  return s;
}

std::vector<const MedicalObject*> PatientGraph::on_axis(SemanticAxis axis) const {
  std::vector<const MedicalObject*> out;
  for (const auto& o : objects)
    if (o.axis == axis) out.push_back(&o);
  return out;
}

bool VariableReadout::empty() const {
  return std::all_of(values.begin(), values.end(), [](const auto& v) { return v.empty(); });
}

ObjectGraph ground_tag_graph(const TagGraph& tg, const OntologyGraph& onto) {
  ObjectGraph og;
  og.doc_id = tg.doc_id;
  og.category = tg.category;

  std::unordered_map<std::string, double> votes;
  for (const auto& m : tg.mentions)
    for (const auto& c : m.candidates) votes[c.concept_id] += c.score;

  std::unordered_map<std::string, const EntityMention*> by_id;
  for (const auto& m : tg.mentions) by_id[m.mention_id] = &m;

  std::unordered_map<std::string, std::string> grounded;
  for (const auto& m : tg.mentions) {
    if (m.is_date() || m.candidates.empty()) continue;
    const std::string* best = nullptr;
    for (const auto& c : m.candidates) {
      onto.at(c.concept_id);
      if (!best) {
        best = &c.concept_id;
        continue;
      }
      double vb = votes[*best], vc = votes[c.concept_id];
      if (vc > vb || (vc == vb && better_concept(onto, c.concept_id, *best))) best = &c.concept_id;
    }
    grounded[m.mention_id] = *best;
  }

  for (const auto& m : tg.mentions) {
    auto g = grounded.find(m.mention_id);
    if (g == grounded.end()) continue;
    MedicalObject o;
    o.object_id = m.mention_id;
    o.concept_id = g->second;
    o.axis = onto.at(o.concept_id).axis;
    o.member_concepts = {o.concept_id};
    if (o.axis == SemanticAxis::TStage || o.axis == SemanticAxis::NStage || o.axis == SemanticAxis::MStage)
      o.attributes.stage_value = m.surface;

    // Best HasDate edge: score, then proximity, then earliest date.
    const EntityMention* date_m = nullptr;
    double date_score = -1;
    const EntityMention* interp_m = nullptr;
    double interp_score = -1;
    for (const auto& e : tg.edges) {
      const std::string* other = nullptr;
      if (e.from_mention == m.mention_id) other = &e.to_mention;
      else if (e.to_mention == m.mention_id) other = &e.from_mention;
      if (!other) continue;
      auto it = by_id.find(*other);
      if (it == by_id.end()) continue;
      const EntityMention* cand = it->second;
      if (e.kind == RelationKind::HasDate && cand->is_date()) {
        bool take = !date_m || e.score > date_score;
        if (date_m && e.score == date_score) {
          std::size_t dc = span_distance(m, *cand), db = span_distance(m, *date_m);
          take = dc < db || (dc == db && *cand->date < *date_m->date);
        }
        if (take) {
          date_m = cand;
          date_score = e.score;
        }
      } else if (e.kind == RelationKind::HasInterpretation && e.from_mention == m.mention_id &&
                 grounded.count(cand->mention_id)) {
        bool take = !interp_m || e.score > interp_score ||
                    (e.score == interp_score && span_distance(m, *cand) < span_distance(m, *interp_m));
        if (take) {
          interp_m = cand;
          interp_score = e.score;
        }
      }
    }
    if (date_m) o.attributes.date = *date_m->date;
    if (interp_m) o.attributes.qualifier = onto.at(grounded[interp_m->mention_id]).preferred_name;
    o.provenance.push_back({tg.doc_id, m.mention_id, tg.category, o.attributes.date});
    og.objects.push_back(std::move(o));
  }

  for (const auto& e : tg.edges) {
    if (!grounded.count(e.from_mention) || !grounded.count(e.to_mention)) continue;
    og.links.push_back({e.from_mention, e.to_mention, e.kind, e.score});
  }
  return og;
}

PatientGraph consolidate_patient(const std::vector<ObjectGraph>& graphs, const OntologyGraph& onto,
                                 const std::string& patient_id) {
  PatientGraph pg;
  pg.patient_id = patient_id;

  std::vector<Entry> entries;
  for (const auto& g : graphs)
    for (const auto& o : g.objects) {
      onto.at(o.concept_id);
      entries.push_back({&o, g.doc_id, primary_doc(o, g.doc_id), provenance_mass(o.provenance)});
    }

  auto key_less = [](const Entry* a, const Entry* b) {
    if (a->mass != b->mass) return a->mass > b->mass;
    if (a->sort_doc != b->sort_doc) return a->sort_doc < b->sort_doc;
    if (a->graph_doc != b->graph_doc) return a->graph_doc < b->graph_doc;
    if (a->object->object_id != b->object->object_id) return a->object->object_id < b->object->object_id;
    if (a->object->concept_id != b->object->concept_id) return a->object->concept_id < b->object->concept_id;
    return a->object->attributes.date < b->object->attributes.date;
  };

  // (graph doc id, object id) -> consolidated object id, for link rewiring.
  std::map<std::pair<std::string, std::string>, std::string> cluster_of;

  for (std::size_t a = 0; a < kAxisCount; ++a) {
    const auto axis = static_cast<SemanticAxis>(a);
    std::vector<const Entry*> pool;
    for (const auto& e : entries)
      if (e.object->axis == axis) pool.push_back(&e);
    if (pool.empty()) continue;
    std::sort(pool.begin(), pool.end(), key_less);

    std::vector<Cluster> clusters;
    for (const Entry* e : pool) {
      Cluster* home = nullptr;
      for (auto& c : clusters) {
        bool ok = std::all_of(c.members.begin(), c.members.end(), [&](const Entry* m) {
          return onto.compatible(m->object->concept_id, e->object->concept_id) &&
                 attributes_consistent(m->object->attributes, e->object->attributes);
        });
        if (ok) {
          home = &c;
          break;
        }
      }
      if (!home) home = &clusters.emplace_back();
      home->members.push_back(e);
    }

    std::vector<MedicalObject> emitted;
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
      const auto& c = clusters[ci];
      MedicalObject o;
      o.object_id = std::string(axis_name(axis)) + "/" + std::to_string(ci);
      o.axis = axis;
      o.concept_id = c.members.front()->object->concept_id;
      std::set<Provenance> prov;
      for (const Entry* m : c.members) {
        const MedicalObject& src = *m->object;
        o.concept_id = onto.most_specific(o.concept_id, src.concept_id);
        for (const auto& mc : src.member_concepts) o.member_concepts.push_back(mc);
        if (src.member_concepts.empty()) o.member_concepts.push_back(src.concept_id);
        prov.insert(src.provenance.begin(), src.provenance.end());
        if (!o.attributes.date) o.attributes.date = src.attributes.date;
        if (!o.attributes.stage_value) o.attributes.stage_value = src.attributes.stage_value;
        if (!o.attributes.qualifier) o.attributes.qualifier = src.attributes.qualifier;
        cluster_of[{m->graph_doc, src.object_id}] = o.object_id;
      }
      o.provenance.assign(prov.begin(), prov.end());
      emitted.push_back(std::move(o));
    }

    const bool multi = is_multi_valued_axis(axis);
    for (auto& o : emitted) {
      double s = provenance_mass(o.provenance);
      double k = 0;
      if (!multi) {
        for (const auto& other : emitted)
          if (&other != &o && !onto.compatible(o.concept_id, other.concept_id)) k += provenance_mass(other.provenance);
      }
      o.confidence = (s + 1.0) / (s + k + 2.0);
    }
    for (auto& o : emitted) pg.objects.push_back(std::move(o));
  }

  std::map<std::tuple<std::string, std::string, RelationKind>, double> links;
  for (const auto& g : graphs) {
    for (const auto& l : g.links) {
      auto from = cluster_of.find({g.doc_id, l.from_object});
      auto to = cluster_of.find({g.doc_id, l.to_object});
      if (from == cluster_of.end() || to == cluster_of.end() || from->second == to->second) continue;
      auto& score = links[{from->second, to->second, l.kind}];
      score = std::max(score, l.score);
    }
  }
  for (const auto& [key, score] : links)
    pg.links.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), score});
  return pg;
}

ObjectGraph as_object_graph(const PatientGraph& pg) {
  ObjectGraph og;
  og.doc_id = pg.patient_id;
  og.category = DocumentCategory::Other;
  og.objects = pg.objects;
  og.links = pg.links;
  return og;
}

VariableReadout extract_variables(const PatientGraph& pg, const OntologyGraph& onto, const ReasoningConfig& cfg) {
  VariableReadout out;
  auto to_value = [](const MedicalObject& o) {
    return ReadoutValue{ValueRef::concept_ref(o.concept_id), o.attributes.date, o.attributes.qualifier, o.confidence};
  };
  auto ranks_higher = [&](const MedicalObject* a, const MedicalObject* b) {
    if (a->confidence != b->confidence) return a->confidence > b->confidence;
    return better_concept(onto, a->concept_id, b->concept_id);
  };

  const MedicalObject* neoplasm = nullptr;
  for (VariableKind kind : kAllVariables) {
    if (kind == VariableKind::CancerDiagnosisDate) continue;
    auto objs = pg.on_axis(variable_axis(kind));
    if (objs.empty()) continue;
    std::sort(objs.begin(), objs.end(), ranks_higher);
    if (!is_multi_valued(kind)) {
      out[kind].push_back(to_value(*objs.front()));
      if (kind == VariableKind::Neoplasm) neoplasm = objs.front();
      continue;
    }
    for (const MedicalObject* o : objs)
      if (o->confidence >= cfg.tau) out[kind].push_back(to_value(*o));
  }

  if (neoplasm) {
    std::optional<Date> pathology, any;
    for (const MedicalObject* o : pg.on_axis(SemanticAxis::Neoplasm)) {
      bool linked = onto.compatible(o->concept_id, neoplasm->concept_id);
      for (const auto& p : o->provenance) {
        if (!p.date) continue;
        if (!any || *p.date < *any) any = p.date;
        if (linked && p.kind == DocumentCategory::Pathology && (!pathology || *p.date < *pathology)) pathology = p.date;
      }
    }
    auto chosen = pathology ? pathology : any;
    if (chosen) {
      out[VariableKind::CancerDiagnosisDate].push_back(
          ReadoutValue{ValueRef::literal(chosen->iso()), chosen, std::nullopt, neoplasm->confidence});
    }
  }
  return out;
}

}  // namespace medrec
