#include "medrec/ontology.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>

#include "medrec/text.hpp"

namespace medrec {

namespace {

std::string cycle_message(const std::vector<std::string>& cycle) {
  return "ontology cycle: " + text::join(cycle, " -> ");
}

std::vector<std::string> split_list(std::string_view field) {
  std::vector<std::string> out;
  if (text::trim(field).empty()) return out;
  for (const auto& part : text::split(field, ',')) {
    auto item = text::trim(part);
    if (!item.empty()) out.emplace_back(item);
  }
  return out;
}

}  // namespace

CycleError::CycleError(std::vector<std::string> cycle)
    : Error(cycle_message(cycle)), cycle_(std::move(cycle)) {}

OntologyGraph OntologyGraph::build(std::vector<Concept> concepts) {
  OntologyGraph g;
  g.concepts_ = std::move(concepts);
  const std::size_t n = g.concepts_.size();

  for (std::uint32_t i = 0; i < n; ++i) {
    const Concept& c = g.concepts_[i];
    if (c.id.empty()) throw Error("ontology concept with empty id");
    if (!g.index_.emplace(c.id, i).second) throw Error("duplicate concept id: " + c.id);
  }

  std::vector<std::vector<std::uint32_t>> parent_index(n);
  g.child_index_.assign(n, {});
  for (std::uint32_t i = 0; i < n; ++i) {
    const Concept& c = g.concepts_[i];
    std::set<std::uint32_t> seen;
    for (const auto& p : c.parents) {
      auto it = g.index_.find(p);
      if (it == g.index_.end()) throw Error("concept " + c.id + " has unknown parent " + p);
      const Concept& parent = g.concepts_[it->second];
      if (parent.axis != c.axis) {
        throw Error("concept " + c.id + " (" + std::string(axis_name(c.axis)) + ") has parent " + p +
                    " on axis " + std::string(axis_name(parent.axis)));
      }
      if (!seen.insert(it->second).second) continue;
      parent_index[i].push_back(it->second);
      g.child_index_[it->second].push_back(i);
      ++g.edge_count_;
    }
  }

  // Iterative DFS along parent edges; a grey hit is a back edge.
  std::vector<std::uint8_t> colour(n, 0);
  std::vector<std::uint32_t> order;
  order.reserve(n);
  for (std::uint32_t root = 0; root < n; ++root) {
    if (colour[root]) continue;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{root, 0}};
    colour[root] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < parent_index[node].size()) {
        std::uint32_t p = parent_index[node][next++];
        if (colour[p] == 1) {
          std::vector<std::string> cycle;
          auto from = std::find_if(stack.begin(), stack.end(), [p](const auto& f) { return f.first == p; });
          for (auto it = from; it != stack.end(); ++it) cycle.push_back(g.concepts_[it->first].id);
          cycle.push_back(g.concepts_[p].id);
          throw CycleError(std::move(cycle));
        }
        if (colour[p] == 0) {
          colour[p] = 1;
          stack.emplace_back(p, 0);
        }
      } else {
        colour[node] = 2;
        order.push_back(node);
        stack.pop_back();
      }
    }
  }

  // `order` lists every concept after all of its ancestors.
  const std::size_t words = (n + 63) / 64;
  g.ancestors_.assign(n, std::vector<std::uint64_t>(words, 0));
  g.depth_.assign(n, 0);
  for (std::uint32_t node : order) {
    auto& bits = g.ancestors_[node];
    bits[node / 64] |= 1ULL << (node % 64);
    for (std::uint32_t p : parent_index[node]) {
      const auto& pb = g.ancestors_[p];
      for (std::size_t w = 0; w < words; ++w) bits[w] |= pb[w];
      g.depth_[node] = std::max(g.depth_[node], g.depth_[p] + 1);
    }
  }

  for (std::uint32_t i = 0; i < n; ++i) {
    const Concept& c = g.concepts_[i];
    std::set<std::string> names;
    names.insert(text::normalize_surface(c.preferred_name));
    for (const auto& s : c.synonyms) names.insert(text::normalize_surface(s));
    for (const auto& name : names) {
      if (name.empty()) continue;
      auto& owners = g.surfaces_[name];
      for (std::uint32_t other : owners) {
        if (g.concepts_[other].axis == c.axis) {
          throw Error("surface '" + name + "' names both " + g.concepts_[other].id + " and " + c.id +
                      " on axis " + std::string(axis_name(c.axis)));
        }
      }
      owners.push_back(i);
    }
  }
  return g;
}

const Concept* OntologyGraph::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &concepts_[it->second];
}

const Concept& OntologyGraph::at(std::string_view id) const { return concepts_[index_or_throw(id)]; }

std::uint32_t OntologyGraph::index_or_throw(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw UnknownConceptError(std::string(id));
  return it->second;
}

bool OntologyGraph::reaches(std::uint32_t from, std::uint32_t to) const {
  return (ancestors_[from][to / 64] >> (to % 64)) & 1ULL;
}

bool OntologyGraph::is_subtype_of(std::string_view descendant, std::string_view ancestor) const {
  return reaches(index_or_throw(descendant), index_or_throw(ancestor));
}

bool OntologyGraph::compatible(std::string_view a, std::string_view b) const {
  std::uint32_t ia = index_or_throw(a), ib = index_or_throw(b);
  if (concepts_[ia].axis != concepts_[ib].axis) return false;
  return reaches(ia, ib) || reaches(ib, ia);
}

const std::string& OntologyGraph::most_specific(std::string_view a, std::string_view b) const {
  std::uint32_t ia = index_or_throw(a), ib = index_or_throw(b);
  if (reaches(ia, ib)) return concepts_[ia].id;
  if (reaches(ib, ia)) return concepts_[ib].id;
  throw Error("most_specific on incompatible concepts " + std::string(a) + " and " + std::string(b));
}

int OntologyGraph::depth(std::string_view id) const { return depth_[index_or_throw(id)]; }

std::vector<std::string> OntologyGraph::roots(SemanticAxis axis) const {
  std::vector<std::string> out;
  for (const auto& c : concepts_)
    if (c.axis == axis && c.parents.empty()) out.push_back(c.id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> OntologyGraph::children(std::string_view id) const {
  std::vector<std::string> out;
  for (std::uint32_t c : child_index_[index_or_throw(id)]) out.push_back(concepts_[c].id);
  std::sort(out.begin(), out.end());
  return out;
}

bool OntologyGraph::is_leaf(std::string_view id) const { return child_index_[index_or_throw(id)].empty(); }

std::vector<std::string> OntologyGraph::concepts_on(SemanticAxis axis) const {
  std::vector<std::string> out;
  for (const auto& c : concepts_)
    if (c.axis == axis) out.push_back(c.id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> OntologyGraph::descendants(std::string_view id) const {
  std::uint32_t root = index_or_throw(id);
  std::vector<std::string> out;
  for (std::uint32_t i = 0; i < concepts_.size(); ++i)
    if (i != root && reaches(i, root)) out.push_back(concepts_[i].id);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::string> OntologyGraph::lookup(std::string_view surface, SemanticAxis axis) const {
  auto it = surfaces_.find(text::normalize_surface(surface));
  if (it == surfaces_.end()) return std::nullopt;
  for (std::uint32_t i : it->second)
    if (concepts_[i].axis == axis) return concepts_[i].id;
  return std::nullopt;
}

std::vector<std::string> OntologyGraph::lookup_all(std::string_view surface) const {
  std::vector<std::string> out;
  auto it = surfaces_.find(text::normalize_surface(surface));
  if (it == surfaces_.end()) return out;
  for (std::uint32_t i : it->second) out.push_back(concepts_[i].id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::string, std::string>> OntologyGraph::surface_entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [surface, owners] : surfaces_)
    for (std::uint32_t i : owners) out.emplace_back(surface, concepts_[i].id);
  std::sort(out.begin(), out.end());
  return out;
}

OntologyGraph parse_ontology(std::istream& in, const std::string& source_name) {
  std::vector<Concept> concepts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto fields = text::split(body, '|');
    if (fields.size() != 5) {
      throw ParseError(source_name, line_no, "expected 5 '|'-separated fields, got " + std::to_string(fields.size()));
    }
    Concept c;
    c.id = std::string(text::trim(fields[0]));
    if (c.id.empty()) throw ParseError(source_name, line_no, "empty concept id");
    auto axis = parse_axis(text::trim(fields[1]));
    if (!axis) throw ParseError(source_name, line_no, "unknown axis '" + std::string(text::trim(fields[1])) + "'");
    c.axis = *axis;
    c.preferred_name = std::string(text::trim(fields[2]));
    if (c.preferred_name.empty()) throw ParseError(source_name, line_no, "empty preferred name for " + c.id);
    c.parents = split_list(fields[3]);
    c.synonyms = split_list(fields[4]);
    concepts.push_back(std::move(c));
  }
  return OntologyGraph::build(std::move(concepts));
}

OntologyGraph load_ontology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open ontology file: " + path.string());
  return parse_ontology(in, path.string());
}

bool is_subtype_of(std::string_view descendant, std::string_view ancestor, const OntologyGraph& onto) {
  return onto.is_subtype_of(descendant, ancestor);
}

bool compatible(std::string_view a, std::string_view b, const OntologyGraph& onto) { return onto.compatible(a, b); }

const std::string& most_specific(std::string_view a, std::string_view b, const OntologyGraph& onto) {
  return onto.most_specific(a, b);
}

}  // namespace medrec
