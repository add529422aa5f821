#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "medrec/types.hpp"

namespace medrec {

struct Concept {
  std::string id;
  SemanticAxis axis = SemanticAxis::Other;
  std::string preferred_name;
  std::vector<std::string> parents;
  std::vector<std::string> synonyms;
};

// Malformed ontology or gold file; carries the 1-based line when known.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& message)
      : Error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class CycleError : public Error {
 public:
  explicit CycleError(std::vector<std::string> cycle);
  // Concepts on the cycle, first element repeated at the end.
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

// Immutable is-a DAG of medical concepts partitioned into semantic axes.
// Subtype queries are answered from a precomputed reflexive-transitive
// closure, so every query is O(1) after construction.
class OntologyGraph {
 public:
  OntologyGraph() = default;

  // Validates unique ids, resolvable same-axis parents, acyclicity and
  // per-axis uniqueness of surface strings.
  static OntologyGraph build(std::vector<Concept> concepts);

  std::size_t size() const { return concepts_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<Concept>& concepts() const { return concepts_; }

  const Concept* find(std::string_view id) const;
  const Concept& at(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }

  // Reflexive: every concept is a subtype of itself.
  bool is_subtype_of(std::string_view descendant, std::string_view ancestor) const;
  // Same axis and one is a subtype of the other. Cross-axis pairs are
  // incompatible rather than an error.
  bool compatible(std::string_view a, std::string_view b) const;
  // The descendant of a compatible pair; throws Error for incompatible pairs.
  const std::string& most_specific(std::string_view a, std::string_view b) const;

  // Longest parent chain to a root; roots have depth 0.
  int depth(std::string_view id) const;
  std::vector<std::string> roots(SemanticAxis axis) const;
  std::vector<std::string> children(std::string_view id) const;
  bool is_leaf(std::string_view id) const;
  // Concepts on `axis`, sorted by id.
  std::vector<std::string> concepts_on(SemanticAxis axis) const;
  // Proper descendants of `id`, sorted by id.
  std::vector<std::string> descendants(std::string_view id) const;

  // Case- and whitespace-insensitive lookup of a preferred name or synonym.
  std::optional<std::string> lookup(std::string_view surface, SemanticAxis axis) const;
  // All concepts (any axis) carrying the surface, sorted by id.
  std::vector<std::string> lookup_all(std::string_view surface) const;

  // Every (normalized surface, concept id) pair, sorted.
  std::vector<std::pair<std::string, std::string>> surface_entries() const;

 private:
  std::uint32_t index_or_throw(std::string_view id) const;
  bool reaches(std::uint32_t from, std::uint32_t to) const;

  std::vector<Concept> concepts_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::vector<std::uint32_t>> child_index_;
  std::vector<std::vector<std::uint64_t>> ancestors_;
  std::vector<int> depth_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> surfaces_;
  std::size_t edge_count_ = 0;
};

// Line format: concept_id|axis|preferred_name|parent_ids|synonyms, with
// comma-separated lists that may be empty. '#' starts a comment line.
OntologyGraph parse_ontology(std::istream& in, const std::string& source_name = "<stream>");
OntologyGraph load_ontology(const std::filesystem::path& path);

bool is_subtype_of(std::string_view descendant, std::string_view ancestor, const OntologyGraph& onto);
bool compatible(std::string_view a, std::string_view b, const OntologyGraph& onto);
const std::string& most_specific(std::string_view a, std::string_view b, const OntologyGraph& onto);

}  // namespace medrec
