#pragma once

#include <string>

#include "medrec/types.hpp"

namespace medrec {

// One clinical document after segmentation. Answer documents produced by a
// generator carry the 1-based index of the question they answer.
struct ClinicalDocument {
  std::string doc_id;
  std::string patient_id;
  DocumentCategory category = DocumentCategory::Other;
  std::string text;
  int question_index = 0;

  bool is_llm_answer() const { return question_index > 0; }

  bool operator==(const ClinicalDocument&) const = default;
};

}  // namespace medrec
