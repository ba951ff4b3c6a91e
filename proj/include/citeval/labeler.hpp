#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "citeval/citation.hpp"

// Span-attribution labeling. Given a plain answer and the passages it draws
// from, find the maximal common substrings between answer and each cited
// passage, keep the ones that carry a named entity, and mark them longest
// first, skipping any candidate that would overlap an existing mark. The
// marked answer serializes to span-level markup whose quotes are verbatim
// by construction.

namespace citeval {

struct EntitySpan {
  size_t begin = 0;  // char offsets into the answer, half-open
  size_t end = 0;
  std::string label;
  bool operator==(const EntitySpan&) const = default;
};

class EntityRecognizer {
 public:
  virtual ~EntityRecognizer() = default;
  virtual std::vector<EntitySpan> recognize(std::string_view text) const = 0;
};

// Rule-based recognizer: runs of capitalized tokens (a lone capitalized
// token at a sentence start is ignored), numeric tokens, and double-quoted
// phrases. Deterministic; rules documented in docs/format.md.
class BuiltinRecognizer : public EntityRecognizer {
 public:
  std::vector<EntitySpan> recognize(std::string_view text) const override;
};

// Serves pre-computed annotations, e.g. the dataset's `entities` sidecar
// field produced by an offline NER run.
class FixedRecognizer : public EntityRecognizer {
 public:
  explicit FixedRecognizer(std::vector<EntitySpan> spans)
      : spans_(std::move(spans)) {}
  std::vector<EntitySpan> recognize(std::string_view) const override {
    return spans_;
  }

 private:
  std::vector<EntitySpan> spans_;
};

struct CommonSubstring {
  std::string text;
  int passage_index = 0;
  // Answer offsets of the maximal occurrences, ascending. An occurrence is
  // maximal when it cannot be extended on either side and still occur in
  // the passage.
  std::vector<size_t> answer_positions;
  size_t length = 0;
  bool operator==(const CommonSubstring&) const = default;
};

struct SpanMark {
  size_t begin = 0;  // half-open answer char range
  size_t end = 0;
  int passage_index = 0;
  bool operator==(const SpanMark&) const = default;
};

enum class EntityOverlap {
  Any,      // candidate intersects an entity span
  Contain,  // candidate fully contains an entity span
};

struct LabelerOptions {
  size_t min_len = 10;  // shortest common substring worth marking, in chars
  EntityOverlap entity_overlap = EntityOverlap::Any;
};

// All maximal common substrings of answer and passage text with length >=
// min_len, grouped by text, in order of first answer occurrence.
// Case-sensitive; callers canonicalize whitespace first.
std::vector<CommonSubstring> common_substrings(std::string_view answer,
                                               const Passage& passage,
                                               size_t min_len);

// Greedy marking: pool candidates from every passage, drop the ones whose
// answer occurrences never satisfy the entity-overlap rule, sort by length
// descending (ties: earlier first eligible occurrence, then lower passage
// index) and mark each candidate's first occurrence that is still fully
// unmarked. Partial overlap with an existing mark skips the occurrence.
// Result is disjoint and sorted by position.
std::vector<SpanMark> mark_spans(std::string_view answer,
                                 const std::vector<Passage>& passages,
                                 const std::vector<EntitySpan>& entities,
                                 const LabelerOptions& options = {});

// Renders answer + marks as a span-level answer. Marks are shrunk to exclude
// boundary whitespace (the markup could not represent it verbatim otherwise)
// and marks whose text carries a bracket are dropped for the same reason, so
// strip_citations(result) always equals canonicalize_ws(answer).
// Throws Error(MarkOutOfBounds) / Error(OverlappingMarks) on invalid input.
AttributedAnswer build_span_answer(std::string_view answer,
                                   std::vector<SpanMark> marks);

struct ConversionStats {
  size_t chars_marked = 0;
  size_t chars_total = 0;
  bool low_coverage = false;
  double coverage() const {
    return chars_total == 0 ? 0.0
                            : static_cast<double>(chars_marked) /
                                  static_cast<double>(chars_total);
  }
};

struct LabeledAnswer {
  AttributedAnswer gold;
  ConversionStats stats;
};

// Whole-answer conversion: canonicalize, recognize entities, mark against
// the gold-cited passages only, build the span answer. `low_coverage` is set
// when the marked fraction falls below `low_coverage_threshold`.
LabeledAnswer label_answer(std::string_view answer,
                           const std::vector<Passage>& passages,
                           const std::set<int>& gold_citations,
                           const EntityRecognizer& recognizer,
                           const LabelerOptions& options = {},
                           double low_coverage_threshold = 0.1);

}  // namespace citeval
