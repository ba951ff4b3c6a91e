#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "citeval/citation.hpp"

// Prompt construction: per-level instructions, fewshot selection by question
// similarity, and the attribution-guidance prefixes that walk the model
// through citing before it answers. Template wording is frozen (including
// the "Lets" spelling) because generation quality and response splitting
// depend on the exact strings; only the instruction paragraphs may be
// overridden from disk.

namespace citeval {

// Guidance flavour for the reasoning prefix; None asks for the answer only.
enum class CoTMethod { None, Span, Sentence, Passage };

const char* to_string(CoTMethod method);
std::optional<CoTMethod> cot_from_string(std::string_view name);

// Final line of every guidance prefix; split_response cuts at its last
// occurrence.
inline constexpr const char* kAnswerMarker = "Thus, the final answer is:";

// A fewshot exemplar; `gold` must be at the prompt's citation level.
struct PromptExample {
  std::string question;
  std::vector<Passage> passages;
  AttributedAnswer gold;
};

struct PromptBundle {
  std::string instruction;
  std::vector<std::string> fewshot_blocks;
  std::string query_block;  // ends with the answer label, awaiting completion
  std::string marker = kAnswerMarker;
};

class SimilarityScorer {
 public:
  virtual ~SimilarityScorer() = default;
  virtual double score(std::string_view query,
                       std::string_view candidate) const = 0;
};

// TF-IDF cosine over lowercased word unigrams, idf fitted on the pool.
// score(q, q) == 1 and never less than score(q, c).
class TfIdfScorer : public SimilarityScorer {
 public:
  explicit TfIdfScorer(const std::vector<std::string>& pool);
  double score(std::string_view query,
               std::string_view candidate) const override;

 private:
  std::unordered_map<std::string, double> weight_;
  std::unordered_map<std::string, double> vectorize(std::string_view text) const;
  double idf(const std::string& token) const;
  double default_idf_ = 1.0;
};

// Indices of the k pool entries most similar to `question`, most similar
// first; ties keep pool order. Throws Error(PoolTooSmall) when k > |pool|.
std::vector<size_t> select_fewshot(std::string_view question,
                                   const std::vector<std::string>& pool,
                                   size_t k, const SimilarityScorer& scorer);

struct PromptTemplates {
  std::string instruction_span;
  std::string instruction_sentence;
  std::string instruction_passage;

  PromptTemplates();  // built-in texts

  // Replaces any instruction that has an instruction_<level>.txt file in
  // `dir`. Throws Error(Config) when the directory does not exist.
  static PromptTemplates with_overrides(const std::string& dir);
};

const std::string& instruction_for(CitationLevel level,
                                   const PromptTemplates& templates);

// Label introducing the answer line: "Quoted summary" at span level (the
// answers are quote collections), "Answer" otherwise.
const char* answer_label(CitationLevel level);

// The reasoning prefix derived from a gold answer, ending with the marker.
// Passage flavour lists the cited passage numbers; sentence flavour quotes
// the cited sentences per passage; span flavour bullets the cited spans per
// passage. Returns "" for CoTMethod::None. Throws
// Error(UnresolvableCitation) when the gold cites nothing or cites a
// passage outside the provided list.
std::string build_cot_prefix(const AttributedAnswer& gold,
                             const std::vector<Passage>& passages,
                             CoTMethod method);

// One rendered fewshot block: question, numbered passages, answer line
// (guidance prefix included when method != None).
std::string render_fewshot_block(const PromptExample& example,
                                 CoTMethod method,
                                 const PromptTemplates& templates);

// Assembles instruction + fewshots + query block. Fewshot golds must be at
// `level` (Error(LevelMismatch) otherwise); the caller fixes their order.
PromptBundle build_prompt(std::string_view question,
                          const std::vector<Passage>& passages,
                          const std::vector<PromptExample>& fewshots,
                          CitationLevel level, CoTMethod method,
                          const PromptTemplates& templates = {});

std::string render_prompt(const PromptBundle& bundle);

// Splits a completion at the LAST marker occurrence into (reasoning,
// answer), both trimmed; a response without the marker is all answer.
std::pair<std::optional<std::string>, std::string> split_response(
    std::string_view response, std::string_view marker = kAnswerMarker);

}  // namespace citeval
