#pragma once

#include <map>
#include <string>
#include <vector>

#include "citeval/citation.hpp"
#include "citeval/labeler.hpp"

// JSONL dataset ingestion and emission. One example per line:
//   {"id": ..., "question": ..., "passages": [{"title", "text"}, ...],
//    "answer": "<level-formatted markup>",
//    "entities": [{"start", "end", "label"}, ...],   (optional)
//    "external_scores": {"BERT": 0.91, ...}}          (optional)
// Full field reference in docs/schema.md.

namespace citeval {

struct QAExample {
  std::string id;
  std::string question;
  std::vector<Passage> passages;
  AttributedAnswer gold;
  // Pre-computed entity annotations (offsets into the whitespace-canonical
  // stripped answer). Empty means "use the built-in recognizer".
  std::vector<EntitySpan> entities;
  std::map<std::string, double> external_scores;
};

struct LoadStats {
  size_t loaded = 0;
  size_t skipped = 0;  // lenient mode only
};

// Parses one dataset line. line_no is 1-based and only used in error
// messages. Gold answers always parse strictly; a gold citing a passage
// outside [1, passages.size()] is a GoldParse error.
QAExample parse_example_line(const std::string& line, size_t line_no,
                             CitationLevel level);

// Strict mode aborts on the first bad line; lenient mode skips it and
// counts. Duplicate ids follow the same rule. Errors: Io, Schema (carries
// "line N" and the field), GoldParse (carries "line N").
std::vector<QAExample> load_dataset(const std::string& path,
                                    CitationLevel level, bool strict = true,
                                    LoadStats* stats = nullptr);

void save_dataset(const std::vector<QAExample>& examples,
                  const std::string& path);

// One serialized JSONL line, no trailing newline. Key order is fixed so
// rewrites are byte-stable.
std::string example_to_line(const QAExample& example);

}  // namespace citeval
