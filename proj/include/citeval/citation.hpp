#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "citeval/error.hpp"

// Cited-answer markup at three granularities.
//
//   span:     explicit quotes, each wrapped as  [ <passage> <text> ]
//             e.g.  The song is [ 1 a top ten hit ] in [ 2 three countries ].
//   sentence: trailing [i] markers per sentence, before the final punctuation
//             e.g.  The song charted well [1]. It was covered twice [2][3].
//   passage:  one terminal citation block for the whole answer
//             e.g.  The song charted well and was covered twice [1][2].
//
// Lenient parsing is total: anything that does not match the level's grammar
// degrades to plain text. Strict parsing demands canonical markup and is used
// for gold answers. docs/format.md holds the full grammar and the
// conformance fixtures.

namespace citeval {

enum class CitationLevel { Span, Sentence, Passage };

const char* to_string(CitationLevel level);
std::optional<CitationLevel> level_from_string(std::string_view name);

struct PlainText {
  std::string text;
  bool operator==(const PlainText&) const = default;
};

// A verbatim quote attributed to one passage. `text` is trimmed and carries
// no markup brackets.
struct CitedSpan {
  int passage_index = 0;  // 1-based
  std::string text;
  bool operator==(const CitedSpan&) const = default;
};

// A full sentence (final punctuation included) plus its citation list,
// deduplicated in first-occurrence order.
struct CitedSentence {
  std::string text;
  std::vector<int> citations;
  bool operator==(const CitedSentence&) const = default;
};

// Passage-level citation block; always the last segment when present.
struct TerminalCitationBlock {
  std::vector<int> citations;
  bool operator==(const TerminalCitationBlock&) const = default;
};

using Segment =
    std::variant<PlainText, CitedSpan, CitedSentence, TerminalCitationBlock>;

struct AttributedAnswer {
  CitationLevel level = CitationLevel::Span;
  std::vector<Segment> segments;
  bool operator==(const AttributedAnswer&) const = default;
};

struct Passage {
  int index = 0;  // 1-based, contiguous within an example
  std::string title;
  std::string text;
  bool operator==(const Passage&) const = default;
};

struct ParseOptions {
  bool strict = false;
};

// Throws Error(InvariantViolation) when the answer breaks a level invariant:
// wrong segment kind for the level, empty texts, empty citation lists,
// non-positive indices, markup brackets inside span text, or a terminal
// block that is not last.
void validate(const AttributedAnswer& answer);

// Parses `raw` at `level`. Lenient mode never fails on non-blank input;
// strict mode throws Error(StrictParse) on any non-canonical markup.
// Blank input throws Error(EmptyInput) in both modes.
AttributedAnswer parse_answer(std::string_view raw, CitationLevel level,
                              const ParseOptions& options = {});

// Canonical text form; whitespace runs collapse to single spaces. Validates
// first. parse_answer(serialize(a), a.level) == a for canonical answers.
std::string serialize(const AttributedAnswer& answer);

// Answer text with all markup removed, whitespace-canonicalized.
std::string strip_citations(const AttributedAnswer& answer);

// Union of cited passage indices, ascending.
std::set<int> cited_indices(const AttributedAnswer& answer);

// Cited text grouped per passage index, in answer order:
//   span:     the span texts citing that index
//   sentence: each sentence text, once per index it cites
//   passage:  the whole stripped answer under every cited index
// Throws Error(IndexOutOfRange) if a citation exceeds |passages| unless
// `lenient` (then out-of-range indices keep their content).
std::map<int, std::vector<std::string>> cited_content(
    const AttributedAnswer& answer, const std::vector<Passage>& passages,
    bool lenient = false);

// Rewrites an answer at a coarser level: span -> sentence inherits each
// sentence's citations from the spans it overlaps; anything -> passage moves
// the citation union into one terminal block. Refining (e.g. passage ->
// span) is impossible and throws Error(LevelMismatch).
AttributedAnswer derive_level(const AttributedAnswer& answer,
                              CitationLevel target);

}  // namespace citeval
