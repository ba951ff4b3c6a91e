#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Text utilities shared by the markup parser, the labeler and the metrics:
// whitespace canonicalization, a rule-based tokenizer and a sentence splitter.
// All rules are byte-oriented; bytes >= 0x80 are treated as word characters so
// UTF-8 sequences stay glued together. Case folding is ASCII-only.

namespace citeval {

// Collapses every whitespace run to a single space and trims both ends.
std::string canonicalize_ws(std::string_view text);

// canonicalize_ws with an old-index -> new-index map. Characters dropped by
// the collapse map to the position their run collapsed into.
std::string canonicalize_ws_mapped(std::string_view text,
                                   std::vector<size_t>* index_map);

// True when both sides are equal after canonicalize_ws.
bool ws_equal(std::string_view a, std::string_view b);

std::string to_lower_ascii(std::string_view text);

struct TokenizerOptions {
  bool lowercase = true;
  // When true, punctuation runs become tokens instead of being dropped.
  bool keep_punctuation = false;
};

// Splits into word tokens: maximal runs of [A-Za-z0-9] or bytes >= 0x80.
// tokenize("") == {}.
std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerOptions& options = {});

// Small English stopword list used by the lexical entailment judge.
// Expects a lowercased token.
bool is_stopword(std::string_view token);

struct SentenceRange {
  size_t begin = 0;  // first non-whitespace character
  size_t end = 0;    // one past the final punctuation run (or last character)
};

// Splits text into sentences on [.?!]+ followed by whitespace or end of text.
// A period does not end a sentence when the preceding word is a known
// abbreviation or a single capital letter (initials).
std::vector<SentenceRange> split_sentences(std::string_view text);

// Convenience: the trimmed sentence substrings themselves.
std::vector<std::string> sentence_texts(std::string_view text);

}  // namespace citeval
