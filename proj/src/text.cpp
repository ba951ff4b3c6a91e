#include "citeval/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace citeval {

namespace {

bool is_ws(unsigned char c) { return std::isspace(c) != 0; }

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

// Words that take a trailing period without ending the sentence.
const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> set = {
      "mr",  "mrs", "ms",  "dr",   "prof", "sr",   "jr",  "st",
      "vs",  "etc", "e.g", "i.e",  "fig",  "eq",   "no",  "inc",
      "ltd", "co",  "corp", "u.s", "u.k",  "a.m",  "p.m", "approx",
  };
  return set;
}

}  // namespace

std::string canonicalize_ws(std::string_view text) {
  return canonicalize_ws_mapped(text, nullptr);
}

std::string canonicalize_ws_mapped(std::string_view text,
                                   std::vector<size_t>* index_map) {
  std::string out;
  out.reserve(text.size());
  if (index_map) {
    index_map->assign(text.size(), 0);
  }
  bool pending_space = false;
  for (size_t i = 0; i < text.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_ws(c)) {
      if (!out.empty()) pending_space = true;
      // Leading whitespace maps to 0, interior whitespace to the slot the
      // collapsed space will occupy.
      if (index_map) (*index_map)[i] = out.size();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (index_map) (*index_map)[i] = out.size();
    out.push_back(text[i]);
  }
  return out;
}

bool ws_equal(std::string_view a, std::string_view b) {
  return canonicalize_ws(a) == canonicalize_ws(b);
}

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerOptions& options) {
  std::vector<std::string> tokens;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_word_byte(c)) {
      size_t j = i;
      while (j < n && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
      std::string tok(text.substr(i, j - i));
      if (options.lowercase) tok = to_lower_ascii(tok);
      tokens.push_back(std::move(tok));
      i = j;
    } else if (is_ws(c)) {
      ++i;
    } else {
      size_t j = i;
      while (j < n) {
        unsigned char d = static_cast<unsigned char>(text[j]);
        if (is_word_byte(d) || is_ws(d)) break;
        ++j;
      }
      if (options.keep_punctuation) {
        tokens.emplace_back(text.substr(i, j - i));
      }
      i = j;
    }
  }
  return tokens;
}

bool is_stopword(std::string_view token) {
  static const std::unordered_set<std::string> set = {
      "a",    "an",    "the",   "is",    "are",   "was",    "were",  "be",
      "been", "being", "of",    "in",    "on",    "at",     "to",    "for",
      "with", "by",    "from",  "as",    "and",   "or",     "but",   "not",
      "no",   "it",    "its",   "this",  "that",  "these",  "those", "there",
      "their", "they", "them",  "we",    "you",   "he",     "she",   "his",
      "her",  "i",     "do",    "does",  "did",   "have",   "has",   "had",
      "will", "would", "can",   "could", "should", "may",   "might", "about",
      "into", "through", "over", "under", "after", "before", "between",
      "out",  "up",    "down",  "off",   "than",  "then",   "so",    "such",
      "both", "each",  "few",   "more",  "most",  "other",  "some",  "any",
      "all",  "very",  "s",     "t",     "just",  "now",    "what",  "which",
      "who",  "whom",  "when",  "where", "why",   "how",
  };
  return set.count(std::string(token)) > 0;
}

namespace {

// Word immediately before position `pos`, scanning back over letters and
// interior periods ("e.g", "U.S"). Closing quotes and parens are skipped so
// the guard sees the actual word.
std::string word_before(std::string_view text, size_t pos) {
  size_t end = pos;
  while (end > 0) {
    char c = text[end - 1];
    if (c == '"' || c == '\'' || c == ')' || c == ']') {
      --end;
    } else {
      break;
    }
  }
  size_t begin = end;
  while (begin > 0) {
    unsigned char c = static_cast<unsigned char>(text[begin - 1]);
    if (std::isalpha(c) || (c == '.' && begin - 1 > 0 &&
                            std::isalpha(static_cast<unsigned char>(
                                text[begin - 2])))) {
      --begin;
    } else {
      break;
    }
  }
  return std::string(text.substr(begin, end - begin));
}

}  // namespace

std::vector<SentenceRange> split_sentences(std::string_view text) {
  std::vector<SentenceRange> out;
  const size_t n = text.size();
  size_t start = 0;
  while (start < n && is_ws(static_cast<unsigned char>(text[start]))) ++start;
  if (start == n) return out;

  size_t i = start;
  while (i < n) {
    char c = text[i];
    if (c == '.' || c == '?' || c == '!') {
      size_t run_end = i;
      while (run_end < n && (text[run_end] == '.' || text[run_end] == '?' ||
                             text[run_end] == '!')) {
        ++run_end;
      }
      bool at_break = run_end == n ||
                      is_ws(static_cast<unsigned char>(text[run_end]));
      bool guarded = false;
      if (at_break && c == '.' && run_end - i == 1) {
        std::string prev = word_before(text, i);
        if (!prev.empty()) {
          if (prev.size() == 1 &&
              std::isupper(static_cast<unsigned char>(prev[0]))) {
            guarded = true;  // initials: "J. Smith"
          } else {
            std::string low = to_lower_ascii(prev);
            guarded = abbreviations().count(low) > 0;
          }
        }
      }
      if (at_break && !guarded) {
        out.push_back({start, run_end});
        start = run_end;
        while (start < n && is_ws(static_cast<unsigned char>(text[start]))) {
          ++start;
        }
        i = start;
        if (start >= n) return out;
        continue;
      }
      i = run_end;
      continue;
    }
    ++i;
  }
  // Trailing text without terminal punctuation forms the last sentence.
  size_t end = n;
  while (end > start && is_ws(static_cast<unsigned char>(text[end - 1]))) {
    --end;
  }
  if (end > start) out.push_back({start, end});
  return out;
}

std::vector<std::string> sentence_texts(std::string_view text) {
  std::vector<std::string> out;
  for (const SentenceRange& r : split_sentences(text)) {
    out.emplace_back(text.substr(r.begin, r.end - r.begin));
  }
  return out;
}

}  // namespace citeval
