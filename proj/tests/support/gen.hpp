#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "citeval/citation.hpp"
#include "citeval/dataset.hpp"
#include "citeval/labeler.hpp"

// Random fixtures for the property tests. The answer generators emit
// canonical-form answers: parse(serialize(a)) == a must hold exactly, so
// texts are single-spaced, bracket-free, and sentence texts end with one
// terminator and never end in an abbreviation-shaped word.

namespace citeval::testgen {

using Rng = std::mt19937_64;

inline const std::vector<std::string>& lower_words() {
  static const std::vector<std::string> words = {
      "granite", "harbor",  "orchard", "beacon",  "velvet",   "lantern",
      "signal",  "meadow",  "timber",  "copper",  "anchor",   "ledger",
      "monsoon", "saffron", "quartz",  "ripple",  "thicket",  "ember",
      "cascade", "drift",   "hollow",  "summit",  "treaty",   "catalog",
  };
  return words;
}

inline const std::vector<std::string>& cap_words() {
  static const std::vector<std::string> words = {
      "Vienna",  "Kepler",   "Nairobi", "Tanaka",  "Helsinki", "Avignon",
      "Brussels", "Morocco", "Danube",  "Kyoto",   "Delphi",   "Bergen",
  };
  return words;
}

inline const std::vector<std::string>& digit_words() {
  static const std::vector<std::string> words = {"1981", "42", "207", "1990"};
  return words;
}

inline std::string word(Rng& rng) {
  std::uniform_int_distribution<int> kind(0, 9);
  int k = kind(rng);
  const auto& pool =
      k < 7 ? lower_words() : (k < 9 ? cap_words() : digit_words());
  std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
  return pool[pick(rng)];
}

inline std::string words(Rng& rng, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += word(rng);
  }
  return out;
}

inline int rand_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Distinct passage indices in random order.
inline std::vector<int> rand_citations(Rng& rng, int count, int max_index) {
  std::vector<int> all;
  for (int i = 1; i <= max_index; ++i) all.push_back(i);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min<size_t>(count, all.size()));
  return all;
}

inline AttributedAnswer random_span_answer(Rng& rng) {
  AttributedAnswer ans{CitationLevel::Span, {}};
  int n = rand_int(rng, 1, 7);
  bool prev_plain = false;
  for (int i = 0; i < n; ++i) {
    bool last = i + 1 == n;
    bool make_span = prev_plain || rand_int(rng, 0, 99) < 55;
    if (make_span) {
      CitedSpan span;
      span.passage_index = rand_int(rng, 1, 8);
      span.text = words(rng, rand_int(rng, 1, 8));
      ans.segments.push_back(std::move(span));
      prev_plain = false;
    } else {
      // Interior plain text keeps its boundary spaces; the outer edges of
      // the answer must be non-blank for canonical form.
      std::string text = words(rng, rand_int(rng, 1, 5));
      if (i > 0) text.insert(text.begin(), ' ');
      if (!last) text += ' ';
      ans.segments.push_back(PlainText{std::move(text)});
      prev_plain = true;
    }
  }
  return ans;
}

inline std::string sentence_text(Rng& rng) {
  return words(rng, rand_int(rng, 3, 9)) + ".";
}

inline AttributedAnswer random_sentence_answer(Rng& rng) {
  AttributedAnswer ans{CitationLevel::Sentence, {}};
  int n = rand_int(rng, 1, 5);
  for (int i = 0; i < n; ++i) {
    std::string text = sentence_text(rng);
    if (rand_int(rng, 0, 99) < 65) {
      ans.segments.push_back(
          CitedSentence{std::move(text), rand_citations(rng, rand_int(rng, 1, 3), 8)});
    } else {
      ans.segments.push_back(PlainText{std::move(text)});
    }
  }
  return ans;
}

inline AttributedAnswer random_passage_answer(Rng& rng) {
  AttributedAnswer ans{CitationLevel::Passage, {}};
  int n = rand_int(rng, 1, 4);
  std::string text;
  for (int i = 0; i < n; ++i) {
    if (i) text += ' ';
    text += sentence_text(rng);
  }
  ans.segments.push_back(PlainText{std::move(text)});
  if (rand_int(rng, 0, 99) < 70) {
    ans.segments.push_back(
        TerminalCitationBlock{rand_citations(rng, rand_int(rng, 1, 4), 8)});
  }
  return ans;
}

inline AttributedAnswer random_answer(Rng& rng, CitationLevel level) {
  switch (level) {
    case CitationLevel::Span: return random_span_answer(rng);
    case CitationLevel::Sentence: return random_sentence_answer(rng);
    case CitationLevel::Passage: return random_passage_answer(rng);
  }
  return random_span_answer(rng);
}

// Arbitrary printable junk, brackets and digits included: exercises the
// lenient parser's totality and the labeler's robustness.
inline std::string random_soup(Rng& rng) {
  static const char alphabet[] =
      "abcdefghijKLMNOP0123456789[]() .,!?\"'\n\t:;-";
  int n = rand_int(rng, 1, 120);
  std::string out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    out += alphabet[rand_int(rng, 0, sizeof(alphabet) - 2)];
  }
  return out;
}

// Random labeling problem: an answer stitched from verbatim passage chunks
// and fresh words, plus a random entity layout. Sized for brute-force
// cross-checks.
struct LabelerInstance {
  std::string answer;
  std::vector<Passage> passages;
  std::vector<EntitySpan> entities;
  LabelerOptions options;
};

inline LabelerInstance random_labeler_instance(Rng& rng,
                                               size_t max_answer_chars = 200,
                                               int max_passages = 5) {
  LabelerInstance inst;
  const int n_passages = rand_int(rng, 1, max_passages);
  std::vector<std::vector<std::string>> passage_words;
  for (int p = 1; p <= n_passages; ++p) {
    Passage passage;
    passage.index = p;
    const int len = rand_int(rng, 8, 25);
    std::vector<std::string> toks;
    for (int i = 0; i < len; ++i) toks.push_back(word(rng));
    passage.text = "";
    for (size_t i = 0; i < toks.size(); ++i) {
      if (i) passage.text += ' ';
      passage.text += toks[i];
    }
    passage_words.push_back(std::move(toks));
    inst.passages.push_back(std::move(passage));
  }

  std::vector<std::string> parts;
  size_t total = 0;
  while (total < max_answer_chars) {
    std::string part;
    if (rand_int(rng, 0, 99) < 55) {
      // Word-aligned chunk of a passage: verbatim because both sides are
      // single-spaced.
      const auto& toks = passage_words[rand_int(rng, 0, n_passages - 1)];
      const int b = rand_int(rng, 0, static_cast<int>(toks.size()) - 1);
      const int e = std::min<int>(b + rand_int(rng, 1, 5), toks.size());
      for (int i = b; i < e; ++i) {
        if (i > b) part += ' ';
        part += toks[i];
      }
    } else {
      part = words(rng, rand_int(rng, 1, 4));
    }
    if (total + part.size() + 1 > max_answer_chars) break;
    parts.push_back(std::move(part));
    total += parts.back().size() + 1;
    if (rand_int(rng, 0, 4) == 0) break;
  }
  if (parts.empty()) parts.push_back(word(rng));
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) inst.answer += ' ';
    inst.answer += parts[i];
  }

  const int n_entities = rand_int(rng, 0, 6);
  for (int i = 0; i < n_entities && !inst.answer.empty(); ++i) {
    const size_t b = rand_int(rng, 0, static_cast<int>(inst.answer.size()) - 1);
    const size_t e =
        std::min(inst.answer.size(),
                 b + static_cast<size_t>(rand_int(rng, 1, 20)));
    inst.entities.push_back({b, e, "rand"});
  }

  inst.options.min_len = static_cast<size_t>(rand_int(rng, 4, 14));
  inst.options.entity_overlap =
      rand_int(rng, 0, 1) ? EntityOverlap::Any : EntityOverlap::Contain;
  return inst;
}

// Passage-labeled corpus whose answers quote passage sentences verbatim and
// carry plenty of entities; the span miner should reach full coverage.
inline std::vector<QAExample> synth_passage_corpus(size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<QAExample> corpus;
  corpus.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    QAExample ex;
    ex.id = "syn-" + std::to_string(i);
    ex.question = "What does entry " + std::to_string(i) + " report about " +
                  cap_words()[i % cap_words().size()] + "?";
    std::vector<std::string> quotable;
    for (int p = 1; p <= 3; ++p) {
      // Each passage: filler sentence + a quotable, entity-rich sentence.
      std::string core = "The " +
                         cap_words()[rand_int(rng, 0, cap_words().size() - 1)] +
                         " " +
                         cap_words()[rand_int(rng, 0, cap_words().size() - 1)] +
                         " " + words(rng, rand_int(rng, 3, 6)) + " in " +
                         digit_words()[rand_int(rng, 0, 3)] + ".";
      Passage passage;
      passage.index = p;
      passage.title = "Source " + std::to_string(p);
      passage.text = sentence_text(rng) + " " + core + " " + sentence_text(rng);
      ex.passages.push_back(std::move(passage));
      if (p <= 2) quotable.push_back(core);
    }
    AttributedAnswer gold{CitationLevel::Passage, {}};
    gold.segments.push_back(PlainText{quotable[0] + " " + quotable[1]});
    gold.segments.push_back(TerminalCitationBlock{{1, 2}});
    ex.gold = std::move(gold);
    corpus.push_back(std::move(ex));
  }
  return corpus;
}

// Span-labeled fixture whose quoted spans are verbatim passage substrings,
// so identity predictions score perfectly on every metric that applies.
inline std::vector<QAExample> synth_span_corpus(size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<QAExample> corpus;
  corpus.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    QAExample ex;
    ex.id = "fx-" + std::to_string(i);
    ex.question = "What do the sources say about " +
                  cap_words()[(i * 5 + 3) % cap_words().size()] + " entry " +
                  std::to_string(i) + "?";
    std::vector<std::string> quotes;
    for (int p = 1; p <= 3; ++p) {
      std::string quote = words(rng, rand_int(rng, 4, 7));
      Passage passage;
      passage.index = p;
      passage.title = "Doc " + std::to_string(p);
      passage.text = sentence_text(rng) + " " + quote + " " +
                     words(rng, rand_int(rng, 2, 4)) + ".";
      ex.passages.push_back(std::move(passage));
      quotes.push_back(quote);
    }
    AttributedAnswer gold{CitationLevel::Span, {}};
    gold.segments.push_back(CitedSpan{1, quotes[0]});
    gold.segments.push_back(PlainText{" and also "});
    gold.segments.push_back(CitedSpan{2, quotes[1]});
    gold.segments.push_back(PlainText{"."});
    ex.gold = std::move(gold);
    corpus.push_back(std::move(ex));
  }
  return corpus;
}

}  // namespace citeval::testgen
