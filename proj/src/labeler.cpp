#include "citeval/labeler.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "citeval/text.hpp"

namespace citeval {

namespace {

bool is_ws(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_trim_punct(char c) {
  static const std::string set = "\"'(),.;:!?[]{}";
  return set.find(c) != std::string::npos;
}

struct Token {
  size_t begin = 0;       // raw token bounds
  size_t end = 0;
  size_t core_begin = 0;  // bounds after shaving surrounding punctuation
  size_t core_end = 0;
};

std::vector<Token> raw_tokens(std::string_view text) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < text.size()) {
    if (is_ws(text[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < text.size() && !is_ws(text[j])) ++j;
    Token t{i, j, i, j};
    while (t.core_begin < t.core_end && is_trim_punct(text[t.core_begin])) {
      ++t.core_begin;
    }
    while (t.core_end > t.core_begin && is_trim_punct(text[t.core_end - 1])) {
      --t.core_end;
    }
    out.push_back(t);
    i = j;
  }
  return out;
}

bool is_capitalized(std::string_view core) {
  return !core.empty() && std::isupper(static_cast<unsigned char>(core[0]));
}

bool is_numeric(std::string_view core) {
  if (core.empty()) return false;
  if (!std::isdigit(static_cast<unsigned char>(core.front())) ||
      !std::isdigit(static_cast<unsigned char>(core.back()))) {
    return false;
  }
  for (char c : core) {
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.' && c != ',') {
      return false;
    }
  }
  return true;
}

}  // namespace

std::vector<EntitySpan> BuiltinRecognizer::recognize(
    std::string_view text) const {
  std::vector<EntitySpan> out;
  const auto tokens = raw_tokens(text);
  const auto sentences = split_sentences(text);
  auto at_sentence_start = [&](const Token& t) {
    for (const SentenceRange& r : sentences) {
      if (r.begin == t.begin) return true;
    }
    return false;
  };

  size_t i = 0;
  while (i < tokens.size()) {
    const Token& t = tokens[i];
    std::string_view core =
        text.substr(t.core_begin, t.core_end - t.core_begin);
    if (is_numeric(core)) {
      out.push_back({t.core_begin, t.core_end, "num"});
      ++i;
      continue;
    }
    if (is_capitalized(core)) {
      size_t j = i + 1;
      while (j < tokens.size()) {
        const Token& u = tokens[j];
        std::string_view ucore =
            text.substr(u.core_begin, u.core_end - u.core_begin);
        if (!is_capitalized(ucore)) break;
        ++j;
      }
      size_t run_len = j - i;
      // A single capitalized word at a sentence start is sentence case, not
      // a name; a multi-word run is kept whole.
      if (!(run_len == 1 && at_sentence_start(t))) {
        out.push_back(
            {t.core_begin, tokens[j - 1].core_end, "name"});
      }
      i = j;
      continue;
    }
    ++i;
  }

  // Double-quoted phrases, e.g. song or article titles.
  size_t q = 0;
  while (q < text.size()) {
    if (text[q] != '"') {
      ++q;
      continue;
    }
    size_t close = text.find('"', q + 1);
    if (close == std::string_view::npos) break;
    if (close - q > 1 && close - q <= 200) {
      out.push_back({q + 1, close, "quote"});
    }
    q = close + 1;
  }
  return out;
}

std::vector<CommonSubstring> common_substrings(std::string_view answer,
                                               const Passage& passage,
                                               size_t min_len) {
  const std::string& p = passage.text;
  const size_t n = answer.size();
  const size_t m = p.size();
  std::vector<CommonSubstring> out;
  if (n == 0 || m == 0 || min_len == 0) return out;

  // best[e]: length of the longest common substring that ends at answer
  // offset e. The occurrence [e - best[e], e) is the only left-maximal
  // common occurrence ending at e; it is right-maximal iff the next column
  // cannot extend it (best[e+1] <= best[e]).
  std::vector<size_t> best(n + 1, 0);
  std::vector<size_t> prev(m + 1, 0), cur(m + 1, 0);
  for (size_t i = 1; i <= n; ++i) {
    size_t row_best = 0;
    for (size_t j = 1; j <= m; ++j) {
      cur[j] = answer[i - 1] == p[j - 1] ? prev[j - 1] + 1 : 0;
      row_best = std::max(row_best, cur[j]);
    }
    best[i] = row_best;
    std::swap(prev, cur);
  }

  std::map<std::string, std::vector<size_t>> groups;
  std::vector<std::string> order;
  for (size_t e = 1; e <= n; ++e) {
    size_t len = best[e];
    if (len < min_len) continue;
    if (e < n && best[e + 1] > len) continue;
    std::string text(answer.substr(e - len, len));
    auto [it, inserted] = groups.try_emplace(std::move(text));
    if (inserted) order.push_back(it->first);
    it->second.push_back(e - len);
  }
  // Positions arrive in ascending end offset, which for one text means
  // ascending start offset; no further sorting needed. Candidates are
  // reported in order of first answer occurrence.
  std::sort(order.begin(), order.end(),
            [&](const std::string& a, const std::string& b) {
              return groups[a].front() != groups[b].front()
                         ? groups[a].front() < groups[b].front()
                         : a.size() > b.size();
            });
  for (const std::string& text : order) {
    out.push_back({text, passage.index, groups[text], text.size()});
  }
  return out;
}

std::vector<SpanMark> mark_spans(std::string_view answer,
                                 const std::vector<Passage>& passages,
                                 const std::vector<EntitySpan>& entities,
                                 const LabelerOptions& options) {
  struct Candidate {
    std::string text;
    int passage_index;
    std::vector<size_t> positions;  // eligible occurrences only
    size_t length;
  };

  auto eligible = [&](size_t pos, size_t len) {
    for (const EntitySpan& e : entities) {
      if (e.begin >= e.end) continue;
      if (options.entity_overlap == EntityOverlap::Any) {
        if (std::max(pos, e.begin) < std::min(pos + len, e.end)) return true;
      } else {
        if (pos <= e.begin && e.end <= pos + len) return true;
      }
    }
    return false;
  };

  std::vector<Candidate> candidates;
  for (const Passage& passage : passages) {
    for (CommonSubstring& cs :
         common_substrings(answer, passage, options.min_len)) {
      std::vector<size_t> keep;
      for (size_t pos : cs.answer_positions) {
        if (eligible(pos, cs.length)) keep.push_back(pos);
      }
      if (keep.empty()) continue;
      candidates.push_back(
          {std::move(cs.text), passage.index, std::move(keep), cs.length});
    }
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.length != b.length) return a.length > b.length;
              if (a.positions.front() != b.positions.front()) {
                return a.positions.front() < b.positions.front();
              }
              return a.passage_index < b.passage_index;
            });

  std::vector<char> marked(answer.size(), 0);
  std::vector<SpanMark> out;
  for (const Candidate& c : candidates) {
    for (size_t pos : c.positions) {
      bool clear = true;
      for (size_t k = pos; k < pos + c.length; ++k) {
        if (marked[k]) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;  // full or partial overlap skips the occurrence
      std::fill(marked.begin() + static_cast<long>(pos),
                marked.begin() + static_cast<long>(pos + c.length), 1);
      out.push_back({pos, pos + c.length, c.passage_index});
      break;  // one mark per candidate
    }
  }
  std::sort(out.begin(), out.end(),
            [](const SpanMark& a, const SpanMark& b) { return a.begin < b.begin; });
  return out;
}

AttributedAnswer build_span_answer(std::string_view answer,
                                   std::vector<SpanMark> marks) {
  std::sort(marks.begin(), marks.end(),
            [](const SpanMark& a, const SpanMark& b) { return a.begin < b.begin; });
  size_t prev_end = 0;
  bool first = true;
  for (const SpanMark& m : marks) {
    if (m.begin >= m.end || m.end > answer.size()) {
      throw Error(ErrorKind::MarkOutOfBounds,
                  "mark [" + std::to_string(m.begin) + ", " +
                      std::to_string(m.end) + ") on answer of length " +
                      std::to_string(answer.size()));
    }
    if (!first && m.begin < prev_end) {
      throw Error(ErrorKind::OverlappingMarks,
                  "mark at " + std::to_string(m.begin) +
                      " overlaps the previous mark");
    }
    prev_end = m.end;
    first = false;
  }

  AttributedAnswer out{CitationLevel::Span, {}};
  size_t cursor = 0;
  auto emit_plain = [&](size_t begin, size_t end) {
    if (end > begin) {
      out.segments.push_back(PlainText{std::string(answer.substr(begin, end - begin))});
    }
  };
  for (const SpanMark& m : marks) {
    // Shrink boundary whitespace into the neighbouring plain text; the
    // markup cannot carry it verbatim. Drop marks the markup cannot encode.
    size_t b = m.begin, e = m.end;
    while (b < e && is_ws(answer[b])) ++b;
    while (e > b && is_ws(answer[e - 1])) --e;
    std::string_view body = answer.substr(b, e - b);
    if (body.empty() || body.find('[') != std::string_view::npos ||
        body.find(']') != std::string_view::npos) {
      continue;
    }
    emit_plain(cursor, b);
    out.segments.push_back(CitedSpan{m.passage_index, std::string(body)});
    cursor = e;
  }
  emit_plain(cursor, answer.size());
  return out;
}

LabeledAnswer label_answer(std::string_view answer,
                           const std::vector<Passage>& passages,
                           const std::set<int>& gold_citations,
                           const EntityRecognizer& recognizer,
                           const LabelerOptions& options,
                           double low_coverage_threshold) {
  std::string canon = canonicalize_ws(answer);
  std::vector<Passage> cited;
  for (const Passage& p : passages) {
    if (gold_citations.count(p.index)) {
      Passage copy = p;
      copy.text = canonicalize_ws(copy.text);
      cited.push_back(std::move(copy));
    }
  }
  const auto entities = recognizer.recognize(canon);
  const auto marks = mark_spans(canon, cited, entities, options);
  LabeledAnswer result;
  result.gold = build_span_answer(canon, marks);

  result.stats.chars_total = canon.size();
  for (const Segment& seg : result.gold.segments) {
    if (const auto* sp = std::get_if<CitedSpan>(&seg)) {
      result.stats.chars_marked += sp->text.size();
    }
  }
  result.stats.low_coverage =
      result.stats.coverage() < low_coverage_threshold;
  return result;
}

}  // namespace citeval
