#include "citeval/citation.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <climits>
#include <optional>

#include "citeval/text.hpp"

namespace citeval {

namespace {

bool is_ws(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && is_ws(s[b])) ++b;
  while (e > b && is_ws(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<int> dedup_keep_order(const std::vector<int>& v) {
  std::vector<int> out;
  for (int x : v) {
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  }
  return out;
}

// ---- sentence/passage marker scanning ------------------------------------
//
// A marker token is [i] with no interior whitespace; a marker group is a run
// of tokens separated only by whitespace ("[1][5]" or "[1] [5]").

struct MarkerGroup {
  size_t begin = 0;
  size_t end = 0;
  std::vector<int> indices;
};

std::optional<std::pair<size_t, int>> marker_token_at(std::string_view s,
                                                      size_t i) {
  if (i >= s.size() || s[i] != '[') return std::nullopt;
  size_t j = i + 1;
  size_t d0 = j;
  while (j < s.size() && is_digit(s[j])) ++j;
  if (j == d0 || j >= s.size() || s[j] != ']') return std::nullopt;
  long value = 0;
  auto res = std::from_chars(s.data() + d0, s.data() + j, value);
  if (res.ec != std::errc() || value < 1 || value > INT_MAX) {
    return std::nullopt;
  }
  return std::make_pair(j + 1, static_cast<int>(value));
}

std::vector<MarkerGroup> find_marker_groups(std::string_view s) {
  std::vector<MarkerGroup> groups;
  size_t i = 0;
  while (i < s.size()) {
    auto tok = marker_token_at(s, i);
    if (!tok) {
      ++i;
      continue;
    }
    MarkerGroup g;
    g.begin = i;
    g.indices.push_back(tok->second);
    size_t cur = tok->first;
    while (true) {
      size_t k = cur;
      while (k < s.size() && is_ws(s[k])) ++k;
      auto next = marker_token_at(s, k);
      if (!next) break;
      g.indices.push_back(next->second);
      cur = next->first;
    }
    g.end = cur;
    groups.push_back(std::move(g));
    i = cur;
  }
  return groups;
}

// Inserts " [i][j]" before the trailing [.?!]+ run, or appends when there is
// no trailing punctuation.
std::string insert_markers(const std::string& text,
                           const std::vector<int>& citations) {
  std::string markers;
  for (int c : citations) {
    markers += "[" + std::to_string(c) + "]";
  }
  if (text.empty()) return markers;
  size_t run = text.size();
  while (run > 0) {
    char c = text[run - 1];
    if (c == '.' || c == '?' || c == '!') {
      --run;
    } else {
      break;
    }
  }
  if (run == text.size()) return text + " " + markers;
  return text.substr(0, run) + " " + markers + text.substr(run);
}

// ---- per-level parsers ----------------------------------------------------

AttributedAnswer parse_span(std::string_view raw, bool strict) {
  AttributedAnswer ans{CitationLevel::Span, {}};
  std::string plain;
  auto flush = [&] {
    if (!plain.empty()) {
      ans.segments.push_back(PlainText{plain});
      plain.clear();
    }
  };
  const size_t n = raw.size();
  size_t i = 0;
  while (i < n) {
    // A span opens at '[' + whitespace + integer + whitespace; [i] markers
    // and any other literal bracket are plain text at this level.
    if (raw[i] == '[' && i + 1 < n && is_ws(raw[i + 1])) {
      size_t j = i + 1;
      while (j < n && is_ws(raw[j])) ++j;
      size_t d0 = j;
      while (j < n && is_digit(raw[j])) ++j;
      long idx = 0;
      bool ok = j > d0 && j < n && is_ws(raw[j]);
      if (ok) {
        auto res = std::from_chars(raw.data() + d0, raw.data() + j, idx);
        ok = res.ec == std::errc() && idx >= 1 && idx <= INT_MAX;
      }
      if (!ok) {
        if (strict) {
          throw Error(ErrorKind::StrictParse,
                      "span opener without a positive integer index");
        }
        plain.push_back(raw[i]);
        ++i;
        continue;
      }
      size_t close = raw.find(']', j);
      if (close == std::string_view::npos) {
        if (strict) throw Error(ErrorKind::StrictParse, "unclosed span bracket");
        plain.push_back(raw[i]);
        ++i;
        continue;
      }
      std::string_view body = raw.substr(j, close - j);
      if (body.find('[') != std::string_view::npos) {
        // Spans do not nest; rescanning from i+1 gives the inner opener its
        // chance while the outer '[' degrades to text.
        if (strict) {
          throw Error(ErrorKind::StrictParse, "nested bracket inside span");
        }
        plain.push_back(raw[i]);
        ++i;
        continue;
      }
      std::string text = trim(body);
      if (text.empty()) {
        if (strict) throw Error(ErrorKind::StrictParse, "empty span body");
        plain.push_back(raw[i]);
        ++i;
        continue;
      }
      flush();
      ans.segments.push_back(CitedSpan{static_cast<int>(idx), std::move(text)});
      i = close + 1;
      continue;
    }
    plain.push_back(raw[i]);
    ++i;
  }
  flush();
  return ans;
}

AttributedAnswer parse_sentence(std::string_view raw, bool /*strict*/) {
  const auto groups = find_marker_groups(raw);
  std::string masked(raw);
  for (const auto& g : groups) {
    for (size_t k = g.begin; k < g.end; ++k) masked[k] = ' ';
  }
  const auto ranges = split_sentences(masked);

  AttributedAnswer ans{CitationLevel::Sentence, {}};
  if (ranges.empty()) {
    // Marker-only input: no sentence to attach to, keep it as literal text.
    ans.segments.push_back(PlainText{trim(raw)});
    return ans;
  }

  // Groups fully inside a sentence may be terminal markers; groups in the
  // gap after a sentence belong to that sentence ("text. [1]" form). A group
  // before the first sentence attaches to the first.
  struct Attached {
    size_t pos;
    const MarkerGroup* group;
    bool inside;
  };
  std::vector<std::vector<Attached>> per_sentence(ranges.size());
  for (const auto& g : groups) {
    bool placed = false;
    for (size_t s = 0; s < ranges.size(); ++s) {
      if (g.begin >= ranges[s].begin && g.end <= ranges[s].end) {
        per_sentence[s].push_back({g.begin, &g, true});
        placed = true;
        break;
      }
    }
    if (placed) continue;
    size_t home = 0;
    for (size_t s = 0; s < ranges.size(); ++s) {
      if (ranges[s].end <= g.begin) home = s;
    }
    per_sentence[home].push_back({g.begin, &g, false});
  }

  for (size_t s = 0; s < ranges.size(); ++s) {
    const SentenceRange& r = ranges[s];
    // Trailing [.?!]+ run of the sentence, on the masked text.
    size_t punct = r.end;
    while (punct > r.begin) {
      char c = masked[punct - 1];
      if (c == '.' || c == '?' || c == '!') {
        --punct;
      } else {
        break;
      }
    }
    std::sort(per_sentence[s].begin(), per_sentence[s].end(),
              [](const Attached& a, const Attached& b) { return a.pos < b.pos; });

    std::vector<int> citations;
    const MarkerGroup* terminal = nullptr;
    for (const Attached& at : per_sentence[s]) {
      if (at.inside) {
        // Terminal iff only whitespace separates the group from the final
        // punctuation run (which equals the sentence end when there is no
        // trailing punctuation); anything else keeps the group literal.
        bool ws_only = at.group->end <= punct;
        for (size_t k = at.group->end; ws_only && k < punct; ++k) {
          if (!is_ws(masked[k])) ws_only = false;
        }
        if (ws_only) {
          terminal = at.group;
          citations.insert(citations.end(), at.group->indices.begin(),
                           at.group->indices.end());
        }
      } else {
        citations.insert(citations.end(), at.group->indices.begin(),
                         at.group->indices.end());
      }
    }

    std::string text;
    if (terminal) {
      size_t left_end = terminal->begin;
      while (left_end > r.begin && is_ws(raw[left_end - 1])) --left_end;
      std::string_view tail = raw.substr(terminal->end, r.end - terminal->end);
      size_t t = 0;
      while (t < tail.size() && is_ws(tail[t])) ++t;
      text = std::string(raw.substr(r.begin, left_end - r.begin)) +
             std::string(tail.substr(t));
    } else {
      text = std::string(raw.substr(r.begin, r.end - r.begin));
    }

    citations = dedup_keep_order(citations);
    if (citations.empty()) {
      ans.segments.push_back(PlainText{std::move(text)});
    } else {
      ans.segments.push_back(CitedSentence{std::move(text), std::move(citations)});
    }
  }
  return ans;
}

AttributedAnswer parse_passage(std::string_view raw, bool /*strict*/) {
  AttributedAnswer ans{CitationLevel::Passage, {}};
  const auto groups = find_marker_groups(raw);
  if (!groups.empty()) {
    const MarkerGroup& g = groups.back();
    bool terminal = true;
    for (size_t k = g.end; k < raw.size(); ++k) {
      char c = raw[k];
      if (is_ws(c) || c == '.' || c == '?' || c == '!') continue;
      terminal = false;
      break;
    }
    if (terminal) {
      size_t left_end = g.begin;
      while (left_end > 0 && is_ws(raw[left_end - 1])) --left_end;
      std::string_view tail = raw.substr(g.end);
      size_t t = 0;
      while (t < tail.size() && is_ws(tail[t])) ++t;
      std::string text =
          std::string(raw.substr(0, left_end)) + std::string(tail.substr(t));
      if (!trim(text).empty()) {
        ans.segments.push_back(PlainText{std::move(text)});
      }
      ans.segments.push_back(TerminalCitationBlock{dedup_keep_order(g.indices)});
      return ans;
    }
  }
  ans.segments.push_back(PlainText{std::string(raw)});
  return ans;
}

}  // namespace

const char* to_string(CitationLevel level) {
  switch (level) {
    case CitationLevel::Span: return "span";
    case CitationLevel::Sentence: return "sentence";
    case CitationLevel::Passage: return "passage";
  }
  return "unknown";
}

std::optional<CitationLevel> level_from_string(std::string_view name) {
  if (name == "span") return CitationLevel::Span;
  if (name == "sentence") return CitationLevel::Sentence;
  if (name == "passage") return CitationLevel::Passage;
  return std::nullopt;
}

void validate(const AttributedAnswer& answer) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::InvariantViolation, what);
  };
  for (size_t i = 0; i < answer.segments.size(); ++i) {
    const Segment& seg = answer.segments[i];
    switch (answer.level) {
      case CitationLevel::Span:
        if (const auto* p = std::get_if<PlainText>(&seg)) {
          if (p->text.empty()) fail("empty plain-text segment");
        } else if (const auto* sp = std::get_if<CitedSpan>(&seg)) {
          if (sp->passage_index < 1) fail("span cites non-positive index");
          if (sp->text.empty()) fail("empty span text");
          if (sp->text.find('[') != std::string::npos ||
              sp->text.find(']') != std::string::npos) {
            fail("markup bracket inside span text");
          }
        } else {
          fail("segment kind not allowed at span level");
        }
        break;
      case CitationLevel::Sentence:
        if (const auto* p = std::get_if<PlainText>(&seg)) {
          if (p->text.empty()) fail("empty plain-text segment");
        } else if (const auto* cs = std::get_if<CitedSentence>(&seg)) {
          if (cs->text.empty()) fail("empty sentence text");
          if (cs->citations.empty()) fail("sentence with empty citation list");
          for (int c : cs->citations) {
            if (c < 1) fail("sentence cites non-positive index");
          }
        } else {
          fail("segment kind not allowed at sentence level");
        }
        break;
      case CitationLevel::Passage:
        if (const auto* p = std::get_if<PlainText>(&seg)) {
          if (p->text.empty()) fail("empty plain-text segment");
        } else if (const auto* b = std::get_if<TerminalCitationBlock>(&seg)) {
          if (i + 1 != answer.segments.size()) {
            fail("terminal citation block is not the last segment");
          }
          if (b->citations.empty()) fail("empty terminal citation block");
          for (int c : b->citations) {
            if (c < 1) fail("terminal block cites non-positive index");
          }
        } else {
          fail("segment kind not allowed at passage level");
        }
        break;
    }
  }
}

AttributedAnswer parse_answer(std::string_view raw, CitationLevel level,
                              const ParseOptions& options) {
  if (trim(raw).empty()) {
    throw Error(ErrorKind::EmptyInput, "blank answer text");
  }
  AttributedAnswer ans;
  switch (level) {
    case CitationLevel::Span:
      ans = parse_span(raw, options.strict);
      break;
    case CitationLevel::Sentence:
      ans = parse_sentence(raw, options.strict);
      break;
    case CitationLevel::Passage:
      ans = parse_passage(raw, options.strict);
      break;
  }
  if (options.strict && !ws_equal(serialize(ans), raw)) {
    // Inputs that survive the scan but do not round-trip are non-canonical:
    // markers after the final punctuation, stray whitespace inside markup,
    // duplicate citations, and the like.
    throw Error(ErrorKind::StrictParse, "non-canonical citation markup");
  }
  return ans;
}

std::string serialize(const AttributedAnswer& answer) {
  validate(answer);
  std::string out;
  switch (answer.level) {
    case CitationLevel::Span:
      for (const Segment& seg : answer.segments) {
        if (const auto* p = std::get_if<PlainText>(&seg)) {
          out += p->text;
        } else if (const auto* sp = std::get_if<CitedSpan>(&seg)) {
          out += "[ " + std::to_string(sp->passage_index) + " " +
                 canonicalize_ws(sp->text) + " ]";
        }
      }
      break;
    case CitationLevel::Sentence: {
      bool first = true;
      for (const Segment& seg : answer.segments) {
        if (!first) out += " ";
        first = false;
        if (const auto* p = std::get_if<PlainText>(&seg)) {
          out += canonicalize_ws(p->text);
        } else if (const auto* cs = std::get_if<CitedSentence>(&seg)) {
          out += insert_markers(canonicalize_ws(cs->text), cs->citations);
        }
      }
      break;
    }
    case CitationLevel::Passage: {
      std::string text;
      const TerminalCitationBlock* block = nullptr;
      for (const Segment& seg : answer.segments) {
        if (const auto* p = std::get_if<PlainText>(&seg)) {
          if (!text.empty()) text += " ";
          text += canonicalize_ws(p->text);
        } else if (const auto* b = std::get_if<TerminalCitationBlock>(&seg)) {
          block = b;
        }
      }
      out = block ? insert_markers(text, block->citations) : text;
      break;
    }
  }
  return canonicalize_ws(out);
}

std::string strip_citations(const AttributedAnswer& answer) {
  std::string out;
  bool join_with_space = answer.level != CitationLevel::Span;
  for (const Segment& seg : answer.segments) {
    std::string_view piece;
    if (const auto* p = std::get_if<PlainText>(&seg)) {
      piece = p->text;
    } else if (const auto* sp = std::get_if<CitedSpan>(&seg)) {
      piece = sp->text;
    } else if (const auto* cs = std::get_if<CitedSentence>(&seg)) {
      piece = cs->text;
    } else {
      continue;  // terminal block carries no text
    }
    if (join_with_space && !out.empty()) out += " ";
    out += piece;
  }
  return canonicalize_ws(out);
}

std::set<int> cited_indices(const AttributedAnswer& answer) {
  std::set<int> out;
  for (const Segment& seg : answer.segments) {
    if (const auto* sp = std::get_if<CitedSpan>(&seg)) {
      out.insert(sp->passage_index);
    } else if (const auto* cs = std::get_if<CitedSentence>(&seg)) {
      out.insert(cs->citations.begin(), cs->citations.end());
    } else if (const auto* b = std::get_if<TerminalCitationBlock>(&seg)) {
      out.insert(b->citations.begin(), b->citations.end());
    }
  }
  return out;
}

std::map<int, std::vector<std::string>> cited_content(
    const AttributedAnswer& answer, const std::vector<Passage>& passages,
    bool lenient) {
  const int n = static_cast<int>(passages.size());
  auto check = [&](int idx) {
    if (!lenient && (idx < 1 || idx > n)) {
      throw Error(ErrorKind::IndexOutOfRange,
                  "cited passage " + std::to_string(idx) + " of " +
                      std::to_string(n),
                  idx);
    }
  };
  std::map<int, std::vector<std::string>> out;
  switch (answer.level) {
    case CitationLevel::Span:
      for (const Segment& seg : answer.segments) {
        if (const auto* sp = std::get_if<CitedSpan>(&seg)) {
          check(sp->passage_index);
          out[sp->passage_index].push_back(sp->text);
        }
      }
      break;
    case CitationLevel::Sentence:
      for (const Segment& seg : answer.segments) {
        if (const auto* cs = std::get_if<CitedSentence>(&seg)) {
          for (int idx : cs->citations) {
            check(idx);
            out[idx].push_back(cs->text);
          }
        }
      }
      break;
    case CitationLevel::Passage: {
      std::string stripped = strip_citations(answer);
      for (int idx : cited_indices(answer)) {
        check(idx);
        out[idx] = {stripped};
      }
      break;
    }
  }
  return out;
}

AttributedAnswer derive_level(const AttributedAnswer& answer,
                              CitationLevel target) {
  auto rank = [](CitationLevel l) {
    switch (l) {
      case CitationLevel::Span: return 0;
      case CitationLevel::Sentence: return 1;
      case CitationLevel::Passage: return 2;
    }
    return 0;
  };
  if (target == answer.level) return answer;
  if (rank(target) < rank(answer.level)) {
    throw Error(ErrorKind::LevelMismatch,
                std::string("cannot refine ") + to_string(answer.level) +
                    " markup to " + to_string(target));
  }

  if (target == CitationLevel::Passage) {
    AttributedAnswer out{CitationLevel::Passage, {}};
    std::string stripped = strip_citations(answer);
    if (!stripped.empty()) out.segments.push_back(PlainText{stripped});
    std::set<int> idxs = cited_indices(answer);
    if (!idxs.empty()) {
      out.segments.push_back(
          TerminalCitationBlock{{idxs.begin(), idxs.end()}});
    }
    return out;
  }

  // span -> sentence: sentences inherit the citations of every span they
  // overlap, in span order.
  std::string rawcat;
  struct SpanRef {
    size_t begin, end;
    int index;
  };
  std::vector<SpanRef> refs;
  for (const Segment& seg : answer.segments) {
    if (const auto* p = std::get_if<PlainText>(&seg)) {
      rawcat += p->text;
    } else if (const auto* sp = std::get_if<CitedSpan>(&seg)) {
      size_t b = rawcat.size();
      rawcat += sp->text;
      refs.push_back({b, rawcat.size(), sp->passage_index});
    }
  }
  std::vector<size_t> index_map;
  std::string canon = canonicalize_ws_mapped(rawcat, &index_map);
  AttributedAnswer out{CitationLevel::Sentence, {}};
  for (const SentenceRange& r : split_sentences(canon)) {
    std::vector<int> citations;
    for (const SpanRef& ref : refs) {
      if (ref.begin == ref.end) continue;
      size_t nb = index_map[ref.begin];
      size_t ne = index_map[ref.end - 1] + 1;
      if (nb < r.end && r.begin < ne) citations.push_back(ref.index);
    }
    citations = dedup_keep_order(citations);
    std::string text = canon.substr(r.begin, r.end - r.begin);
    if (citations.empty()) {
      out.segments.push_back(PlainText{std::move(text)});
    } else {
      out.segments.push_back(CitedSentence{std::move(text), std::move(citations)});
    }
  }
  return out;
}

}  // namespace citeval
