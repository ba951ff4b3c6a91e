#include "citeval/prompting.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "citeval/text.hpp"

namespace citeval {

namespace {

constexpr const char* kInstructionSpan =
    "Answer the question by summarizing the given sources while explicitly "
    "copying spans from the sources. When copying a span, use brackets and "
    "the respective source number to indicate that this span was copied. Use "
    "explicit copying as much as possible and for all factual statements, "
    "while preserving fluency. Make sure to use all relevant sources and "
    "properly quote them.";

constexpr const char* kInstructionSentence =
    "Answer the question by summarizing the given sources while citing the "
    "passage number after each sentence. When citing, use brackets and the "
    "respective source number to indicate which sources support the "
    "sentence. Cite as much as possible and for all factual statements, "
    "while preserving fluency. Make sure to use all relevant sources and "
    "properly cite them.";

constexpr const char* kInstructionPassage =
    "Answer the question by summarizing the given sources while listing the "
    "supporting passages at the end of the answer. When citing, use brackets "
    "and the respective source numbers to indicate which sources support the "
    "answer. Make sure to use all relevant sources and properly cite them.";

constexpr const char* kLeadSpan =
    "Lets analyze the relevant spans of information from the input passages.";
constexpr const char* kLeadSentence =
    "Lets analyze the relevant information from the input passages.";
constexpr const char* kLeadPassage = "Lets analyze the input passages.";

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string join(const std::vector<std::string>& parts,
                 const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Cited content per passage with sentence granularity: a span-level gold is
// lifted so each cited passage maps to the sentences its spans live in.
std::map<int, std::vector<std::string>> sentence_content(
    const AttributedAnswer& gold, const std::vector<Passage>& passages) {
  if (gold.level == CitationLevel::Span) {
    return cited_content(derive_level(gold, CitationLevel::Sentence), passages);
  }
  return cited_content(gold, passages);
}

}  // namespace

const char* to_string(CoTMethod method) {
  switch (method) {
    case CoTMethod::None: return "none";
    case CoTMethod::Span: return "span";
    case CoTMethod::Sentence: return "sentence";
    case CoTMethod::Passage: return "passage";
  }
  return "unknown";
}

std::optional<CoTMethod> cot_from_string(std::string_view name) {
  if (name == "none") return CoTMethod::None;
  if (name == "span") return CoTMethod::Span;
  if (name == "sentence") return CoTMethod::Sentence;
  if (name == "passage") return CoTMethod::Passage;
  return std::nullopt;
}

TfIdfScorer::TfIdfScorer(const std::vector<std::string>& pool) {
  const double n = static_cast<double>(pool.size());
  std::unordered_map<std::string, double> df;
  for (const std::string& doc : pool) {
    std::set<std::string> seen;
    for (std::string& tok : tokenize(doc)) seen.insert(std::move(tok));
    for (const std::string& tok : seen) df[tok] += 1.0;
  }
  for (const auto& [tok, count] : df) {
    weight_[tok] = std::log((1.0 + n) / (1.0 + count)) + 1.0;
  }
  default_idf_ = std::log(1.0 + n) + 1.0;
}

double TfIdfScorer::idf(const std::string& token) const {
  auto it = weight_.find(token);
  return it == weight_.end() ? default_idf_ : it->second;
}

std::unordered_map<std::string, double> TfIdfScorer::vectorize(
    std::string_view text) const {
  std::unordered_map<std::string, double> tf;
  for (std::string& tok : tokenize(text)) tf[std::move(tok)] += 1.0;
  double norm = 0.0;
  for (auto& [tok, value] : tf) {
    value *= idf(tok);
    norm += value * value;
  }
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& [tok, value] : tf) value /= norm;
  }
  return tf;
}

double TfIdfScorer::score(std::string_view query,
                          std::string_view candidate) const {
  const auto qa = vectorize(query);
  const auto ca = vectorize(candidate);
  const auto& small = qa.size() <= ca.size() ? qa : ca;
  const auto& large = qa.size() <= ca.size() ? ca : qa;
  double dot = 0.0;
  for (const auto& [tok, value] : small) {
    auto it = large.find(tok);
    if (it != large.end()) dot += value * it->second;
  }
  return dot;
}

std::vector<size_t> select_fewshot(std::string_view question,
                                   const std::vector<std::string>& pool,
                                   size_t k, const SimilarityScorer& scorer) {
  if (k > pool.size()) {
    throw Error(ErrorKind::PoolTooSmall,
                "need " + std::to_string(k) + " fewshots from a pool of " +
                    std::to_string(pool.size()));
  }
  std::vector<size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> scores(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) {
    scores[i] = scorer.score(question, pool[i]);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  order.resize(k);
  return order;
}

PromptTemplates::PromptTemplates()
    : instruction_span(kInstructionSpan),
      instruction_sentence(kInstructionSentence),
      instruction_passage(kInstructionPassage) {}

PromptTemplates PromptTemplates::with_overrides(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::Config, "prompt override directory not found: " + dir);
  }
  PromptTemplates out;
  auto load = [&](const char* name, std::string& slot) {
    fs::path path = fs::path(dir) / name;
    if (!fs::exists(path)) return;
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    slot = trim(buf.str());
  };
  load("instruction_span.txt", out.instruction_span);
  load("instruction_sentence.txt", out.instruction_sentence);
  load("instruction_passage.txt", out.instruction_passage);
  return out;
}

const std::string& instruction_for(CitationLevel level,
                                   const PromptTemplates& templates) {
  switch (level) {
    case CitationLevel::Span: return templates.instruction_span;
    case CitationLevel::Sentence: return templates.instruction_sentence;
    case CitationLevel::Passage: return templates.instruction_passage;
  }
  return templates.instruction_span;
}

const char* answer_label(CitationLevel level) {
  return level == CitationLevel::Span ? "Quoted summary" : "Answer";
}

std::string build_cot_prefix(const AttributedAnswer& gold,
                             const std::vector<Passage>& passages,
                             CoTMethod method) {
  if (method == CoTMethod::None) return "";
  const std::set<int> indices = cited_indices(gold);
  if (indices.empty()) {
    throw Error(ErrorKind::UnresolvableCitation,
                "gold answer cites no passages");
  }
  std::map<int, std::vector<std::string>> content;
  try {
    content = method == CoTMethod::Sentence
                  ? sentence_content(gold, passages)
                  : cited_content(gold, passages);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::IndexOutOfRange) throw;
    throw Error(ErrorKind::UnresolvableCitation,
                "gold answer cites a passage outside the provided list",
                e.detail());
  }

  std::vector<std::string> lines;
  switch (method) {
    case CoTMethod::Passage: {
      lines.push_back(kLeadPassage);
      std::string nums;
      for (int idx : indices) {
        if (!nums.empty()) nums += ", ";
        nums += std::to_string(idx);
      }
      lines.push_back(
          "The only relevant passages to the question are passages " + nums +
          ".");
      break;
    }
    case CoTMethod::Sentence:
      lines.push_back(kLeadSentence);
      for (int idx : indices) {
        lines.push_back("From passage [" + std::to_string(idx) +
                        "], we know that: " + join(content[idx], " "));
      }
      break;
    case CoTMethod::Span:
      lines.push_back(kLeadSpan);
      for (int idx : indices) {
        lines.push_back("From passage [" + std::to_string(idx) +
                        "], the relevant spans are the following:");
        for (const std::string& item : content[idx]) {
          lines.push_back("  * " + item);
        }
      }
      break;
    case CoTMethod::None:
      break;
  }
  lines.push_back(kAnswerMarker);
  return join(lines, "\n");
}

namespace {

std::string passage_lines(const std::vector<Passage>& passages) {
  std::string out;
  for (const Passage& p : passages) {
    out += "[" + std::to_string(p.index) + "] ";
    if (!p.title.empty()) {
      out += p.title + ": ";
    }
    out += p.text + "\n";
  }
  return out;
}

}  // namespace

std::string render_fewshot_block(const PromptExample& example,
                                 CoTMethod method,
                                 const PromptTemplates& /*templates*/) {
  std::string block = "Question: " + example.question + "\n";
  block += passage_lines(example.passages);
  block += std::string(answer_label(example.gold.level)) + ": ";
  if (method != CoTMethod::None) {
    block += build_cot_prefix(example.gold, example.passages, method) + " ";
  }
  block += serialize(example.gold);
  return block;
}

PromptBundle build_prompt(std::string_view question,
                          const std::vector<Passage>& passages,
                          const std::vector<PromptExample>& fewshots,
                          CitationLevel level, CoTMethod method,
                          const PromptTemplates& templates) {
  PromptBundle bundle;
  bundle.instruction = instruction_for(level, templates);
  for (const PromptExample& ex : fewshots) {
    if (ex.gold.level != level) {
      throw Error(ErrorKind::LevelMismatch,
                  "fewshot gold is not at the prompt's citation level");
    }
    bundle.fewshot_blocks.push_back(render_fewshot_block(ex, method, templates));
  }
  bundle.query_block = "Question: " + std::string(question) + "\n" +
                       passage_lines(passages) +
                       std::string(answer_label(level)) + ":";
  return bundle;
}

std::string render_prompt(const PromptBundle& bundle) {
  std::string out = bundle.instruction;
  if (!bundle.fewshot_blocks.empty()) {
    out += " Here are some examples:";
    for (const std::string& block : bundle.fewshot_blocks) {
      out += "\n\n" + block;
    }
  }
  out += "\n\n" + bundle.query_block;
  return out;
}

std::pair<std::optional<std::string>, std::string> split_response(
    std::string_view response, std::string_view marker) {
  const size_t pos = response.rfind(marker);
  if (pos == std::string_view::npos) {
    return {std::nullopt, trim(response)};
  }
  return {trim(response.substr(0, pos)),
          trim(response.substr(pos + marker.size()))};
}

}  // namespace citeval
