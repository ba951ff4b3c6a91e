#include "citeval/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace citeval {

namespace {

using json = nlohmann::json;

std::vector<std::string> content_tokens(std::string_view text,
                                        const TokenizerOptions& opts = {}) {
  std::vector<std::string> out;
  for (std::string& tok : tokenize(text, opts)) {
    if (!is_stopword(tok)) out.push_back(std::move(tok));
  }
  return out;
}

size_t lcs_length(const std::vector<std::string>& a,
                  const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

const Passage* find_passage(const std::vector<Passage>& passages, int index) {
  for (const Passage& p : passages) {
    if (p.index == index) return &p;
  }
  return nullptr;
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

}  // namespace

const std::vector<std::string>& answer_metric_names() {
  static const std::vector<std::string> names = {kMetricBert, kMetricHem,
                                                 kMetricRougeL};
  return names;
}

const std::vector<std::string>& citation_metric_names() {
  static const std::vector<std::string> names = {kMetricAlceF1, kMetricCsca,
                                                 kMetricDocF1, kMetricSemF1};
  return names;
}

std::string render_score(double score) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", score * 100.0);
  return buf;
}

bool LexicalJudge::entails(std::string_view premise,
                           std::string_view hypothesis) const {
  const auto hyp = content_tokens(hypothesis);
  if (hyp.empty()) return true;
  const auto prem = tokenize(premise);
  const std::unordered_set<std::string> prem_set(prem.begin(), prem.end());
  size_t hit = 0;
  for (const std::string& tok : hyp) {
    if (prem_set.count(tok)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(hyp.size()) >=
         threshold_;
}

double rouge_l(std::string_view candidate, std::string_view reference,
               const TokenizerOptions& tokenizer) {
  const auto cand = tokenize(candidate, tokenizer);
  const auto ref = tokenize(reference, tokenizer);
  if (cand.empty() || ref.empty()) return 0.0;
  const size_t lcs = lcs_length(cand, ref);
  if (lcs == 0) return 0.0;
  const double p = static_cast<double>(lcs) / static_cast<double>(cand.size());
  const double r = static_cast<double>(lcs) / static_cast<double>(ref.size());
  return 2.0 * p * r / (p + r);
}

double token_f1(std::string_view a, std::string_view b,
                const TokenizerOptions& tokenizer) {
  const auto ta = tokenize(a, tokenizer);
  const auto tb = tokenize(b, tokenizer);
  if (ta.empty() && tb.empty()) return 1.0;
  if (ta.empty() || tb.empty()) return 0.0;
  std::unordered_map<std::string, size_t> counts;
  for (const std::string& t : ta) ++counts[t];
  size_t overlap = 0;
  for (const std::string& t : tb) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / static_cast<double>(ta.size());
  const double r = static_cast<double>(overlap) / static_cast<double>(tb.size());
  return 2.0 * p * r / (p + r);
}

double sem_f1(const AttributedAnswer& pred, const AttributedAnswer& gold,
              const std::vector<Passage>& passages,
              const TokenizerOptions& tokenizer, bool lenient) {
  if (pred.level != gold.level) {
    throw Error(ErrorKind::LevelMismatch,
                "prediction and gold are at different citation levels");
  }
  const auto pc = cited_content(pred, passages, lenient);
  const auto gc = cited_content(gold, passages, lenient);
  std::set<int> indices;
  for (const auto& [idx, _] : pc) indices.insert(idx);
  for (const auto& [idx, _] : gc) indices.insert(idx);
  if (indices.empty()) return 1.0;  // neither side cites anything

  double sum = 0.0;
  for (int idx : indices) {
    auto pi = pc.find(idx);
    auto gi = gc.find(idx);
    if (pi == pc.end() || gi == gc.end()) continue;  // one side empty: 0
    sum += token_f1(join(pi->second, " "), join(gi->second, " "), tokenizer);
  }
  return sum / static_cast<double>(indices.size());
}

double doc_f1(const std::set<int>& pred, const std::set<int>& gold) {
  if (pred.empty() && gold.empty()) return 1.0;
  if (pred.empty() || gold.empty()) return 0.0;
  size_t overlap = 0;
  for (int idx : pred) {
    if (gold.count(idx)) ++overlap;
  }
  if (overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / static_cast<double>(pred.size());
  const double r = static_cast<double>(overlap) / static_cast<double>(gold.size());
  return 2.0 * p * r / (p + r);
}

double doc_f1(const AttributedAnswer& pred, const AttributedAnswer& gold) {
  return doc_f1(cited_indices(pred), cited_indices(gold));
}

CscaCounts csca_counts(const AttributedAnswer& answer,
                       const std::vector<Passage>& passages) {
  if (answer.level != CitationLevel::Span) {
    throw Error(ErrorKind::NotApplicable,
                "span copy accuracy is only defined for span-level answers");
  }
  std::unordered_map<int, std::string> canon_passages;
  CscaCounts counts;
  for (const Segment& seg : answer.segments) {
    const auto* sp = std::get_if<CitedSpan>(&seg);
    if (!sp) continue;
    ++counts.total;
    const Passage* p = find_passage(passages, sp->passage_index);
    if (!p) continue;  // out-of-range citation scores the span 0
    auto it = canon_passages.find(sp->passage_index);
    if (it == canon_passages.end()) {
      it = canon_passages.emplace(sp->passage_index, canonicalize_ws(p->text))
               .first;
    }
    if (it->second.find(canonicalize_ws(sp->text)) != std::string::npos) {
      ++counts.correct;
    }
  }
  return counts;
}

double csca(const AttributedAnswer& answer,
            const std::vector<Passage>& passages) {
  return csca_counts(answer, passages).score();
}

AlcePR alce_citation_pr(const AttributedAnswer& answer,
                        const std::vector<Passage>& passages,
                        const EntailmentJudge& judge) {
  struct Unit {
    std::string text;
    std::vector<int> citations;
  };
  std::vector<Unit> units;

  auto sentence_units = [&](const AttributedAnswer& sentence_level) {
    for (const Segment& seg : sentence_level.segments) {
      if (const auto* p = std::get_if<PlainText>(&seg)) {
        for (std::string& s : sentence_texts(p->text)) {
          units.push_back({std::move(s), {}});
        }
      } else if (const auto* cs = std::get_if<CitedSentence>(&seg)) {
        units.push_back({cs->text, cs->citations});
      }
    }
  };

  switch (answer.level) {
    case CitationLevel::Span:
      sentence_units(derive_level(answer, CitationLevel::Sentence));
      break;
    case CitationLevel::Sentence:
      sentence_units(answer);
      break;
    case CitationLevel::Passage: {
      const std::set<int> all = cited_indices(answer);
      const std::vector<int> cits(all.begin(), all.end());
      for (std::string& s : sentence_texts(strip_citations(answer))) {
        units.push_back({std::move(s), cits});
      }
      break;
    }
  }
  if (units.empty()) {
    throw Error(ErrorKind::NoUnits, "answer has no statement units");
  }

  auto concat = [&](const std::vector<int>& indices, int skip) {
    std::string premise;
    for (int idx : indices) {
      if (idx == skip) continue;
      if (const Passage* p = find_passage(passages, idx)) {
        if (!premise.empty()) premise += " ";
        premise += p->text;
      }
    }
    return premise;
  };

  AlcePR result;
  result.units = units.size();
  double recall_sum = 0.0;
  size_t precise = 0;
  for (const Unit& u : units) {
    if (u.citations.empty()) continue;  // recall 0, nothing for precision
    const bool full = judge.entails(concat(u.citations, 0), u.text);
    if (full) recall_sum += 1.0;
    for (int c : u.citations) {
      ++result.citations;
      const Passage* pc = find_passage(passages, c);
      const bool alone = pc && judge.entails(pc->text, u.text);
      if (alone) {
        ++precise;
        continue;
      }
      const bool others = judge.entails(concat(u.citations, c), u.text);
      if (!others) ++precise;  // not imprecise: removing c matters
    }
  }
  result.recall = recall_sum / static_cast<double>(units.size());
  result.precision =
      result.citations == 0
          ? 1.0  // no citations anywhere: vacuously precise
          : static_cast<double>(precise) / static_cast<double>(result.citations);
  return result;
}

double alce_f1(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

MetricReport score_example(const AttributedAnswer& pred,
                           const AttributedAnswer& gold,
                           const std::vector<Passage>& passages,
                           const EntailmentJudge& judge,
                           const std::map<std::string, double>* external) {
  if (pred.level != gold.level) {
    throw Error(ErrorKind::LevelMismatch,
                "prediction and gold are at different citation levels");
  }
  MetricReport report;
  auto set = [&](const char* name, double score) {
    report.per_metric[name] = {score, Applicability::Computed};
  };
  auto mark = [&](const char* name, Applicability status) {
    report.per_metric[name] = {0.0, status};
  };

  for (const char* name : {kMetricBert, kMetricHem}) {
    if (external) {
      auto it = external->find(name);
      if (it != external->end()) {
        set(name, it->second);
        continue;
      }
    }
    mark(name, Applicability::ExternalPending);
  }

  set(kMetricRougeL, rouge_l(strip_citations(pred), strip_citations(gold)));
  set(kMetricSemF1, sem_f1(pred, gold, passages, {}, /*lenient=*/true));
  set(kMetricDocF1, doc_f1(pred, gold));

  if (pred.level == CitationLevel::Span) {
    set(kMetricCsca, csca(pred, passages));
  } else {
    mark(kMetricCsca, Applicability::NotApplicable);
  }

  try {
    const AlcePR pr = alce_citation_pr(pred, passages, judge);
    set(kMetricAlceF1, alce_f1(pr.precision, pr.recall));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoUnits) throw;
    mark(kMetricAlceF1, Applicability::NotApplicable);
  }

  auto family_avg = [&](const std::vector<std::string>& names) {
    double sum = 0.0;
    size_t n = 0;
    for (const std::string& name : names) {
      const auto it = report.per_metric.find(name);
      if (it != report.per_metric.end() &&
          it->second.status == Applicability::Computed) {
        sum += it->second.score;
        ++n;
      }
    }
    return n == 0 ? std::optional<double>()
                  : std::optional<double>(sum / static_cast<double>(n));
  };
  report.answer_avg = family_avg(answer_metric_names());
  report.citation_avg = family_avg(citation_metric_names());
  return report;
}

void write_external_requests(const std::string& path,
                             const std::vector<ExternalRequest>& requests) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path);
  }
  for (const ExternalRequest& r : requests) {
    json line = {{"id", r.id}, {"candidate", r.candidate}, {"reference", r.reference}};
    out << line.dump() << "\n";
  }
}

std::map<std::string, std::map<std::string, double>> read_external_scores(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot read " + path);
  }
  std::map<std::string, std::map<std::string, double>> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json parsed = json::parse(line, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("id") ||
        !parsed.contains("metric") || !parsed.contains("score")) {
      throw Error(ErrorKind::Schema,
                  "bad external score line " + std::to_string(lineno), lineno);
    }
    out[parsed["id"].get<std::string>()][parsed["metric"].get<std::string>()] =
        parsed["score"].get<double>();
  }
  return out;
}

}  // namespace citeval
