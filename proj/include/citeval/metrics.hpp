#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "citeval/citation.hpp"
#include "citeval/text.hpp"

// Answer-quality metrics (ROUGE-L plus externally computed BERTScore and
// HEM) and citation-quality metrics (ALCE citation F1, span copy accuracy,
// document-level F1, semantic span F1). Scores live in [0, 1]; reports
// render them x100 with two decimals.

namespace citeval {

inline constexpr const char* kMetricBert = "BERT";
inline constexpr const char* kMetricHem = "HEM";
inline constexpr const char* kMetricRougeL = "RL";
inline constexpr const char* kMetricAlceF1 = "ALCE F1";
inline constexpr const char* kMetricCsca = "CSCA";
inline constexpr const char* kMetricDocF1 = "DOC F1";
inline constexpr const char* kMetricSemF1 = "SEM-F1(t)";

// Report column order within each family.
const std::vector<std::string>& answer_metric_names();
const std::vector<std::string>& citation_metric_names();

enum class Applicability {
  Computed,
  NotApplicable,    // metric undefined at this citation level
  ExternalPending,  // waits for a sidecar scorer response
};

struct MetricValue {
  double score = 0.0;
  Applicability status = Applicability::NotApplicable;
  bool operator==(const MetricValue&) const = default;
};

struct MetricReport {
  std::map<std::string, MetricValue> per_metric;
  // Means over the Computed metrics of each family; absent when none are.
  std::optional<double> answer_avg;
  std::optional<double> citation_avg;
};

// "93.12" style rendering for tables.
std::string render_score(double score);

class EntailmentJudge {
 public:
  virtual ~EntailmentJudge() = default;
  virtual bool entails(std::string_view premise,
                       std::string_view hypothesis) const = 0;
};

// entails() iff at least `threshold` of the hypothesis' content words (stop
// words removed) occur in the premise. A hypothesis with no content words is
// vacuously entailed.
class LexicalJudge : public EntailmentJudge {
 public:
  explicit LexicalJudge(double threshold = 0.5) : threshold_(threshold) {}
  bool entails(std::string_view premise,
               std::string_view hypothesis) const override;

 private:
  double threshold_;
};

// ROUGE-L F-measure (beta = 1) over word tokens; 0 when either side has no
// tokens or the LCS is empty.
double rouge_l(std::string_view candidate, std::string_view reference,
               const TokenizerOptions& tokenizer = {});

// F1 over token multisets. Both sides empty -> 1, exactly one empty -> 0.
double token_f1(std::string_view a, std::string_view b,
                const TokenizerOptions& tokenizer = {});

// Semantic span F1: token_f1 of the concatenated cited content, per passage
// index, averaged over the union of cited indices. An index cited by only
// one side scores 0; two answers citing nothing score 1. `lenient` keeps
// out-of-range citations instead of throwing Error(IndexOutOfRange).
double sem_f1(const AttributedAnswer& pred, const AttributedAnswer& gold,
              const std::vector<Passage>& passages,
              const TokenizerOptions& tokenizer = {}, bool lenient = false);

// Set F1 over cited passage indices. Both empty -> 1, one empty -> 0.
double doc_f1(const std::set<int>& pred, const std::set<int>& gold);
double doc_f1(const AttributedAnswer& pred, const AttributedAnswer& gold);

struct CscaCounts {
  size_t correct = 0;
  size_t total = 0;
  double score() const {
    return total == 0 ? 1.0  // no spans: vacuously accurate
                      : static_cast<double>(correct) /
                            static_cast<double>(total);
  }
};

// Citation span copy accuracy: the fraction of spans whose text occurs
// verbatim (after whitespace canonicalization) in the passage they cite.
// A span citing an out-of-range passage counts as incorrect. Only defined
// for span-level answers; throws Error(NotApplicable) otherwise.
CscaCounts csca_counts(const AttributedAnswer& answer,
                       const std::vector<Passage>& passages);
double csca(const AttributedAnswer& answer,
            const std::vector<Passage>& passages);

struct AlcePR {
  double precision = 0.0;
  double recall = 0.0;
  size_t units = 0;
  size_t citations = 0;
};

// ALCE-style citation precision/recall over statement units. Units are
// sentences; at span level each sentence inherits the citations of the
// spans it overlaps, at passage level every sentence carries the answer's
// terminal citation set. A unit scores recall 1 iff the concatenation of
// its cited passages entails it (uncited units score 0). A citation c is
// imprecise iff its passage alone does not entail the unit while the other
// citations together do. With no citations anywhere precision is 1.0 by
// convention. Throws Error(NoUnits) for an answer without sentences.
AlcePR alce_citation_pr(const AttributedAnswer& answer,
                        const std::vector<Passage>& passages,
                        const EntailmentJudge& judge);

// Harmonic mean; 0 when both inputs are 0.
double alce_f1(double precision, double recall);

// All metrics for one prediction. BERT and HEM come from `external` (keyed
// by metric name) when present, otherwise they are marked ExternalPending.
// CSCA is NotApplicable off span level; ALCE is NotApplicable when the
// prediction has no statement units.
MetricReport score_example(const AttributedAnswer& pred,
                           const AttributedAnswer& gold,
                           const std::vector<Passage>& passages,
                           const EntailmentJudge& judge,
                           const std::map<std::string, double>* external = nullptr);

// Sidecar protocol for external scorers (BERTScore, HEM): one JSONL request
// per candidate/reference pair, responses merged back by id. docs/schema.md
// documents both line formats.
struct ExternalRequest {
  std::string id;
  std::string candidate;
  std::string reference;
};

void write_external_requests(const std::string& path,
                             const std::vector<ExternalRequest>& requests);

// id -> metric name -> score.
std::map<std::string, std::map<std::string, double>> read_external_scores(
    const std::string& path);

}  // namespace citeval
