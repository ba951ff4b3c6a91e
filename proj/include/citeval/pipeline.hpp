#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "citeval/client.hpp"
#include "citeval/dataset.hpp"
#include "citeval/metrics.hpp"
#include "citeval/prompting.hpp"

// Evaluation matrix runner: for every requested (citation level, guidance
// method) cell, build prompts, complete them, journal the raw responses,
// parse leniently and score. Journals make cells resumable and re-scorable
// offline. With a mock client and a fixed spec the emitted JSON report is
// byte-identical across runs.

namespace citeval {

enum class FewshotOrder {
  SimilarLast,  // most similar exemplar rendered right before the query
  SimilarFirst,
};
const char* to_string(FewshotOrder order);
std::optional<FewshotOrder> fewshot_order_from_string(std::string_view name);

// True when markup at `from` can be rewritten at `to` without inventing
// detail (coarsening or identity, never refinement).
bool level_derivable(CitationLevel from, CitationLevel to);

struct RunSpec {
  std::vector<CitationLevel> levels = {
      CitationLevel::Span, CitationLevel::Sentence, CitationLevel::Passage};
  std::vector<CoTMethod> methods = {CoTMethod::None, CoTMethod::Span,
                                    CoTMethod::Sentence, CoTMethod::Passage};
  int fewshot_k = 4;
  FewshotOrder fewshot_order = FewshotOrder::SimilarLast;
  // Level the dataset and train-pool files are written at; every requested
  // level must be derivable from it.
  CitationLevel dataset_level = CitationLevel::Span;
  int max_in_flight = 4;
  int threads = 0;  // scoring kernels; <= 0 lets OpenMP decide
  std::string out_dir;  // journals live here; empty runs without journaling
  GenerationConfig generation;
  PromptTemplates templates;
};

// One line of a per-cell journal. parse_status is one of: "strict",
// "lenient", "empty", or "error:<kind>" for a failed completion. Journals
// are append-only; the newest entry for an id wins.
struct JournalEntry {
  std::string example_id;
  std::string raw_response;
  std::string parse_status;
};

std::string journal_filename(CitationLevel level, CoTMethod method);
std::string journal_line(const JournalEntry& entry);
// Skips unparseable lines (a crash can tear the final one).
std::vector<JournalEntry> read_journal(const std::string& path);

struct ExampleRecord {
  std::string example_id;
  std::string parse_status;
  bool failed = false;    // no usable prediction (completion error / missing)
  std::string failure;    // why, when failed
  std::string candidate;  // stripped prediction text, when not failed
  MetricReport report;    // valid iff !failed
};

struct CellResult {
  CitationLevel level = CitationLevel::Span;
  CoTMethod method = CoTMethod::None;
  size_t n_examples = 0;
  size_t n_failed = 0;
  // Corpus means: each metric averages the per-example Computed scores;
  // family averages mean the Computed metric means of their family.
  MetricReport means;
  // Pooled spans-correct / spans-total across the cell (span level only).
  std::optional<double> csca_micro;
  std::vector<ExampleRecord> records;  // dataset order
};

struct AggregateReport {
  std::vector<CellResult> cells;  // spec.levels (outer) x spec.methods order
};

// Everything known about one prompt at build time. Mock clients key their
// canned responses by `prompt`; tests inspect the rest.
struct PromptRecord {
  std::string example_id;
  CitationLevel level = CitationLevel::Span;
  CoTMethod method = CoTMethod::None;
  int fewshot_k = 0;  // shots actually included (overflow retries shrink it)
  std::string prompt;
  std::string cot_prefix;       // "" for CoTMethod::None
  AttributedAnswer gold;        // derived to `level`
};

struct RunHooks {
  // Fired after each prompt is rendered, before its completion is requested.
  std::function<void(const PromptRecord&)> on_prompt;
};

// The ideal response for a prompt: guidance prefix (marker included) plus
// the serialized gold. Feeding these back through the pipeline must score
// perfectly, which is what the end-to-end fixture asserts.
std::string echo_response(const PromptRecord& record);

// Thread-safe prompt -> response table for mock clients.
class ResponseRegistry {
 public:
  void put(std::string prompt, std::string response);
  std::optional<std::string> get(const std::string& prompt) const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> responses_;
};

// Scores one cell from its responses (newest journal entry per id).
// Externals are keyed by example id. Missing ids become failed records.
CellResult score_cell(
    const std::vector<QAExample>& dataset, CitationLevel level,
    CoTMethod method, const std::map<std::string, JournalEntry>& responses,
    const EntailmentJudge& judge, int threads = 0,
    const std::map<std::string, std::map<std::string, double>>* externals =
        nullptr);

// Runs the whole matrix. Journals under spec.out_dir are read first: a
// non-error entry skips the completion, error entries are re-attempted.
// A completion rejected for prompt length is retried with one fewer shot
// until it fits or shots run out.
AggregateReport run_matrix(const std::vector<QAExample>& dataset,
                           const std::vector<QAExample>& train_pool,
                           const RunSpec& spec, CompletionClient& client,
                           const EntailmentJudge& judge,
                           const RunHooks& hooks = {});

// Candidate/reference pairs for the external-scorer sidecar, one per
// non-failed record, ids "<example_id>|<level>|<method>".
std::vector<ExternalRequest> external_requests(const AggregateReport& report,
                                               const std::vector<QAExample>& dataset);

enum class ReportFormat { Markdown, Csv, Json };
std::optional<ReportFormat> report_format_from_string(std::string_view name);

// Markdown: one table, rows grouped by level, "–" for missing values, best
// Computed value per level block and column bolded (ties all bold). CSV and
// JSON carry raw [0,1] scores at full precision; JSON round-trips through
// report_from_json bit-exactly.
std::string render_report(const AggregateReport& report, ReportFormat format);
void emit_report(const AggregateReport& report, ReportFormat format,
                 const std::string& out_path);
AggregateReport report_from_json_file(const std::string& path);
AggregateReport report_from_json_text(const std::string& text);

struct ConvertCorpusStats {
  size_t lines_converted = 0;
  size_t lines_failed = 0;   // labeling errors
  size_t lines_skipped = 0;  // malformed input rows (lenient load)
  double mean_coverage = 0.0;
  double low_coverage_fraction = 0.0;
};

// Reads a passage- or sentence-labeled corpus, mines span attributions for
// each answer, writes the span-labeled corpus. Lenient load unless strict.
ConvertCorpusStats convert_corpus(const std::string& in_path,
                                  const std::string& out_path,
                                  CitationLevel input_level,
                                  const EntityRecognizer& recognizer,
                                  const LabelerOptions& options,
                                  double low_coverage_threshold = 0.1,
                                  bool strict = false, int threads = 0);

}  // namespace citeval
