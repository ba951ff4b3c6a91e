#include "citeval/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "citeval/batch.hpp"
#include "citeval/text.hpp"
#include "nlohmann/json.hpp"

namespace citeval {
namespace {

using ordered_json = nlohmann::ordered_json;

bool starts_with(const std::string& s, const char* prefix) {
  return s.rfind(prefix, 0) == 0;
}

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

int level_rank(CitationLevel level) {
  switch (level) {
    case CitationLevel::Span: return 0;
    case CitationLevel::Sentence: return 1;
    case CitationLevel::Passage: return 2;
  }
  return 0;
}

// Full-precision decimal for CSV; the shortest form that round-trips.
std::string full_precision(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::string applicability_token(Applicability status) {
  switch (status) {
    case Applicability::Computed: return "computed";
    case Applicability::NotApplicable: return "not_applicable";
    case Applicability::ExternalPending: return "external_pending";
  }
  return "not_applicable";
}

Applicability applicability_from_token(const std::string& token) {
  if (token == "computed") return Applicability::Computed;
  if (token == "external_pending") return Applicability::ExternalPending;
  if (token == "not_applicable") return Applicability::NotApplicable;
  throw Error(ErrorKind::Schema, "unknown metric status '" + token + "'");
}

ordered_json metric_value_to_json(const MetricValue& value) {
  ordered_json out;
  out["status"] = applicability_token(value.status);
  if (value.status == Applicability::Computed) out["score"] = value.score;
  return out;
}

MetricValue metric_value_from_json(const ordered_json& j) {
  MetricValue out;
  out.status = applicability_from_token(j.at("status").get<std::string>());
  if (out.status == Applicability::Computed) {
    out.score = j.at("score").get<double>();
  }
  return out;
}

ordered_json metric_report_to_json(const MetricReport& report) {
  ordered_json metrics;
  // Fixed column order, answer family first.
  for (const std::string& name : answer_metric_names()) {
    auto it = report.per_metric.find(name);
    if (it != report.per_metric.end()) {
      metrics[name] = metric_value_to_json(it->second);
    }
  }
  for (const std::string& name : citation_metric_names()) {
    auto it = report.per_metric.find(name);
    if (it != report.per_metric.end()) {
      metrics[name] = metric_value_to_json(it->second);
    }
  }
  return metrics;
}

MetricReport metric_report_from_json(const ordered_json& metrics,
                                     const ordered_json& answer_avg,
                                     const ordered_json& citation_avg) {
  MetricReport out;
  for (auto it = metrics.begin(); it != metrics.end(); ++it) {
    out.per_metric[it.key()] = metric_value_from_json(it.value());
  }
  if (!answer_avg.is_null()) out.answer_avg = answer_avg.get<double>();
  if (!citation_avg.is_null()) out.citation_avg = citation_avg.get<double>();
  return out;
}

CitationLevel level_from_json(const ordered_json& j) {
  auto level = level_from_string(j.get<std::string>());
  if (!level) {
    throw Error(ErrorKind::Schema,
                "unknown level '" + j.get<std::string>() + "'");
  }
  return *level;
}

CoTMethod cot_from_json(const ordered_json& j) {
  auto method = cot_from_string(j.get<std::string>());
  if (!method) {
    throw Error(ErrorKind::Schema,
                "unknown cot method '" + j.get<std::string>() + "'");
  }
  return *method;
}

}  // namespace

const char* to_string(FewshotOrder order) {
  return order == FewshotOrder::SimilarLast ? "similar_last" : "similar_first";
}

std::optional<FewshotOrder> fewshot_order_from_string(std::string_view name) {
  if (name == "similar_last" || name == "similar-last") {
    return FewshotOrder::SimilarLast;
  }
  if (name == "similar_first" || name == "similar-first") {
    return FewshotOrder::SimilarFirst;
  }
  return std::nullopt;
}

bool level_derivable(CitationLevel from, CitationLevel to) {
  return level_rank(to) >= level_rank(from);
}

std::string journal_filename(CitationLevel level, CoTMethod method) {
  return std::string("journal_") + to_string(level) + "_" +
         to_string(method) + ".jsonl";
}

std::string journal_line(const JournalEntry& entry) {
  ordered_json row;
  row["example_id"] = entry.example_id;
  row["raw_response"] = entry.raw_response;
  row["parse_status"] = entry.parse_status;
  return row.dump();
}

std::vector<JournalEntry> read_journal(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open journal: " + path);
  std::vector<JournalEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    ordered_json row;
    try {
      row = ordered_json::parse(line);
    } catch (const nlohmann::json::exception&) {
      continue;  // torn trailing line after a crash; drop it
    }
    if (!row.is_object() || !row.contains("example_id") ||
        !row.contains("raw_response") || !row.contains("parse_status")) {
      continue;
    }
    out.push_back(JournalEntry{row["example_id"].get<std::string>(),
                               row["raw_response"].get<std::string>(),
                               row["parse_status"].get<std::string>()});
  }
  return out;
}

std::string echo_response(const PromptRecord& record) {
  std::string answer = serialize(record.gold);
  if (record.method == CoTMethod::None || record.cot_prefix.empty()) {
    return answer;
  }
  return record.cot_prefix + " " + answer;
}

void ResponseRegistry::put(std::string prompt, std::string response) {
  std::lock_guard<std::mutex> lock(mu_);
  responses_[std::move(prompt)] = std::move(response);
}

std::optional<std::string> ResponseRegistry::get(
    const std::string& prompt) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = responses_.find(prompt);
  if (it == responses_.end()) return std::nullopt;
  return it->second;
}

CellResult score_cell(
    const std::vector<QAExample>& dataset, CitationLevel level,
    CoTMethod method, const std::map<std::string, JournalEntry>& responses,
    const EntailmentJudge& judge, int threads,
    const std::map<std::string, std::map<std::string, double>>* externals) {
  CellResult cell;
  cell.level = level;
  cell.method = method;
  cell.n_examples = dataset.size();

  std::vector<QAExample> derived = dataset;
  for (QAExample& example : derived) {
    example.gold = derive_level(example.gold, level);
  }

  size_t n = dataset.size();
  std::vector<std::optional<AttributedAnswer>> preds(n);
  cell.records.resize(n);
  for (size_t i = 0; i < n; ++i) {
    ExampleRecord& rec = cell.records[i];
    rec.example_id = dataset[i].id;
    auto it = responses.find(dataset[i].id);
    if (it == responses.end()) {
      rec.failed = true;
      rec.parse_status = "missing";
      rec.failure = "no response recorded";
      continue;
    }
    const JournalEntry& entry = it->second;
    if (starts_with(entry.parse_status, "error:")) {
      rec.failed = true;
      rec.parse_status = entry.parse_status;
      rec.failure = "completion failed: " + entry.parse_status.substr(6);
      continue;
    }
    auto [reasoning, final_text] = split_response(entry.raw_response);
    (void)reasoning;
    if (is_blank(final_text)) {
      rec.parse_status = "empty";
      preds[i] = AttributedAnswer{level, {PlainText{""}}};
    } else {
      AttributedAnswer parsed;
      std::string status = "lenient";
      try {
        parsed = parse_answer(final_text, level, ParseOptions{.strict = true});
        status = "strict";
      } catch (const Error&) {
        parsed =
            parse_answer(final_text, level, ParseOptions{.strict = false});
      }
      rec.parse_status = status;
      preds[i] = std::move(parsed);
    }
    rec.candidate = strip_citations(*preds[i]);
  }

  std::vector<const AttributedAnswer*> pred_ptrs(n, nullptr);
  for (size_t i = 0; i < n; ++i) {
    if (preds[i]) pred_ptrs[i] = &*preds[i];
  }

  // External scores: per-example sidecar values override the dataset's.
  std::vector<std::map<std::string, double>> merged(n);
  std::vector<const std::map<std::string, double>*> external_ptrs(n, nullptr);
  for (size_t i = 0; i < n; ++i) {
    merged[i] = dataset[i].external_scores;
    if (externals) {
      auto it = externals->find(dataset[i].id);
      if (it != externals->end()) {
        for (const auto& [metric, score] : it->second) {
          merged[i][metric] = score;
        }
      }
    }
    if (!merged[i].empty()) external_ptrs[i] = &merged[i];
  }

  std::vector<ScoreResult> scored =
      score_batch(derived, pred_ptrs, judge, &external_ptrs, threads);
  for (size_t i = 0; i < n; ++i) {
    ExampleRecord& rec = cell.records[i];
    if (rec.failed) continue;
    if (scored[i].ok) {
      rec.report = scored[i].report;
    } else {
      rec.failed = true;
      rec.failure = "scoring failed: " + scored[i].error;
    }
  }
  for (const ExampleRecord& rec : cell.records) {
    if (rec.failed) ++cell.n_failed;
  }

  // Corpus means per metric over the Computed per-example scores.
  std::vector<std::string> all_names = answer_metric_names();
  const std::vector<std::string>& cit = citation_metric_names();
  all_names.insert(all_names.end(), cit.begin(), cit.end());
  for (const std::string& name : all_names) {
    double sum = 0.0;
    size_t count = 0;
    bool pending = false;
    for (const ExampleRecord& rec : cell.records) {
      if (rec.failed) continue;
      auto it = rec.report.per_metric.find(name);
      if (it == rec.report.per_metric.end()) continue;
      if (it->second.status == Applicability::Computed) {
        sum += it->second.score;
        ++count;
      } else if (it->second.status == Applicability::ExternalPending) {
        pending = true;
      }
    }
    MetricValue value;
    if (count > 0) {
      value = {sum / static_cast<double>(count), Applicability::Computed};
    } else if (pending) {
      value = {0.0, Applicability::ExternalPending};
    } else {
      value = {0.0, Applicability::NotApplicable};
    }
    cell.means.per_metric[name] = value;
  }
  auto family_avg = [&](const std::vector<std::string>& names)
      -> std::optional<double> {
    double sum = 0.0;
    size_t count = 0;
    for (const std::string& name : names) {
      const MetricValue& v = cell.means.per_metric.at(name);
      if (v.status == Applicability::Computed) {
        sum += v.score;
        ++count;
      }
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
  };
  cell.means.answer_avg = family_avg(answer_metric_names());
  cell.means.citation_avg = family_avg(citation_metric_names());

  if (level == CitationLevel::Span) {
    CscaCounts pooled;
    for (size_t i = 0; i < n; ++i) {
      if (!pred_ptrs[i] || cell.records[i].failed) continue;
      CscaCounts c = csca_counts(*pred_ptrs[i], derived[i].passages);
      pooled.correct += c.correct;
      pooled.total += c.total;
    }
    cell.csca_micro = pooled.score();
  }
  return cell;
}

AggregateReport run_matrix(const std::vector<QAExample>& dataset,
                           const std::vector<QAExample>& train_pool,
                           const RunSpec& spec, CompletionClient& client,
                           const EntailmentJudge& judge,
                           const RunHooks& hooks) {
  if (dataset.empty()) {
    throw Error(ErrorKind::InvariantViolation, "dataset is empty");
  }
  if (spec.levels.empty() || spec.methods.empty()) {
    throw Error(ErrorKind::InvariantViolation,
                "run needs at least one level and one guidance method");
  }
  for (CitationLevel level : spec.levels) {
    if (!level_derivable(spec.dataset_level, level)) {
      throw Error(ErrorKind::LevelMismatch,
                  std::string("dataset at ") + to_string(spec.dataset_level) +
                      " level cannot drive a " + to_string(level) +
                      " level run");
    }
  }
  if (spec.fewshot_k < 0) {
    throw Error(ErrorKind::Config, "fewshot_k must be >= 0");
  }
  size_t k = static_cast<size_t>(spec.fewshot_k);
  if (k > 0 && train_pool.size() < k) {
    throw Error(ErrorKind::PoolTooSmall,
                "train pool has " + std::to_string(train_pool.size()) +
                    " examples, " + std::to_string(k) + " shots requested");
  }
  // Shots depend on question similarity only, so select once per example.
  // sel[i] holds pool indices most-similar-first; the example itself is
  // dropped when the pool overlaps the eval split.
  std::vector<std::vector<size_t>> sel(dataset.size());
  if (k > 0) {
    std::vector<std::string> pool_questions;
    pool_questions.reserve(train_pool.size());
    for (const QAExample& p : train_pool) {
      pool_questions.push_back(p.question);
    }
    TfIdfScorer scorer(pool_questions);
    size_t want = std::min(k + 1, train_pool.size());
    for (size_t i = 0; i < dataset.size(); ++i) {
      std::vector<size_t> picked =
          select_fewshot(dataset[i].question, pool_questions, want, scorer);
      std::vector<size_t>& mine = sel[i];
      for (size_t j : picked) {
        if (train_pool[j].id == dataset[i].id) continue;
        mine.push_back(j);
        if (mine.size() == k) break;
      }
    }
  }

  bool journaling = !spec.out_dir.empty();
  if (journaling) {
    std::filesystem::create_directories(spec.out_dir);
  }

  AggregateReport report;
  for (CitationLevel level : spec.levels) {
    std::vector<AttributedAnswer> gold_at_level(dataset.size());
    for (size_t i = 0; i < dataset.size(); ++i) {
      gold_at_level[i] = derive_level(dataset[i].gold, level);
    }
    std::vector<AttributedAnswer> pool_gold(train_pool.size());
    for (size_t j = 0; j < train_pool.size(); ++j) {
      pool_gold[j] = derive_level(train_pool[j].gold, level);
    }

    for (CoTMethod method : spec.methods) {
      std::string journal_path;
      std::map<std::string, JournalEntry> have;
      if (journaling) {
        journal_path = (std::filesystem::path(spec.out_dir) /
                        journal_filename(level, method))
                           .string();
        if (std::filesystem::exists(journal_path)) {
          for (JournalEntry& entry : read_journal(journal_path)) {
            have[entry.example_id] = std::move(entry);  // newest wins
          }
          // Failed completions are worth another attempt on resume.
          std::erase_if(have, [](const auto& kv) {
            return starts_with(kv.second.parse_status, "error:");
          });
        }
      }

      auto build_record = [&](size_t row, size_t shots) {
        std::vector<PromptExample> fewshots;
        fewshots.reserve(shots);
        std::vector<size_t> order(sel[row].begin(),
                                  sel[row].begin() +
                                      std::min(shots, sel[row].size()));
        if (spec.fewshot_order == FewshotOrder::SimilarLast) {
          std::reverse(order.begin(), order.end());
        }
        for (size_t j : order) {
          fewshots.push_back(PromptExample{train_pool[j].question,
                                           train_pool[j].passages,
                                           pool_gold[j]});
        }
        PromptBundle bundle =
            build_prompt(dataset[row].question, dataset[row].passages,
                         fewshots, level, method, spec.templates);
        PromptRecord record;
        record.example_id = dataset[row].id;
        record.level = level;
        record.method = method;
        record.fewshot_k = static_cast<int>(order.size());
        record.prompt = render_prompt(bundle);
        record.gold = gold_at_level[row];
        if (method != CoTMethod::None) {
          try {
            record.cot_prefix =
                build_cot_prefix(gold_at_level[row], dataset[row].passages,
                                 method);
          } catch (const Error&) {
            record.cot_prefix.clear();  // gold cites nothing; no guidance
          }
        }
        if (hooks.on_prompt) hooks.on_prompt(record);
        return record;
      };

      std::vector<size_t> rows_needed;
      for (size_t i = 0; i < dataset.size(); ++i) {
        if (!have.count(dataset[i].id)) rows_needed.push_back(i);
      }

      // (row, shots) still waiting for a completion; a context-overflow
      // rejection retries with one fewer shot until none remain.
      std::vector<std::pair<size_t, size_t>> pending;
      pending.reserve(rows_needed.size());
      for (size_t row : rows_needed) pending.emplace_back(row, k);
      std::map<size_t, CompletionOutcome> outcomes;
      while (!pending.empty()) {
        std::vector<std::string> prompts;
        prompts.reserve(pending.size());
        for (auto& [row, shots] : pending) {
          prompts.push_back(build_record(row, shots).prompt);
        }
        std::vector<CompletionOutcome> batch = batch_complete(
            client, prompts, spec.generation, spec.max_in_flight);
        std::vector<std::pair<size_t, size_t>> again;
        for (size_t j = 0; j < pending.size(); ++j) {
          auto [row, shots] = pending[j];
          if (batch[j].error == ErrorKind::ContextOverflow && shots > 0) {
            again.emplace_back(row, shots - 1);
          } else {
            outcomes[row] = std::move(batch[j]);
          }
        }
        pending = std::move(again);
      }

      std::ofstream journal_out;
      if (journaling) {
        journal_out.open(journal_path, std::ios::app);
        if (!journal_out) {
          throw Error(ErrorKind::Io, "cannot append to " + journal_path);
        }
      }
      for (size_t row : rows_needed) {
        const CompletionOutcome& outcome = outcomes.at(row);
        JournalEntry entry;
        entry.example_id = dataset[row].id;
        if (outcome.error) {
          entry.parse_status = std::string("error:") + to_string(*outcome.error);
        } else {
          entry.raw_response = *outcome.text;
          auto [reasoning, final_text] = split_response(entry.raw_response);
          (void)reasoning;
          if (is_blank(final_text)) {
            entry.parse_status = "empty";
          } else {
            try {
              parse_answer(final_text, level, ParseOptions{.strict = true});
              entry.parse_status = "strict";
            } catch (const Error&) {
              entry.parse_status = "lenient";
            }
          }
        }
        if (journaling) journal_out << journal_line(entry) << '\n';
        have[entry.example_id] = std::move(entry);
      }
      if (journaling) {
        journal_out.flush();
        if (!journal_out) {
          throw Error(ErrorKind::Io, "short write to " + journal_path);
        }
      }

      report.cells.push_back(
          score_cell(dataset, level, method, have, judge, spec.threads));
    }
  }
  return report;
}

std::vector<ExternalRequest> external_requests(
    const AggregateReport& report, const std::vector<QAExample>& dataset) {
  std::map<std::string, std::string> reference_by_id;
  for (const QAExample& example : dataset) {
    reference_by_id[example.id] = strip_citations(example.gold);
  }
  std::vector<ExternalRequest> out;
  for (const CellResult& cell : report.cells) {
    for (const ExampleRecord& rec : cell.records) {
      if (rec.failed) continue;
      auto it = reference_by_id.find(rec.example_id);
      if (it == reference_by_id.end()) continue;
      out.push_back(ExternalRequest{
          rec.example_id + "|" + to_string(cell.level) + "|" +
              to_string(cell.method),
          rec.candidate, it->second});
    }
  }
  return out;
}

std::optional<ReportFormat> report_format_from_string(std::string_view name) {
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  return std::nullopt;
}

namespace {

// Column accessors shared by the markdown and CSV renderers. A column is a
// metric mean or a family average; absent values render as "–" / empty.
struct Column {
  std::string header;
  std::function<std::optional<double>(const CellResult&)> value;
};

std::vector<Column> report_columns() {
  auto metric = [](const char* name) {
    return [name](const CellResult& cell) -> std::optional<double> {
      auto it = cell.means.per_metric.find(name);
      if (it == cell.means.per_metric.end() ||
          it->second.status != Applicability::Computed) {
        return std::nullopt;
      }
      return it->second.score;
    };
  };
  std::vector<Column> cols;
  cols.push_back({kMetricBert, metric(kMetricBert)});
  cols.push_back({kMetricHem, metric(kMetricHem)});
  cols.push_back({kMetricRougeL, metric(kMetricRougeL)});
  cols.push_back({"Avg.", [](const CellResult& c) { return c.means.answer_avg; }});
  cols.push_back({kMetricAlceF1, metric(kMetricAlceF1)});
  cols.push_back({kMetricCsca, metric(kMetricCsca)});
  cols.push_back({kMetricDocF1, metric(kMetricDocF1)});
  cols.push_back({kMetricSemF1, metric(kMetricSemF1)});
  cols.push_back(
      {"Avg.", [](const CellResult& c) { return c.means.citation_avg; }});
  return cols;
}

std::string cot_display(CoTMethod method) {
  switch (method) {
    case CoTMethod::None: return "None";
    case CoTMethod::Span: return "Span";
    case CoTMethod::Sentence: return "Sentence";
    case CoTMethod::Passage: return "Passage";
  }
  return "?";
}

std::string level_display(CitationLevel level) {
  switch (level) {
    case CitationLevel::Span: return "Span";
    case CitationLevel::Sentence: return "Sentence";
    case CitationLevel::Passage: return "Passage";
  }
  return "?";
}

std::string render_markdown(const AggregateReport& report) {
  std::vector<Column> cols = report_columns();
  std::ostringstream out;
  out << "| Level | CoT |";
  for (const Column& c : cols) out << " " << c.header << " |";
  out << "\n|---|---|";
  for (size_t i = 0; i < cols.size(); ++i) out << "---|";
  out << "\n";

  // Best-per-level flags: within each level block, the maximum Computed
  // value of each column is bolded; exact ties are all bold.
  for (size_t start = 0; start < report.cells.size();) {
    size_t end = start;
    while (end < report.cells.size() &&
           report.cells[end].level == report.cells[start].level) {
      ++end;
    }
    std::vector<std::optional<double>> best(cols.size());
    for (size_t i = start; i < end; ++i) {
      for (size_t c = 0; c < cols.size(); ++c) {
        auto v = cols[c].value(report.cells[i]);
        if (v && (!best[c] || *v > *best[c])) best[c] = v;
      }
    }
    for (size_t i = start; i < end; ++i) {
      const CellResult& cell = report.cells[i];
      out << "| " << level_display(cell.level) << " | "
          << cot_display(cell.method) << " |";
      for (size_t c = 0; c < cols.size(); ++c) {
        auto v = cols[c].value(cell);
        if (!v) {
          out << " – |";  // –
        } else if (best[c] && *v == *best[c]) {
          out << " **" << render_score(*v) << "** |";
        } else {
          out << " " << render_score(*v) << " |";
        }
      }
      out << "\n";
    }
    start = end;
  }

  if (!report.cells.empty()) {
    out << "\n" << report.cells.front().n_examples << " examples per cell.";
    std::ostringstream failures;
    for (const CellResult& cell : report.cells) {
      if (cell.n_failed == 0) continue;
      failures << " " << to_string(cell.level) << "/" << to_string(cell.method)
               << ": " << cell.n_failed;
    }
    std::string f = failures.str();
    if (!f.empty()) out << " Failed examples:" << f << ".";
    out << "\n";
  }
  return out.str();
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string render_csv(const AggregateReport& report) {
  std::vector<Column> cols = report_columns();
  std::ostringstream out;
  out << "level,cot,n_examples,n_failed";
  // Two family averages share the header "Avg." in markdown; CSV needs
  // distinct names.
  const char* csv_names[] = {"bert",    "hem",  "rl",     "answer_avg",
                             "alce_f1", "csca", "doc_f1", "sem_f1_t",
                             "citation_avg"};
  for (const char* name : csv_names) out << "," << name;
  out << ",csca_micro\n";
  for (const CellResult& cell : report.cells) {
    out << to_string(cell.level) << "," << to_string(cell.method) << ","
        << cell.n_examples << "," << cell.n_failed;
    for (const Column& c : cols) {
      auto v = c.value(cell);
      out << ",";
      if (v) out << csv_escape(full_precision(*v));
    }
    out << ",";
    if (cell.csca_micro) out << full_precision(*cell.csca_micro);
    out << "\n";
  }
  return out.str();
}

ordered_json report_to_json(const AggregateReport& report) {
  ordered_json cells = ordered_json::array();
  for (const CellResult& cell : report.cells) {
    ordered_json jc;
    jc["level"] = to_string(cell.level);
    jc["cot"] = to_string(cell.method);
    jc["n_examples"] = cell.n_examples;
    jc["n_failed"] = cell.n_failed;
    jc["means"] = metric_report_to_json(cell.means);
    jc["answer_avg"] = cell.means.answer_avg
                           ? ordered_json(*cell.means.answer_avg)
                           : ordered_json(nullptr);
    jc["citation_avg"] = cell.means.citation_avg
                             ? ordered_json(*cell.means.citation_avg)
                             : ordered_json(nullptr);
    jc["csca_micro"] = cell.csca_micro ? ordered_json(*cell.csca_micro)
                                       : ordered_json(nullptr);
    ordered_json records = ordered_json::array();
    for (const ExampleRecord& rec : cell.records) {
      ordered_json jr;
      jr["id"] = rec.example_id;
      jr["parse_status"] = rec.parse_status;
      jr["failed"] = rec.failed;
      if (rec.failed) {
        jr["failure"] = rec.failure;
      } else {
        jr["candidate"] = rec.candidate;
        jr["metrics"] = metric_report_to_json(rec.report);
        jr["answer_avg"] = rec.report.answer_avg
                               ? ordered_json(*rec.report.answer_avg)
                               : ordered_json(nullptr);
        jr["citation_avg"] = rec.report.citation_avg
                                 ? ordered_json(*rec.report.citation_avg)
                                 : ordered_json(nullptr);
      }
      records.push_back(std::move(jr));
    }
    jc["records"] = std::move(records);
    cells.push_back(std::move(jc));
  }
  ordered_json root;
  root["cells"] = std::move(cells);
  return root;
}

AggregateReport report_from_json(const ordered_json& root) {
  if (!root.is_object() || !root.contains("cells") ||
      !root["cells"].is_array()) {
    throw Error(ErrorKind::Schema, "report JSON needs a 'cells' array");
  }
  AggregateReport report;
  for (const ordered_json& jc : root["cells"]) {
    CellResult cell;
    cell.level = level_from_json(jc.at("level"));
    cell.method = cot_from_json(jc.at("cot"));
    cell.n_examples = jc.at("n_examples").get<size_t>();
    cell.n_failed = jc.at("n_failed").get<size_t>();
    cell.means = metric_report_from_json(jc.at("means"), jc.at("answer_avg"),
                                         jc.at("citation_avg"));
    if (!jc.at("csca_micro").is_null()) {
      cell.csca_micro = jc.at("csca_micro").get<double>();
    }
    for (const ordered_json& jr : jc.at("records")) {
      ExampleRecord rec;
      rec.example_id = jr.at("id").get<std::string>();
      rec.parse_status = jr.at("parse_status").get<std::string>();
      rec.failed = jr.at("failed").get<bool>();
      if (rec.failed) {
        rec.failure = jr.at("failure").get<std::string>();
      } else {
        rec.candidate = jr.at("candidate").get<std::string>();
        rec.report = metric_report_from_json(
            jr.at("metrics"), jr.at("answer_avg"), jr.at("citation_avg"));
      }
      cell.records.push_back(std::move(rec));
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

}  // namespace

std::string render_report(const AggregateReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Markdown: return render_markdown(report);
    case ReportFormat::Csv: return render_csv(report);
    case ReportFormat::Json: return report_to_json(report).dump(2) + "\n";
  }
  return {};
}

void emit_report(const AggregateReport& report, ReportFormat format,
                 const std::string& out_path) {
  std::ofstream out(out_path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write report: " + out_path);
  out << render_report(report, format);
  if (!out) throw Error(ErrorKind::Io, "short write to " + out_path);
}

AggregateReport report_from_json_text(const std::string& text) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema,
                std::string("report is not valid JSON: ") + e.what());
  }
  return report_from_json(root);
}

AggregateReport report_from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open report: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return report_from_json_text(buffer.str());
}

ConvertCorpusStats convert_corpus(const std::string& in_path,
                                  const std::string& out_path,
                                  CitationLevel input_level,
                                  const EntityRecognizer& recognizer,
                                  const LabelerOptions& options,
                                  double low_coverage_threshold, bool strict,
                                  int threads) {
  LoadStats load_stats;
  std::vector<QAExample> examples =
      load_dataset(in_path, input_level, strict, &load_stats);
  std::vector<ConvertResult> results = convert_batch(
      examples, recognizer, options, low_coverage_threshold, threads);

  ConvertCorpusStats stats;
  stats.lines_skipped = load_stats.skipped;
  std::vector<QAExample> out_examples;
  double coverage_sum = 0.0;
  size_t low = 0;
  for (size_t i = 0; i < examples.size(); ++i) {
    if (!results[i].ok) {
      ++stats.lines_failed;
      continue;
    }
    QAExample converted = examples[i];
    converted.gold = results[i].labeled.gold;
    converted.entities.clear();  // consumed by the labeler
    out_examples.push_back(std::move(converted));
    coverage_sum += results[i].labeled.stats.coverage();
    if (results[i].labeled.stats.low_coverage) ++low;
    ++stats.lines_converted;
  }
  if (stats.lines_converted > 0) {
    stats.mean_coverage =
        coverage_sum / static_cast<double>(stats.lines_converted);
    stats.low_coverage_fraction =
        static_cast<double>(low) / static_cast<double>(stats.lines_converted);
  }
  save_dataset(out_examples, out_path);
  return stats;
}

}  // namespace citeval
