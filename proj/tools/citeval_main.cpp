// citeval: span/sentence/passage citation toolkit.
//   convert  mine span attributions from a passage-labeled corpus
//   run      evaluate a model over the level x guidance matrix
//   score    re-score a journal offline
//   report   render a JSON report as markdown or CSV
// Wire format, file schemas and config keys are documented under docs/.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "citeval/batch.hpp"
#include "citeval/client.hpp"
#include "citeval/config.hpp"
#include "citeval/dataset.hpp"
#include "citeval/pipeline.hpp"
#include "nlohmann/json.hpp"

namespace {

using namespace citeval;

CitationLevel parse_level_arg(const std::string& name) {
  auto level = level_from_string(name);
  if (!level) {
    throw Error(ErrorKind::Config, "unknown level '" + name +
                                       "' (expected span, sentence or "
                                       "passage)");
  }
  return *level;
}

CoTMethod parse_cot_arg(const std::string& name) {
  auto method = cot_from_string(name);
  if (!method) {
    throw Error(ErrorKind::Config,
                "unknown guidance method '" + name +
                    "' (expected none, span, sentence or passage)");
  }
  return *method;
}

std::vector<std::string> split_csv(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// JSONL of {"id", "response"} for the canned mock.
std::map<std::string, std::string> load_canned(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open canned responses: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Schema, path + " line " +
                                         std::to_string(line_no) + ": " +
                                         e.what());
    }
    if (!row.contains("id") || !row.contains("response")) {
      throw Error(ErrorKind::Schema,
                  path + " line " + std::to_string(line_no) +
                      ": need 'id' and 'response'");
    }
    out[row["id"].get<std::string>()] = row["response"].get<std::string>();
  }
  return out;
}

struct MockSetup {
  std::unique_ptr<CompletionClient> client;
  RunHooks hooks;
  std::shared_ptr<ResponseRegistry> registry;
};

// --mock echo | canned:<path> | fault[:<failure>,<malformed>,<seed>]
MockSetup make_mock(const std::string& spec, uint64_t default_seed) {
  MockSetup setup;
  setup.registry = std::make_shared<ResponseRegistry>();
  auto registry = setup.registry;
  auto responder = [registry](const std::string& prompt) -> std::string {
    auto response = registry->get(prompt);
    if (!response) {
      throw Error(ErrorKind::InvariantViolation,
                  "mock has no response for this prompt");
    }
    return *response;
  };

  std::string kind = spec;
  std::string arg;
  size_t colon = spec.find(':');
  if (colon != std::string::npos) {
    kind = spec.substr(0, colon);
    arg = spec.substr(colon + 1);
  }

  if (kind == "echo") {
    setup.hooks.on_prompt = [registry](const PromptRecord& record) {
      registry->put(record.prompt, echo_response(record));
    };
    setup.client = std::make_unique<MockCompletionClient>(responder);
  } else if (kind == "canned") {
    if (arg.empty()) {
      throw Error(ErrorKind::Config, "--mock canned needs a path: canned:<file>");
    }
    auto canned =
        std::make_shared<std::map<std::string, std::string>>(load_canned(arg));
    setup.hooks.on_prompt = [registry, canned](const PromptRecord& record) {
      auto it = canned->find(record.example_id);
      registry->put(record.prompt, it == canned->end() ? "" : it->second);
    };
    setup.client = std::make_unique<MockCompletionClient>(responder);
  } else if (kind == "fault") {
    double failure = 0.2, malformed = 0.2;
    uint64_t seed = default_seed;
    if (!arg.empty()) {
      std::vector<std::string> parts = split_csv(arg);
      try {
        if (parts.size() > 0) failure = std::stod(parts[0]);
        if (parts.size() > 1) malformed = std::stod(parts[1]);
        if (parts.size() > 2) seed = std::stoull(parts[2]);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Config,
                    "--mock fault takes numbers: fault:<failure>,<malformed>,<seed>");
      }
    }
    setup.hooks.on_prompt = [registry](const PromptRecord& record) {
      registry->put(record.prompt, echo_response(record));
    };
    auto mock = std::make_unique<MockCompletionClient>(responder);
    mock->set_fault_injection(failure, malformed, seed);
    setup.client = std::move(mock);
  } else {
    throw Error(ErrorKind::Config,
                "unknown mock '" + kind + "' (echo, canned:<path>, fault)");
  }
  return setup;
}

int run_command(const Config& config, std::string dataset_path,
                std::string pool_path, std::string levels_csv,
                std::string cot_csv, int fewshot_k, std::string order_name,
                std::string dataset_level_name, std::string judge_name,
                double judge_threshold, std::string mock_spec,
                std::string endpoint, std::string model, std::string key_env,
                bool anonymous, double timeout_s, int retries,
                int max_in_flight, int threads, uint64_t seed,
                std::string out_dir, std::string prompt_dir,
                std::string external_requests_path, int max_tokens,
                double temperature) {
  // Config file fills anything the command line left at its default.
  auto cfg_str = [&](const char* key, std::string& slot) {
    if (auto v = config.get(key); v && slot.empty()) slot = *v;
  };
  cfg_str("dataset", dataset_path);
  cfg_str("train_pool", pool_path);
  cfg_str("endpoint", endpoint);
  cfg_str("model", model);
  cfg_str("mock", mock_spec);
  cfg_str("out", out_dir);
  cfg_str("prompt_dir", prompt_dir);

  if (dataset_path.empty()) {
    throw Error(ErrorKind::Config, "run needs --dataset (or dataset= in the config)");
  }

  RunSpec spec;
  spec.levels.clear();
  for (const std::string& name :
       split_csv(levels_csv.empty()
                     ? config.get_or("levels", "span,sentence,passage")
                     : levels_csv)) {
    spec.levels.push_back(parse_level_arg(name));
  }
  spec.methods.clear();
  for (const std::string& name :
       split_csv(cot_csv.empty()
                     ? config.get_or("cot", "none,span,sentence,passage")
                     : cot_csv)) {
    spec.methods.push_back(parse_cot_arg(name));
  }
  spec.fewshot_k = fewshot_k >= 0 ? fewshot_k
                                  : static_cast<int>(config.get_int_or(
                                        "fewshot_k", 4));
  if (order_name.empty()) order_name = config.get_or("fewshot_order", "similar_last");
  auto order = fewshot_order_from_string(order_name);
  if (!order) {
    throw Error(ErrorKind::Config,
                "unknown fewshot order '" + order_name +
                    "' (similar_last or similar_first)");
  }
  spec.fewshot_order = *order;
  if (dataset_level_name.empty()) {
    dataset_level_name = config.get_or("dataset_level", "span");
  }
  spec.dataset_level = parse_level_arg(dataset_level_name);
  spec.max_in_flight = max_in_flight > 0
                           ? max_in_flight
                           : static_cast<int>(config.get_int_or("max_in_flight", 4));
  spec.threads = threads;
  spec.out_dir = out_dir;
  spec.generation.max_tokens = max_tokens;
  spec.generation.temperature = temperature;
  spec.generation.timeout_s = timeout_s;
  spec.generation.max_retries = retries;
  if (!prompt_dir.empty()) {
    spec.templates = PromptTemplates::with_overrides(prompt_dir);
  }

  if (judge_name.empty()) judge_name = config.get_or("judge", "lexical");
  if (judge_name != "lexical") {
    throw Error(ErrorKind::Config,
                "unknown judge '" + judge_name + "' (only 'lexical' ships)");
  }
  if (judge_threshold < 0) {
    judge_threshold = config.get_double_or("judge_threshold", 0.5);
  }
  LexicalJudge judge(judge_threshold);

  std::vector<QAExample> dataset =
      load_dataset(dataset_path, spec.dataset_level);
  std::vector<QAExample> pool;
  if (!pool_path.empty()) {
    pool = load_dataset(pool_path, spec.dataset_level);
  }

  MockSetup mock;
  std::unique_ptr<CompletionClient> http;
  CompletionClient* client = nullptr;
  RunHooks hooks;
  if (!mock_spec.empty()) {
    mock = make_mock(mock_spec, seed);
    client = mock.client.get();
    hooks = mock.hooks;
  } else if (!endpoint.empty()) {
    HttpClientConfig http_config;
    http_config.endpoint = endpoint;
    http_config.model = model;
    if (!key_env.empty()) http_config.api_key_env = key_env;
    http_config.allow_anonymous = anonymous;
    http = std::make_unique<HttpCompletionClient>(http_config);
    client = http.get();
  } else {
    throw Error(ErrorKind::Config, "run needs --mock or --endpoint");
  }

  AggregateReport report = run_matrix(dataset, pool, spec, *client, judge, hooks);

  for (const CellResult& cell : report.cells) {
    std::cerr << "cell " << to_string(cell.level) << "/"
              << to_string(cell.method) << ": " << cell.n_examples
              << " examples, " << cell.n_failed << " failed\n";
  }

  if (!external_requests_path.empty()) {
    write_external_requests(external_requests_path,
                            external_requests(report, dataset));
  }

  if (!out_dir.empty()) {
    std::filesystem::path dir(out_dir);
    emit_report(report, ReportFormat::Json, (dir / "report.json").string());
    emit_report(report, ReportFormat::Markdown, (dir / "report.md").string());
    emit_report(report, ReportFormat::Csv, (dir / "report.csv").string());
  } else {
    std::cout << render_report(report, ReportFormat::Markdown);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Citation-attribution toolkit: corpus conversion, matrix "
               "evaluation, scoring and reporting"};
  app.require_subcommand(1);

  // convert
  auto* convert = app.add_subcommand(
      "convert", "Mine span attributions from a passage-labeled corpus");
  std::string conv_in, conv_out, conv_level = "passage";
  std::string conv_overlap = "any";
  size_t conv_min_len = 10;
  double conv_threshold = 0.1;
  bool conv_strict = false;
  int conv_threads = 0;
  convert->add_option("--in", conv_in, "Input JSONL corpus")->required();
  convert->add_option("--out", conv_out, "Output JSONL corpus")->required();
  convert->add_option("--input-level", conv_level,
                      "Citation level of the input answers");
  convert->add_option("--min-len", conv_min_len,
                      "Shortest span worth marking, in characters");
  convert->add_option("--entity-overlap", conv_overlap,
                      "Entity filter: any (overlap) or contain");
  convert->add_option("--low-coverage-threshold", conv_threshold,
                      "Flag conversions marking less than this fraction");
  convert->add_flag("--strict", conv_strict,
                    "Abort on the first malformed input line");
  convert->add_option("--threads", conv_threads,
                      "Worker threads (0 = all cores)");

  // run
  auto* run = app.add_subcommand(
      "run", "Evaluate a model over the level x guidance matrix");
  std::string run_dataset, run_pool, run_levels, run_cot, run_order,
      run_dataset_level, run_judge, run_mock, run_endpoint, run_model,
      run_key_env, run_out, run_prompt_dir, run_config, run_external;
  int run_k = -1, run_retries = 3, run_max_in_flight = 0, run_threads = 0,
      run_max_tokens = 2000;
  double run_judge_threshold = -1, run_timeout = 60.0, run_temperature = 0.0;
  uint64_t run_seed = 0;
  bool run_anonymous = false;
  run->add_option("--dataset", run_dataset, "Evaluation split (JSONL)");
  run->add_option("--train-pool", run_pool, "Fewshot pool (JSONL)");
  run->add_option("--levels", run_levels,
                  "Comma-separated citation levels to run");
  run->add_option("--cot", run_cot,
                  "Comma-separated guidance methods to run");
  run->add_option("--fewshot-k", run_k, "Shots per prompt");
  run->add_option("--fewshot-order", run_order,
                  "similar_last (default) or similar_first");
  run->add_option("--dataset-level", run_dataset_level,
                  "Level the dataset files are written at");
  run->add_option("--judge", run_judge, "Entailment judge (lexical)");
  run->add_option("--judge-threshold", run_judge_threshold,
                  "Content-word recall needed for entailment");
  run->add_option("--mock", run_mock,
                  "echo | canned:<path> | fault[:<fail>,<malformed>,<seed>]");
  run->add_option("--endpoint", run_endpoint,
                  "OpenAI-compatible API base URL");
  run->add_option("--model", run_model, "Model name for the endpoint");
  run->add_option("--key-env", run_key_env,
                  "Environment variable holding the API key");
  run->add_flag("--anonymous", run_anonymous,
                "Allow keyless endpoints (local servers)");
  run->add_option("--timeout", run_timeout, "Per-request timeout, seconds");
  run->add_option("--retries", run_retries, "Retries per request");
  run->add_option("--max-in-flight", run_max_in_flight,
                  "Concurrent requests");
  run->add_option("--threads", run_threads, "Scoring threads (0 = all)");
  run->add_option("--seed", run_seed, "Seed for the fault mock");
  run->add_option("--out", run_out, "Output directory (journals + reports)");
  run->add_option("--prompt-dir", run_prompt_dir,
                  "Directory of instruction overrides");
  run->add_option("--config", run_config, "key = value config file");
  run->add_option("--external-requests", run_external,
                  "Write external-scorer request JSONL here");
  run->add_option("--max-tokens", run_max_tokens, "Generation budget");
  run->add_option("--temperature", run_temperature, "Sampling temperature");

  // score
  auto* score = app.add_subcommand("score",
                                   "Re-score a journal offline");
  std::string score_dataset, score_journal, score_level, score_cot,
      score_external, score_out, score_format = "json";
  double score_judge_threshold = 0.5;
  int score_threads = 0;
  std::string score_dataset_level = "span";
  score->add_option("--dataset", score_dataset, "Evaluation split (JSONL)")
      ->required();
  score->add_option("--journal", score_journal, "Journal to score")
      ->required();
  score->add_option("--level", score_level, "Citation level of the cell")
      ->required();
  score->add_option("--cot", score_cot, "Guidance method of the cell")
      ->required();
  score->add_option("--dataset-level", score_dataset_level,
                    "Level the dataset file is written at");
  score->add_option("--judge-threshold", score_judge_threshold,
                    "Content-word recall needed for entailment");
  score->add_option("--external-scores", score_external,
                    "External scorer response JSONL to merge");
  score->add_option("--threads", score_threads, "Scoring threads (0 = all)");
  score->add_option("--out", score_out, "Output path (default stdout)");
  score->add_option("--format", score_format, "json, markdown or csv");

  // report
  auto* render = app.add_subcommand("report",
                                    "Render a JSON report");
  std::string report_in, report_out, report_format = "markdown";
  render->add_option("--in", report_in, "report.json to render")->required();
  render->add_option("--format", report_format, "markdown, csv or json");
  render->add_option("--out", report_out, "Output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*convert) {
      LabelerOptions options;
      options.min_len = conv_min_len;
      if (conv_overlap == "any") {
        options.entity_overlap = EntityOverlap::Any;
      } else if (conv_overlap == "contain") {
        options.entity_overlap = EntityOverlap::Contain;
      } else {
        throw Error(ErrorKind::Config,
                    "--entity-overlap must be 'any' or 'contain'");
      }
      BuiltinRecognizer recognizer;
      ConvertCorpusStats stats = convert_corpus(
          conv_in, conv_out, parse_level_arg(conv_level), recognizer, options,
          conv_threshold, conv_strict, conv_threads);
      std::cout << "converted " << stats.lines_converted << " examples ("
                << stats.lines_failed << " failed, " << stats.lines_skipped
                << " skipped)\n"
                << "mean span coverage " << stats.mean_coverage << "\n"
                << "low-coverage fraction " << stats.low_coverage_fraction
                << "\n";
      return 0;
    }
    if (*run) {
      Config config;
      if (!run_config.empty()) config = Config::from_file(run_config);
      return run_command(config, run_dataset, run_pool, run_levels, run_cot,
                         run_k, run_order, run_dataset_level, run_judge,
                         run_judge_threshold, run_mock, run_endpoint,
                         run_model, run_key_env, run_anonymous, run_timeout,
                         run_retries, run_max_in_flight, run_threads, run_seed,
                         run_out, run_prompt_dir, run_external, run_max_tokens,
                         run_temperature);
    }
    if (*score) {
      std::vector<QAExample> dataset =
          load_dataset(score_dataset, parse_level_arg(score_dataset_level));
      CitationLevel level = parse_level_arg(score_level);
      CoTMethod method = parse_cot_arg(score_cot);
      std::map<std::string, JournalEntry> responses;
      for (JournalEntry& entry : read_journal(score_journal)) {
        responses[entry.example_id] = std::move(entry);
      }
      std::map<std::string, std::map<std::string, double>> externals;
      if (!score_external.empty()) {
        // Sidecar ids may be cell-qualified "<id>|<level>|<cot>"; strip the
        // qualifier when it matches this cell.
        std::string suffix = std::string("|") + to_string(level) + "|" +
                             to_string(method);
        for (auto& [id, scores] : read_external_scores(score_external)) {
          std::string key = id;
          if (key.size() > suffix.size() &&
              key.compare(key.size() - suffix.size(), suffix.size(),
                          suffix) == 0) {
            key = key.substr(0, key.size() - suffix.size());
          } else if (key.find('|') != std::string::npos) {
            continue;  // belongs to another cell
          }
          for (const auto& [metric, value] : scores) {
            externals[key][metric] = value;
          }
        }
      }
      LexicalJudge judge(score_judge_threshold);
      AggregateReport report;
      report.cells.push_back(score_cell(dataset, level, method, responses,
                                        judge, score_threads,
                                        externals.empty() ? nullptr
                                                          : &externals));
      auto format = report_format_from_string(score_format);
      if (!format) {
        throw Error(ErrorKind::Config,
                    "unknown format '" + score_format + "'");
      }
      if (score_out.empty()) {
        std::cout << render_report(report, *format);
      } else {
        emit_report(report, *format, score_out);
      }
      return 0;
    }
    if (*render) {
      AggregateReport report = report_from_json_file(report_in);
      auto format = report_format_from_string(report_format);
      if (!format) {
        throw Error(ErrorKind::Config,
                    "unknown format '" + report_format + "'");
      }
      if (report_out.empty()) {
        std::cout << render_report(report, *format);
      } else {
        emit_report(report, *format, report_out);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
