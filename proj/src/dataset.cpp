#include "citeval/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "citeval/text.hpp"
#include "nlohmann/json.hpp"

namespace citeval {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void schema_error(size_t line_no, const std::string& field,
                               const std::string& why) {
  throw Error(ErrorKind::Schema,
              "line " + std::to_string(line_no) + ": field '" + field +
                  "': " + why,
              static_cast<long>(line_no));
}

std::string require_string(const json& row, const char* field,
                           size_t line_no) {
  if (!row.contains(field)) schema_error(line_no, field, "missing");
  const json& v = row.at(field);
  if (!v.is_string()) schema_error(line_no, field, "must be a string");
  return v.get<std::string>();
}

}  // namespace

QAExample parse_example_line(const std::string& line, size_t line_no,
                             CitationLevel level) {
  json row;
  try {
    row = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Schema,
                "line " + std::to_string(line_no) +
                    ": not valid JSON: " + e.what());
  }
  if (!row.is_object()) {
    throw Error(ErrorKind::Schema,
                "line " + std::to_string(line_no) + ": not a JSON object");
  }

  QAExample out;
  out.id = require_string(row, "id", line_no);
  if (out.id.empty()) schema_error(line_no, "id", "must be non-empty");
  out.question = require_string(row, "question", line_no);

  if (!row.contains("passages") || !row["passages"].is_array() ||
      row["passages"].empty()) {
    schema_error(line_no, "passages", "must be a non-empty array");
  }
  int index = 1;
  for (const json& p : row["passages"]) {
    if (!p.is_object() || !p.contains("text") || !p["text"].is_string()) {
      schema_error(line_no, "passages",
                   "entry " + std::to_string(index) +
                       " must be an object with a string 'text'");
    }
    Passage passage;
    passage.index = index++;
    passage.text = p["text"].get<std::string>();
    if (p.contains("title")) {
      if (!p["title"].is_string()) {
        schema_error(line_no, "passages", "'title' must be a string");
      }
      passage.title = p["title"].get<std::string>();
    }
    out.passages.push_back(std::move(passage));
  }

  std::string answer = require_string(row, "answer", line_no);
  try {
    out.gold = parse_answer(answer, level, ParseOptions{.strict = true});
  } catch (const Error& e) {
    throw Error(ErrorKind::GoldParse,
                "line " + std::to_string(line_no) +
                    ": gold answer does not parse at " + to_string(level) +
                    " level: " + e.what(),
                static_cast<long>(line_no));
  }
  for (int cited : cited_indices(out.gold)) {
    if (cited < 1 || cited > static_cast<int>(out.passages.size())) {
      throw Error(ErrorKind::GoldParse,
                  "line " + std::to_string(line_no) + ": gold cites passage " +
                      std::to_string(cited) + " but there are only " +
                      std::to_string(out.passages.size()),
                  static_cast<long>(line_no));
    }
  }

  if (row.contains("entities")) {
    if (!row["entities"].is_array()) {
      schema_error(line_no, "entities", "must be an array");
    }
    size_t plain_len = strip_citations(out.gold).size();
    for (const json& e : row["entities"]) {
      if (!e.is_object() || !e.contains("start") || !e.contains("end") ||
          !e["start"].is_number_unsigned() || !e["end"].is_number_unsigned()) {
        schema_error(line_no, "entities",
                     "entries need unsigned 'start' and 'end'");
      }
      EntitySpan span;
      span.begin = e["start"].get<size_t>();
      span.end = e["end"].get<size_t>();
      if (e.contains("label")) {
        if (!e["label"].is_string()) {
          schema_error(line_no, "entities", "'label' must be a string");
        }
        span.label = e["label"].get<std::string>();
      }
      if (span.begin >= span.end || span.end > plain_len) {
        schema_error(line_no, "entities",
                     "span [" + std::to_string(span.begin) + ", " +
                         std::to_string(span.end) +
                         ") out of range for the stripped answer (length " +
                         std::to_string(plain_len) + ")");
      }
      out.entities.push_back(std::move(span));
    }
  }

  if (row.contains("external_scores")) {
    if (!row["external_scores"].is_object()) {
      schema_error(line_no, "external_scores", "must be an object");
    }
    for (auto& [metric, value] : row["external_scores"].items()) {
      if (!value.is_number()) {
        schema_error(line_no, "external_scores",
                     "'" + metric + "' must be a number");
      }
      out.external_scores[metric] = value.get<double>();
    }
  }
  return out;
}

std::vector<QAExample> load_dataset(const std::string& path,
                                    CitationLevel level, bool strict,
                                    LoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open dataset: " + path);

  std::vector<QAExample> out;
  std::set<std::string> seen_ids;
  std::string line;
  size_t line_no = 0;
  LoadStats local;
  while (std::getline(in, line)) {
    ++line_no;
    bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
    if (blank) continue;
    try {
      QAExample example = parse_example_line(line, line_no, level);
      if (!seen_ids.insert(example.id).second) {
        throw Error(ErrorKind::Schema,
                    "line " + std::to_string(line_no) + ": duplicate id '" +
                        example.id + "'",
                    static_cast<long>(line_no));
      }
      out.push_back(std::move(example));
      ++local.loaded;
    } catch (const Error& e) {
      if (strict) throw;
      if (e.kind() != ErrorKind::Schema && e.kind() != ErrorKind::GoldParse) {
        throw;
      }
      ++local.skipped;
    }
  }
  if (stats) *stats = local;
  return out;
}

std::string example_to_line(const QAExample& example) {
  ordered_json row;
  row["id"] = example.id;
  row["question"] = example.question;
  ordered_json passages = ordered_json::array();
  for (const Passage& p : example.passages) {
    passages.push_back(ordered_json{{"title", p.title}, {"text", p.text}});
  }
  row["passages"] = std::move(passages);
  row["answer"] = serialize(example.gold);
  if (!example.entities.empty()) {
    ordered_json entities = ordered_json::array();
    for (const EntitySpan& e : example.entities) {
      entities.push_back(ordered_json{
          {"start", e.begin}, {"end", e.end}, {"label", e.label}});
    }
    row["entities"] = std::move(entities);
  }
  if (!example.external_scores.empty()) {
    ordered_json scores;
    for (const auto& [metric, score] : example.external_scores) {
      scores[metric] = score;
    }
    row["external_scores"] = std::move(scores);
  }
  return row.dump();
}

void save_dataset(const std::vector<QAExample>& examples,
                  const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write dataset: " + path);
  for (const QAExample& example : examples) {
    out << example_to_line(example) << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "short write to " + path);
}

}  // namespace citeval
