#pragma once

#include <optional>
#include <string>
#include <vector>

#include "citeval/dataset.hpp"
#include "citeval/labeler.hpp"
#include "citeval/metrics.hpp"

// Corpus-scale kernels. The span labeling DP and the per-example scorers
// dominate conversion and evaluation time, and examples are independent, so
// both loops parallelize with OpenMP. Each kernel keeps a serial twin with
// the identical fold; outputs are written into per-example slots, so serial
// and parallel results match exactly and tests assert that. When the build
// lacks OpenMP the parallel entry points fall back to the twins.

namespace citeval {

struct ConvertResult {
  bool ok = false;
  LabeledAnswer labeled;  // valid iff ok
  std::string error;      // set iff !ok
};

std::vector<ConvertResult> convert_batch_serial(
    const std::vector<QAExample>& examples, const EntityRecognizer& recognizer,
    const LabelerOptions& options, double low_coverage_threshold);

// threads <= 0 means the OpenMP default. The recognizer must be stateless
// or otherwise safe to call concurrently (both shipped recognizers are).
std::vector<ConvertResult> convert_batch(
    const std::vector<QAExample>& examples, const EntityRecognizer& recognizer,
    const LabelerOptions& options, double low_coverage_threshold,
    int threads = 0);

struct ScoreResult {
  bool ok = false;
  MetricReport report;  // valid iff ok
  std::string error;    // set iff !ok
};

// preds[i] scores against examples[i]; a null pred yields an untouched
// (!ok, empty error) slot, which callers treat as "no prediction".
std::vector<ScoreResult> score_batch_serial(
    const std::vector<QAExample>& examples,
    const std::vector<const AttributedAnswer*>& preds,
    const EntailmentJudge& judge,
    const std::vector<const std::map<std::string, double>*>* externals =
        nullptr);

std::vector<ScoreResult> score_batch(
    const std::vector<QAExample>& examples,
    const std::vector<const AttributedAnswer*>& preds,
    const EntailmentJudge& judge,
    const std::vector<const std::map<std::string, double>*>* externals =
        nullptr,
    int threads = 0);

}  // namespace citeval
