#include "citeval/batch.hpp"

#include "citeval/text.hpp"

#if defined(CITEVAL_HAVE_OPENMP)
#include <omp.h>
#endif

namespace citeval {
namespace {

// Both kernels share the per-slot body so the serial and parallel paths
// cannot drift apart.

void convert_slot(const QAExample& example, const EntityRecognizer& recognizer,
                  const LabelerOptions& options, double low_coverage_threshold,
                  ConvertResult& slot) {
  try {
    std::string plain = strip_citations(example.gold);
    std::set<int> cited = cited_indices(example.gold);
    if (cited.empty()) {
      // An answer citing nothing has nothing to quote from; cite every
      // passage so the miner can still look for support.
      for (const Passage& p : example.passages) cited.insert(p.index);
    }
    if (!example.entities.empty()) {
      FixedRecognizer fixed(example.entities);
      slot.labeled = label_answer(plain, example.passages, cited, fixed,
                                  options, low_coverage_threshold);
    } else {
      slot.labeled = label_answer(plain, example.passages, cited, recognizer,
                                  options, low_coverage_threshold);
    }
    slot.ok = true;
  } catch (const Error& e) {
    slot.error = e.what();
  } catch (const std::exception& e) {
    slot.error = e.what();
  }
}

void score_slot(const QAExample& example, const AttributedAnswer* pred,
                const EntailmentJudge& judge,
                const std::map<std::string, double>* external,
                ScoreResult& slot) {
  if (!pred) return;  // no prediction, slot stays !ok with empty error
  try {
    slot.report = score_example(*pred, example.gold, example.passages, judge,
                                external);
    slot.ok = true;
  } catch (const Error& e) {
    slot.error = e.what();
  } catch (const std::exception& e) {
    slot.error = e.what();
  }
}

}  // namespace

std::vector<ConvertResult> convert_batch_serial(
    const std::vector<QAExample>& examples, const EntityRecognizer& recognizer,
    const LabelerOptions& options, double low_coverage_threshold) {
  std::vector<ConvertResult> out(examples.size());
  for (size_t i = 0; i < examples.size(); ++i) {
    convert_slot(examples[i], recognizer, options, low_coverage_threshold,
                 out[i]);
  }
  return out;
}

std::vector<ConvertResult> convert_batch(const std::vector<QAExample>& examples,
                                         const EntityRecognizer& recognizer,
                                         const LabelerOptions& options,
                                         double low_coverage_threshold,
                                         int threads) {
#if defined(CITEVAL_HAVE_OPENMP)
  std::vector<ConvertResult> out(examples.size());
  int n = threads > 0 ? threads : omp_get_max_threads();
  long count = static_cast<long>(examples.size());
#pragma omp parallel for schedule(dynamic) num_threads(n)
  for (long i = 0; i < count; ++i) {
    // convert_slot traps every exception; nothing may escape the region.
    convert_slot(examples[i], recognizer, options, low_coverage_threshold,
                 out[i]);
  }
  return out;
#else
  (void)threads;
  return convert_batch_serial(examples, recognizer, options,
                              low_coverage_threshold);
#endif
}

std::vector<ScoreResult> score_batch_serial(
    const std::vector<QAExample>& examples,
    const std::vector<const AttributedAnswer*>& preds,
    const EntailmentJudge& judge,
    const std::vector<const std::map<std::string, double>*>* externals) {
  if (preds.size() != examples.size()) {
    throw Error(ErrorKind::InvariantViolation,
                "score_batch: preds and examples differ in length");
  }
  std::vector<ScoreResult> out(examples.size());
  for (size_t i = 0; i < examples.size(); ++i) {
    score_slot(examples[i], preds[i], judge,
               externals ? (*externals)[i] : nullptr, out[i]);
  }
  return out;
}

std::vector<ScoreResult> score_batch(
    const std::vector<QAExample>& examples,
    const std::vector<const AttributedAnswer*>& preds,
    const EntailmentJudge& judge,
    const std::vector<const std::map<std::string, double>*>* externals,
    int threads) {
  if (preds.size() != examples.size()) {
    throw Error(ErrorKind::InvariantViolation,
                "score_batch: preds and examples differ in length");
  }
#if defined(CITEVAL_HAVE_OPENMP)
  std::vector<ScoreResult> out(examples.size());
  int n = threads > 0 ? threads : omp_get_max_threads();
  long count = static_cast<long>(examples.size());
#pragma omp parallel for schedule(dynamic) num_threads(n)
  for (long i = 0; i < count; ++i) {
    score_slot(examples[i], preds[i], judge,
               externals ? (*externals)[i] : nullptr, out[i]);
  }
  return out;
#else
  (void)threads;
  return score_batch_serial(examples, preds, judge, externals);
#endif
}

}  // namespace citeval
