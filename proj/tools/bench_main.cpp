// Benchmark: serial reference kernels vs the OpenMP ones on a synthetic
// corpus. Exits nonzero if the two disagree anywhere, so it doubles as a
// sanity check when run by hand.

#include <chrono>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "citeval/batch.hpp"
#include "citeval/pipeline.hpp"

namespace {

using namespace citeval;
using Clock = std::chrono::steady_clock;

const char* kWords[] = {
    "Aldebaran", "river",   "Morocco",  "treaty",   "Kepler",   "signal",
    "harbor",    "Vienna",  "catalog",  "Brussels", "granite",  "meridian",
    "Tanaka",    "orchard", "Helsinki", "quartz",   "pipeline", "Avignon",
    "ledger",    "Nairobi", "monsoon",  "Delphi",   "sediment", "Kyoto",
};

std::string sentence(std::mt19937_64& rng, int words) {
  std::uniform_int_distribution<size_t> pick(0, std::size(kWords) - 1);
  std::ostringstream out;
  for (int i = 0; i < words; ++i) {
    if (i) out << ' ';
    out << kWords[pick(rng)];
  }
  out << '.';
  return out.str();
}

std::vector<QAExample> synth_corpus(size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> words(6, 14);
  std::uniform_int_distribution<int> sentences(2, 4);
  std::vector<QAExample> corpus;
  corpus.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    QAExample ex;
    ex.id = "bench-" + std::to_string(i);
    ex.question = "What does record " + std::to_string(i) + " say?";
    std::ostringstream answer;
    std::vector<int> cited;
    for (int p = 1; p <= 3; ++p) {
      Passage passage;
      passage.index = p;
      passage.title = "Source " + std::to_string(p);
      std::string core = sentence(rng, words(rng));
      std::ostringstream text;
      for (int s = 0, e = sentences(rng); s < e; ++s) {
        if (s) text << ' ';
        text << sentence(rng, words(rng));
      }
      text << ' ' << core;
      passage.text = text.str();
      ex.passages.push_back(std::move(passage));
      if (p < 3) {
        if (p > 1) answer << ' ';
        answer << core;  // answer quotes passages 1 and 2 verbatim
        cited.push_back(p);
      }
    }
    AttributedAnswer gold{CitationLevel::Passage, {}};
    gold.segments.push_back(PlainText{answer.str()});
    gold.segments.push_back(TerminalCitationBlock{cited});
    ex.gold = std::move(gold);
    corpus.push_back(std::move(ex));
  }
  return corpus;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  size_t n = argc > 1 ? std::stoul(argv[1]) : 2000;
  std::cout << "corpus: " << n << " synthetic examples\n";
  std::vector<QAExample> corpus = synth_corpus(n, 7);

  BuiltinRecognizer recognizer;
  LabelerOptions options;

  auto t0 = Clock::now();
  auto serial = convert_batch_serial(corpus, recognizer, options, 0.1);
  double serial_convert = seconds_since(t0);

  t0 = Clock::now();
  auto parallel = convert_batch(corpus, recognizer, options, 0.1);
  double parallel_convert = seconds_since(t0);

  size_t mismatches = 0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (serial[i].ok != parallel[i].ok ||
        (serial[i].ok && !(serial[i].labeled.gold == parallel[i].labeled.gold))) {
      ++mismatches;
    }
  }

  // Score the converted corpus: serial vs parallel.
  std::vector<QAExample> converted;
  std::vector<AttributedAnswer> preds_storage;
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (!serial[i].ok) continue;
    QAExample ex = corpus[i];
    ex.gold = serial[i].labeled.gold;
    converted.push_back(std::move(ex));
    preds_storage.push_back(serial[i].labeled.gold);
  }
  std::vector<const AttributedAnswer*> preds;
  preds.reserve(preds_storage.size());
  for (const auto& p : preds_storage) preds.push_back(&p);
  LexicalJudge judge;

  t0 = Clock::now();
  auto score_serial = score_batch_serial(converted, preds, judge);
  double serial_score = seconds_since(t0);

  t0 = Clock::now();
  auto score_parallel = score_batch(converted, preds, judge);
  double parallel_score = seconds_since(t0);

  for (size_t i = 0; i < converted.size(); ++i) {
    if (score_serial[i].ok != score_parallel[i].ok ||
        (score_serial[i].ok && !(score_serial[i].report.per_metric ==
                                 score_parallel[i].report.per_metric))) {
      ++mismatches;
    }
  }

  auto row = [](const char* name, double serial_s, double parallel_s) {
    std::cout << name << ": serial " << serial_s << "s, parallel "
              << parallel_s << "s, speedup "
              << (parallel_s > 0 ? serial_s / parallel_s : 0) << "x\n";
  };
  row("convert", serial_convert, parallel_convert);
  row("score  ", serial_score, parallel_score);

  if (mismatches) {
    std::cerr << "MISMATCH: " << mismatches
              << " slots differ between serial and parallel kernels\n";
    return 1;
  }
  std::cout << "serial and parallel kernels agree on every slot\n";
  return 0;
}
