#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "citeval/metrics.hpp"
#include "support/fixtures.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace citeval;

namespace {

const ParseOptions kStrict{true};

std::vector<Passage> fixture_passages() { return fixtures::table_passages(); }

AttributedAnswer span_fixture() {
  return parse_answer(fixtures::kSpanRow, CitationLevel::Span, kStrict);
}

}  // namespace

TEST_CASE("rouge_l on hand-checked pairs") {
  CHECK(rouge_l("the cat sat", "the cat sat") == doctest::Approx(1.0));
  CHECK(rouge_l("granite harbor", "velvet monsoon") == 0.0);
  // 3 tokens each, LCS = {the, cat} -> P = R = 2/3.
  CHECK(rouge_l("the cat sat", "the cat ate") == doctest::Approx(2.0 / 3.0));
  // Order matters for the LCS: reversed bigram only keeps one token.
  CHECK(rouge_l("alpha beta", "beta alpha") == doctest::Approx(0.5));
}

TEST_CASE("rouge_l empty-side conventions") {
  CHECK(rouge_l("", "") == 0.0);
  CHECK(rouge_l("words here", "") == 0.0);
  CHECK(rouge_l("", "words here") == 0.0);
  CHECK(rouge_l("...", "!!") == 0.0);  // punctuation-only: no tokens
}

TEST_CASE("rouge_l matches the full-table oracle on random pairs") {
  testgen::Rng rng(5150u);
  for (int i = 0; i < 300; ++i) {
    std::string a, b;
    if (i % 3 == 0) {
      a = testgen::random_soup(rng);
      b = testgen::random_soup(rng);
    } else {
      a = strip_citations(testgen::random_answer(rng, CitationLevel::Span));
      b = strip_citations(testgen::random_answer(
          rng, i % 3 == 1 ? CitationLevel::Span : CitationLevel::Sentence));
    }
    INFO("a: " << a << "\nb: " << b);
    CHECK(rouge_l(a, b) == testoracle::rouge_l_oracle(a, b));
  }
}

TEST_CASE("token_f1 over multisets") {
  CHECK(token_f1("a a b", "a b b") == doctest::Approx(2.0 / 3.0));
  CHECK(token_f1("same words", "same words") == doctest::Approx(1.0));
  CHECK(token_f1("Same, WORDS!", "same words") == doctest::Approx(1.0));
  CHECK(token_f1("alpha", "beta") == 0.0);
  CHECK(token_f1("", "") == 1.0);
  CHECK(token_f1("..", "?!") == 1.0);  // both tokenless
  CHECK(token_f1("words", "") == 0.0);
}

TEST_CASE("doc_f1 on index sets") {
  CHECK(doc_f1({1, 5}, {1}) == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
  CHECK(doc_f1({1, 5}, {1, 5}) == 1.0);
  CHECK(doc_f1({2}, {3}) == 0.0);
  CHECK(doc_f1(std::set<int>{}, std::set<int>{}) == 1.0);
  CHECK(doc_f1({1}, std::set<int>{}) == 0.0);
  CHECK(doc_f1(std::set<int>{}, {1}) == 0.0);
}

TEST_CASE("doc_f1 over answers uses the cited index union") {
  const auto span = span_fixture();
  CHECK(doc_f1(span, span) == 1.0);
  const auto other =
      parse_answer("Quote [ 1 some cited words ] only.", CitationLevel::Span,
                   kStrict);
  // pred {1} vs gold {1, 5}.
  CHECK(doc_f1(other, span) == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("alce_f1 is the harmonic mean with a 0/0 guard") {
  CHECK(alce_f1(0.5, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
  CHECK(alce_f1(0.0, 0.0) == 0.0);
  CHECK(alce_f1(1.0, 1.0) == 1.0);
}

TEST_CASE("sem_f1 identity scores one at every level") {
  const auto passages = fixture_passages();
  const auto span = span_fixture();
  CHECK(sem_f1(span, span, passages) == 1.0);
  const auto sent =
      parse_answer(fixtures::kSentenceRow, CitationLevel::Sentence, kStrict);
  CHECK(sem_f1(sent, sent, passages) == 1.0);
  const auto pass =
      parse_answer(fixtures::kPassageRow, CitationLevel::Passage, kStrict);
  CHECK(sem_f1(pass, pass, passages) == 1.0);
}

TEST_CASE("sem_f1 averages over the union of cited indices") {
  const auto passages = fixture_passages();
  const auto gold = span_fixture();
  // Prediction reproduces the passage-1 spans but drops passage 5 entirely:
  // index 1 scores f1 = 1, index 5 scores 0, mean = 0.5.
  const auto pred = parse_answer(
      "\" [ 1 Johnny Panic and the Bible of Dreams ] \" "
      "[ 1 is a song by the British band Tears for Fears ] .",
      CitationLevel::Span, kStrict);
  CHECK(sem_f1(pred, gold, passages) == doctest::Approx(0.5));
}

TEST_CASE("sem_f1 of two uncited answers is one") {
  const AttributedAnswer a{CitationLevel::Span, {PlainText{"no quotes"}}};
  const AttributedAnswer b{CitationLevel::Span, {PlainText{"none either"}}};
  CHECK(sem_f1(a, b, fixture_passages()) == 1.0);
}

TEST_CASE("sem_f1 rejects mixed levels and out-of-range citations") {
  const auto passages = fixture_passages();
  const auto span = span_fixture();
  const auto sent =
      parse_answer(fixtures::kSentenceRow, CitationLevel::Sentence, kStrict);
  try {
    sem_f1(span, sent, passages);
    FAIL("expected LevelMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LevelMismatch);
  }
  const auto oob = parse_answer("A [ 9 quoted bit ] here.",
                                CitationLevel::Span, kStrict);
  CHECK_THROWS_AS(sem_f1(oob, oob, passages), Error);
  CHECK(sem_f1(oob, oob, passages, {}, /*lenient=*/true) == 1.0);
}

TEST_CASE("csca counts verbatim spans") {
  const auto passages = fixture_passages();
  CHECK(csca(span_fixture(), passages) == 1.0);

  // One span text that is not in its passage: 3 of 4 correct.
  auto broken = span_fixture();
  for (Segment& seg : broken.segments) {
    if (auto* sp = std::get_if<CitedSpan>(&seg)) {
      sp->text = "words the passage never says";
      break;
    }
  }
  const auto counts = csca_counts(broken, passages);
  CHECK(counts.total == 4);
  CHECK(counts.correct == 3);
  CHECK(csca(broken, passages) == doctest::Approx(0.75));
}

TEST_CASE("csca treats an out-of-range citation as incorrect") {
  const auto ans = parse_answer("A [ 9 quoted bit ] here.",
                                CitationLevel::Span, kStrict);
  const auto counts = csca_counts(ans, fixture_passages());
  CHECK(counts.total == 1);
  CHECK(counts.correct == 0);
}

TEST_CASE("csca canonicalizes whitespace before matching") {
  const std::vector<Passage> passages = {{1, "", "the  Danube\tflows  east"}};
  const auto ans = parse_answer("It says [ 1 the Danube flows east ] here.",
                                CitationLevel::Span, kStrict);
  CHECK(csca(ans, passages) == 1.0);
}

TEST_CASE("csca without spans is vacuously one") {
  const AttributedAnswer plain{CitationLevel::Span, {PlainText{"no quotes"}}};
  CHECK(csca(plain, {}) == 1.0);
  CHECK(CscaCounts{}.score() == 1.0);
}

TEST_CASE("csca is only defined at span level") {
  const auto sent =
      parse_answer(fixtures::kSentenceRow, CitationLevel::Sentence, kStrict);
  try {
    csca(sent, fixture_passages());
    FAIL("expected NotApplicable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotApplicable);
  }
}

TEST_CASE("lexical judge thresholds on content-word recall") {
  const LexicalJudge half(0.5);
  CHECK(half.entails("the granite harbor shines", "granite harbor"));
  // 1 of 2 content words: exactly at the threshold, which counts.
  CHECK(half.entails("the granite harbor shines", "granite quartz"));
  CHECK_FALSE(LexicalJudge(0.6).entails("the granite harbor shines",
                                        "granite quartz"));
  CHECK_FALSE(half.entails("the granite harbor", "velvet monsoon ember"));
  // A hypothesis with no content words is vacuously entailed.
  CHECK(half.entails("anything", "the of and"));
  CHECK(half.entails("", "the of and"));
}

TEST_CASE("alce on the sentence fixture: every citation precise") {
  const auto sent =
      parse_answer(fixtures::kSentenceRow, CitationLevel::Sentence, kStrict);
  const auto pr =
      alce_citation_pr(sent, fixture_passages(), LexicalJudge(0.5));
  CHECK(pr.units == 2);
  CHECK(pr.citations == 2);
  CHECK(pr.precision == 1.0);
  CHECK(pr.recall == 1.0);
}

TEST_CASE("alce at span level derives the same sentence units") {
  const auto pr =
      alce_citation_pr(span_fixture(), fixture_passages(), LexicalJudge(0.5));
  CHECK(pr.units == 2);
  CHECK(pr.citations == 2);
  CHECK(pr.precision == 1.0);
  CHECK(pr.recall == 1.0);
}

TEST_CASE("alce at passage level marks blanket citations imprecise") {
  // Both sentences inherit {1, 5}. Passage 1 alone entails only the first,
  // passage 5 alone only the second; in each case the other passage suffices
  // by itself, so the odd citation out is imprecise: precision 2/4.
  const auto pass =
      parse_answer(fixtures::kPassageRow, CitationLevel::Passage, kStrict);
  const auto pr =
      alce_citation_pr(pass, fixture_passages(), LexicalJudge(0.5));
  CHECK(pr.units == 2);
  CHECK(pr.citations == 4);
  CHECK(pr.precision == doctest::Approx(0.5));
  CHECK(pr.recall == 1.0);
  CHECK(alce_f1(pr.precision, pr.recall) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("alce scores uncited sentences as recall misses") {
  const auto ans = parse_answer(
      "The cited claim about granite holds [1]. An uncited aside.",
      CitationLevel::Sentence);
  const std::vector<Passage> passages = {
      {1, "", "the cited claim about granite holds firmly"}};
  const auto pr = alce_citation_pr(ans, passages, LexicalJudge(0.5));
  CHECK(pr.units == 2);
  CHECK(pr.citations == 1);
  CHECK(pr.recall == doctest::Approx(0.5));
  CHECK(pr.precision == 1.0);
}

TEST_CASE("alce with no citations anywhere is vacuously precise") {
  const auto ans =
      parse_answer("Plain claim one. Plain claim two.", CitationLevel::Sentence);
  const auto pr = alce_citation_pr(ans, {}, LexicalJudge(0.5));
  CHECK(pr.citations == 0);
  CHECK(pr.precision == 1.0);
  CHECK(pr.recall == 0.0);
  CHECK(alce_f1(pr.precision, pr.recall) == 0.0);
}

TEST_CASE("alce needs at least one statement unit") {
  const AttributedAnswer block_only{CitationLevel::Passage,
                                    {TerminalCitationBlock{{1}}}};
  try {
    alce_citation_pr(block_only, fixture_passages(), LexicalJudge(0.5));
    FAIL("expected NoUnits");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoUnits);
  }
}

TEST_CASE("score_example: identity prediction is perfect across the board") {
  const auto passages = fixture_passages();
  const auto gold = span_fixture();
  const LexicalJudge judge(0.5);
  const auto report = score_example(gold, gold, passages, judge);

  for (const char* name : {kMetricRougeL, kMetricSemF1, kMetricDocF1,
                           kMetricCsca, kMetricAlceF1}) {
    REQUIRE(report.per_metric.at(name).status == Applicability::Computed);
    CHECK(report.per_metric.at(name).score == doctest::Approx(1.0));
  }
  CHECK(report.per_metric.at(kMetricBert).status ==
        Applicability::ExternalPending);
  CHECK(report.per_metric.at(kMetricHem).status ==
        Applicability::ExternalPending);
  REQUIRE(report.answer_avg.has_value());
  CHECK(*report.answer_avg == doctest::Approx(1.0));
  REQUIRE(report.citation_avg.has_value());
  CHECK(*report.citation_avg == doctest::Approx(1.0));
}

TEST_CASE("score_example merges external scores into the answer family") {
  const auto passages = fixture_passages();
  const auto gold = span_fixture();
  const std::map<std::string, double> external = {{kMetricBert, 0.9},
                                                  {kMetricHem, 0.8}};
  const auto report =
      score_example(gold, gold, passages, LexicalJudge(0.5), &external);
  CHECK(report.per_metric.at(kMetricBert).status == Applicability::Computed);
  CHECK(report.per_metric.at(kMetricBert).score == doctest::Approx(0.9));
  REQUIRE(report.answer_avg.has_value());
  CHECK(*report.answer_avg == doctest::Approx((0.9 + 0.8 + 1.0) / 3.0));
}

TEST_CASE("score_example off span level marks CSCA not applicable") {
  const auto passages = fixture_passages();
  const auto sent =
      parse_answer(fixtures::kSentenceRow, CitationLevel::Sentence, kStrict);
  const auto report = score_example(sent, sent, passages, LexicalJudge(0.5));
  CHECK(report.per_metric.at(kMetricCsca).status ==
        Applicability::NotApplicable);
  REQUIRE(report.citation_avg.has_value());
  // Mean over ALCE, DOC F1, SEM-F1 only.
  CHECK(*report.citation_avg == doctest::Approx(1.0));
}

TEST_CASE("score_example on an empty prediction") {
  const auto passages = fixture_passages();
  const auto gold = span_fixture();
  const AttributedAnswer empty{CitationLevel::Span, {PlainText{""}}};
  const auto report = score_example(empty, gold, passages, LexicalJudge(0.5));
  CHECK(report.per_metric.at(kMetricRougeL).score == 0.0);
  CHECK(report.per_metric.at(kMetricDocF1).score == 0.0);
  CHECK(report.per_metric.at(kMetricSemF1).score == 0.0);
  // No spans: vacuously accurate copies; no sentences: ALCE undefined.
  CHECK(report.per_metric.at(kMetricCsca).score == 1.0);
  CHECK(report.per_metric.at(kMetricAlceF1).status ==
        Applicability::NotApplicable);
}

TEST_CASE("score_example rejects mixed levels") {
  const auto passages = fixture_passages();
  const auto span = span_fixture();
  const auto sent =
      parse_answer(fixtures::kSentenceRow, CitationLevel::Sentence, kStrict);
  CHECK_THROWS_AS(score_example(span, sent, passages, LexicalJudge(0.5)),
                  Error);
}

TEST_CASE("render_score formats percentages") {
  CHECK(render_score(1.0) == "100.00");
  CHECK(render_score(0.833333) == "83.33");
  CHECK(render_score(2.0 / 3.0) == "66.67");
  CHECK(render_score(0.0) == "0.00");
}

TEST_CASE("external request/score files round-trip") {
  const std::string req_path = "/tmp/citeval_test_requests.jsonl";
  const std::string score_path = "/tmp/citeval_test_scores.jsonl";
  write_external_requests(req_path, {{"ex-1|span|none", "candidate text",
                                      "reference text"},
                                     {"ex-2|span|none", "more", "words"}});
  {
    std::ifstream in(req_path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line.find("ex-1|span|none") != std::string::npos);
    CHECK(line.find("candidate text") != std::string::npos);
  }
  {
    std::ofstream out(score_path);
    out << R"({"id":"ex-1|span|none","metric":"BERT","score":0.91})" << "\n";
    out << R"({"id":"ex-1|span|none","metric":"HEM","score":0.77})" << "\n";
    out << "\n";
    out << R"({"id":"ex-2|span|none","metric":"BERT","score":0.5})" << "\n";
  }
  const auto scores = read_external_scores(score_path);
  REQUIRE(scores.size() == 2);
  CHECK(scores.at("ex-1|span|none").at("BERT") == doctest::Approx(0.91));
  CHECK(scores.at("ex-1|span|none").at("HEM") == doctest::Approx(0.77));
  CHECK(scores.at("ex-2|span|none").at("BERT") == doctest::Approx(0.5));
  std::remove(req_path.c_str());
  std::remove(score_path.c_str());
}

TEST_CASE("read_external_scores rejects malformed lines with a line number") {
  const std::string path = "/tmp/citeval_test_bad_scores.jsonl";
  {
    std::ofstream out(path);
    out << R"({"id":"x","metric":"BERT","score":0.9})" << "\n";
    out << "not json" << "\n";
  }
  try {
    read_external_scores(path);
    FAIL("expected Schema error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Schema);
    CHECK(e.detail() == 2);
  }
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_external_scores("/tmp/citeval_missing_file.jsonl"),
                  Error);
}
