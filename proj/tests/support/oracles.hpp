#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "citeval/labeler.hpp"
#include "citeval/metrics.hpp"

// Independent reference implementations used to cross-check the library.
// Each one favours the most literal translation of the documented behavior
// over speed: full DP tables, find()-based substring enumeration, dense
// vector math. Keep them slow and obvious.

namespace citeval::testoracle {

// Longest common subsequence length via the full (n+1) x (m+1) table.
size_t lcs_table(const std::vector<std::string>& a,
                 const std::vector<std::string>& b);

// ROUGE-L F1 recomputed from the full-table LCS.
double rouge_l_oracle(std::string_view candidate, std::string_view reference);

// Maximal common substrings by O(n^2) enumeration of answer ranges plus
// std::string::find occurrence checks.
std::vector<CommonSubstring> common_substrings_oracle(std::string_view answer,
                                                      const Passage& passage,
                                                      size_t min_len);

// Greedy marking re-executed step by step on the brute-forced candidates.
std::vector<SpanMark> mark_spans_oracle(std::string_view answer,
                                        const std::vector<Passage>& passages,
                                        const std::vector<EntitySpan>& entities,
                                        const LabelerOptions& options = {});

// Deletes citation markup from serialized text with regexes: span openers
// "[ <n> ", span closers " ]", then bare "[<n>]" markers; canonicalizes the
// remainder. At span level the result equals strip_citations exactly; at
// sentence/passage level compare tokens (marker removal leaves a space
// before the final punctuation that the parser does not).
std::string strip_oracle(const std::string& serialized);

// TF-IDF cosine recomputed densely: tf = raw count, idf = ln((1+N)/(1+df))+1
// fitted on `pool` (unseen tokens take df = 0), L2-normalized dot product.
double cosine_oracle(std::string_view query, std::string_view candidate,
                     const std::vector<std::string>& pool);

}  // namespace citeval::testoracle
