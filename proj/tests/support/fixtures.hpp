#pragma once

#include <vector>

#include "citeval/citation.hpp"

// Conformance fixtures shared by the unit and acceptance tests. The three
// answer rows express the same answer at the three citation levels; the
// guidance strings are the reference reasoning prefixes for that answer.
// docs/format.md reproduces all of them.

namespace citeval::fixtures {

inline constexpr const char* kSpanRow =
    "\" [ 1 Johnny Panic and the Bible of Dreams ] \" [ 1 is a song by the "
    "British band Tears for Fears ] . They also have [ 5 international hit "
    "singles ] such as: [ 5 \"Mothers Talk\", \"Shout\", \"Everybody Wants "
    "to Rule the World\", \"Head over Heels\", and \"I Believe\". ]";

inline constexpr const char* kSentenceRow =
    "\" Johnny Panic and the Bible of Dreams \" is a song by the British "
    "band Tears for Fears [1]. They also have international hit singles "
    "such as: \"Mothers Talk\", \"Shout\", \"Everybody Wants to Rule the "
    "World\", \"Head over Heels\", and \"I Believe\" [5].";

inline constexpr const char* kPassageRow =
    "\" Johnny Panic and the Bible of Dreams \" is a song by the British "
    "band Tears for Fears. They also have international hit singles "
    "such as: \"Mothers Talk\", \"Shout\", \"Everybody Wants to Rule the "
    "World\", \"Head over Heels\", and \"I Believe\" [1][5].";

inline constexpr const char* kSpanGuidance =
    "Lets analyze the relevant spans of information from the input "
    "passages.\n"
    "From passage [1], the relevant spans are the following:\n"
    "  * Johnny Panic and the Bible of Dreams\n"
    "  * is a song by the British band Tears for Fears\n"
    "From passage [5], the relevant spans are the following:\n"
    "  * international hit singles\n"
    "  * \"Mothers Talk\", \"Shout\", \"Everybody Wants to Rule the World\", "
    "\"Head over Heels\", and \"I Believe\".\n"
    "Thus, the final answer is:";

inline constexpr const char* kSentenceGuidance =
    "Lets analyze the relevant information from the input passages.\n"
    "From passage [1], we know that: \" Johnny Panic and the Bible of "
    "Dreams \" is a song by the British band Tears for Fears .\n"
    "From passage [5], we know that: They also have international hit "
    "singles such as: \"Mothers Talk\", \"Shout\", \"Everybody Wants to "
    "Rule the World\", \"Head over Heels\", and \"I Believe\".\n"
    "Thus, the final answer is:";

inline constexpr const char* kPassageGuidance =
    "Lets analyze the input passages.\n"
    "The only relevant passages to the question are passages 1, 5.\n"
    "Thus, the final answer is:";

// Five passages sized so the fixture answer's citations {1, 5} resolve and
// every quoted span is verbatim in its passage.
inline constexpr const char* kPassage1Title =
    "Johnny Panic and the Bible of Dreams (song)";
inline constexpr const char* kPassage1Text =
    "\" Johnny Panic and the Bible of Dreams \" is a song by the British "
    "band Tears for Fears, released as a single in 1990.";
inline constexpr const char* kPassage5Title = "Songs from the Big Chair";
inline constexpr const char* kPassage5Text =
    "Songs from the Big Chair is the second studio album. They also have "
    "international hit singles such as: \"Mothers Talk\", \"Shout\", "
    "\"Everybody Wants to Rule the World\", \"Head over Heels\", and "
    "\"I Believe\".";

inline std::vector<Passage> table_passages() {
  return {
      {1, kPassage1Title, kPassage1Text},
      {2, "Filler two", "Nothing relevant here."},
      {3, "Filler three", "Still nothing relevant."},
      {4, "Filler four", "More padding text."},
      {5, kPassage5Title, kPassage5Text},
  };
}

}  // namespace citeval::fixtures
