#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace medpipe {

using WordSequence = std::vector<std::string>;

struct WerBreakdown {
    std::size_t substitutions;
    std::size_t deletions;
    std::size_t insertions;
    std::size_t hits;
    std::size_t reference_length;
    double wer;  // (S + D + I) / reference_length; can exceed 1
};

// Lowercases ASCII letters, removes the characters .,!?;:"()[] and splits on
// whitespace runs. Bytes outside ASCII pass through untouched (UTF-8 text is
// split and compared as-is, without case folding).
WordSequence normalize_tokens(const std::string& text);

// Word error rate from the Levenshtein alignment of the two sequences. When
// several alignments tie on edit distance, the counts come from the backtrace
// preferring match/substitution over deletion over insertion. An empty
// reference raises EmptyReference.
WerBreakdown wer(const WordSequence& reference, const WordSequence& hypothesis);

// Micro-average: error and reference counts are pooled over all pairs, not the
// per-pair rates. Raises EmptyCorpus for an empty list and EmptyReference
// (naming the pair index) when any reference is empty.
WerBreakdown corpus_wer(const std::vector<std::pair<WordSequence, WordSequence>>& pairs);

}  // namespace medpipe
