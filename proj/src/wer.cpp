#include "medpipe/wer.hpp"

#include <algorithm>
#include <cctype>

#include "medpipe/errors.hpp"

namespace medpipe {

namespace {

bool is_stripped_punct(char c) {
    switch (c) {
        case '.': case ',': case '!': case '?': case ';': case ':':
        case '"': case '(': case ')': case '[': case ']':
            return true;
        default:
            return false;
    }
}

}  // namespace

WordSequence normalize_tokens(const std::string& text) {
    WordSequence words;
    std::string current;
    for (char c : text) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isspace(uc)) {
            if (!current.empty()) {
                words.push_back(std::move(current));
                current.clear();
            }
            continue;
        }
        if (is_stripped_punct(c)) continue;
        current.push_back(static_cast<char>(std::tolower(uc)));
    }
    if (!current.empty()) words.push_back(std::move(current));
    return words;
}

WerBreakdown wer(const WordSequence& reference, const WordSequence& hypothesis) {
    if (reference.empty()) {
        throw EmptyReference("reference must contain at least one word");
    }
    const std::size_t r = reference.size();
    const std::size_t h = hypothesis.size();

    // cost[i][j]: edit distance between the first i reference words and the
    // first j hypothesis words, flattened row-major
    std::vector<std::size_t> cost((r + 1) * (h + 1));
    auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return cost[i * (h + 1) + j]; };
    for (std::size_t i = 0; i <= r; ++i) at(i, 0) = i;
    for (std::size_t j = 0; j <= h; ++j) at(0, j) = j;
    for (std::size_t i = 1; i <= r; ++i) {
        for (std::size_t j = 1; j <= h; ++j) {
            const std::size_t sub =
                at(i - 1, j - 1) + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
            const std::size_t del = at(i - 1, j) + 1;
            const std::size_t ins = at(i, j - 1) + 1;
            at(i, j) = std::min({sub, del, ins});
        }
    }

    // Walk back preferring diagonal, then deletion, then insertion, so tied
    // alignments always resolve to the same breakdown.
    WerBreakdown out{};
    std::size_t i = r;
    std::size_t j = h;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0) {
            const bool match = reference[i - 1] == hypothesis[j - 1];
            if (at(i, j) == at(i - 1, j - 1) + (match ? 0 : 1)) {
                if (match) {
                    ++out.hits;
                } else {
                    ++out.substitutions;
                }
                --i;
                --j;
                continue;
            }
        }
        if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
            ++out.deletions;
            --i;
            continue;
        }
        ++out.insertions;
        --j;
    }

    out.reference_length = r;
    out.wer = static_cast<double>(out.substitutions + out.deletions + out.insertions) /
              static_cast<double>(r);
    return out;
}

WerBreakdown corpus_wer(const std::vector<std::pair<WordSequence, WordSequence>>& pairs) {
    if (pairs.empty()) {
        throw EmptyCorpus("corpus_wer needs at least one pair");
    }
    WerBreakdown pooled{};
    for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
        if (pairs[idx].first.empty()) {
            throw EmptyReference("empty reference at pair index " + std::to_string(idx));
        }
        const WerBreakdown one = wer(pairs[idx].first, pairs[idx].second);
        pooled.substitutions += one.substitutions;
        pooled.deletions += one.deletions;
        pooled.insertions += one.insertions;
        pooled.hits += one.hits;
        pooled.reference_length += one.reference_length;
    }
    pooled.wer =
        static_cast<double>(pooled.substitutions + pooled.deletions + pooled.insertions) /
        static_cast<double>(pooled.reference_length);
    return pooled;
}

}  // namespace medpipe
