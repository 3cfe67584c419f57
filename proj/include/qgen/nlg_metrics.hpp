#pragma once

// Corpus-level BLEU, ROUGE-L, CIDEr, and the first-two-words distribution.
//
// All metrics tokenize with metric_tokens(): lowercase, strip terminal
// punctuation, split on whitespace.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qgen {

std::vector<std::string> metric_tokens(std::string_view s);

/// [BLEU-1, ..., BLEU-max_n] with clipped n-gram precision summed over the
/// corpus, uniform geometric mean over orders and a corpus brevity penalty.
/// Throws Error on an empty corpus, mismatched sizes or max_n outside 1..4.
std::vector<double> bleu_n(std::span<const std::string> hypotheses, std::span<const std::string> references,
                           int max_n = 4);

/// LCS-based F-measure, best over the references.
double rouge_l(std::string_view hypothesis, std::span<const std::string> references, double beta = 1.2);

/// Mean ROUGE-L over items with one reference each.
double corpus_rouge_l(std::span<const std::string> hypotheses, std::span<const std::string> references,
                      double beta = 1.2);

/// Plain CIDEr (orders 1..4, idf from the references, x10), averaged over
/// items. Throws Error for fewer than two items.
double cider(std::span<const std::string> hypotheses, std::span<const std::string> references);

struct BigramCount {
  std::string first;
  std::optional<std::string> second;  ///< absent for one-word questions
  std::size_t count = 0;

  std::string label() const { return second ? first + ' ' + *second : first; }
  bool operator==(const BigramCount&) const = default;
};

/// First two words of each question, most frequent first, ties alphabetical.
std::vector<BigramCount> first_two_words_dist(std::span<const std::string> questions);

}  // namespace qgen
