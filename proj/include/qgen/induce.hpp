#pragma once

// Template induction from (sentence tree, question, answer) triples.

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qgen/conllu.hpp"
#include "qgen/stats.hpp"
#include "qgen/template.hpp"

namespace qgen {

struct TrainingTriple {
  DepTree tree;
  std::string question;
  std::string answer;
  /// Parse of the question itself, if available; supplies literal tags.
  std::optional<DepTree> question_tree;
};

/// Inverse document frequencies over case-folded lemmas.
///
/// idf(w) = ln(N / df(w)); a lemma never seen gets ln(N / 0.5).
class IdfModel {
 public:
  IdfModel() = default;
  IdfModel(std::map<std::string, int> document_frequency, int doc_count);

  double idf(std::string_view lemma) const;
  int doc_count() const noexcept { return doc_count_; }
  const std::map<std::string, int>& document_frequency() const noexcept { return df_; }

  void save(std::ostream& out) const;
  static IdfModel load(std::istream& in);

 private:
  std::map<std::string, int> df_;
  int doc_count_ = 0;
};

/// Each document is a bag of terms; terms are case-folded here.
IdfModel build_idf(std::span<const std::vector<std::string>> documents);
/// Documents of trees; the lemma of every token is a term.
IdfModel build_idf(std::span<const std::vector<DepTree>> documents);

struct AnswerSpan {
  int first = 0;  ///< first token id
  int last = 0;   ///< last token id, inclusive
  /// Token whose subtree yield is exactly the span, if any.
  const Token* covering = nullptr;
};

/// Leftmost case-insensitive match of the answer as a contiguous run of
/// tokens. Whitespace in the answer is not significant, so "in 2010" and
/// "in  2010" both match the tokens `in` `2010`. Throws AlignmentFailure.
AnswerSpan locate_answer(const DepTree& tree, std::string_view answer);

struct InductionOptions {
  /// Unmatched question words with idf above this are content words.
  double theta_content = 1.0;
};

/// Expresses the question and the answer through the source tree.
/// Throws AlignmentFailure or InductionFailure.
Template induce_pair(const TrainingTriple& triple, const IdfModel& idf, const InductionOptions& options = {});

struct InductionReport {
  std::size_t triples = 0;
  std::size_t succeeded = 0;
  std::size_t alignment_failures = 0;
  std::size_t induction_failures = 0;
};

/// Induces every triple and merges structurally identical templates.
TemplateSet induce_all(std::span<const TrainingTriple> triples, const IdfModel& idf, const InductionOptions& options,
                       InductionReport* report = nullptr);

/// Support distribution of a template set (count is the number of templates).
Summary template_stats(const TemplateSet& ts);

/// The question as emitted by a template: tokenized, lowercased, single spaces.
std::string normalize_question(std::string_view question);
/// The answer as emitted by a template.
std::string normalize_answer(std::string_view answer);

}  // namespace qgen
