#pragma once

// Scoring and filtering of overgenerated candidates.
//
// Two count models rank candidates: an n-gram model over morphological
// signatures (UPOS|FEATS) that judges the shape of the question, and a
// model of the first question word given the dependency relation of the
// answer. Both use additive smoothing with one extra OOV outcome.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qgen/conllu.hpp"
#include "qgen/generate.hpp"
#include "qgen/induce.hpp"
#include "qgen/stats.hpp"
#include "qgen/template.hpp"

namespace qgen {

class MorphNgramModel {
 public:
  static constexpr std::string_view kBegin = "<s>";
  static constexpr std::string_view kEnd = "</s>";
  static constexpr std::string_view kUnknown = "<unk>";

  explicit MorphNgramModel(int order = 3, double alpha = 1.0);

  /// Counts one padded signature sequence, and the form of every token
  /// for literal lookups.
  void add_sentence(const DepTree& tree);
  void add_sequence(std::span<const std::string> signatures);

  int order() const noexcept { return order_; }
  double alpha() const noexcept { return alpha_; }
  /// Distinct predictable symbols: signatures seen plus the end marker.
  std::size_t vocabulary_size() const noexcept { return vocab_.size(); }

  /// P(symbol | history) where only the last order-1 history symbols count.
  /// Symbols outside the vocabulary are scored as the OOV outcome.
  double prob(std::span<const std::string> history, std::string_view symbol) const;

  /// Sum of log-probabilities of the sequence after begin padding, with
  /// the end marker included when `with_end`.
  double log_prob(std::span<const std::string> signatures, bool with_end = false) const;

  /// Count of a full n-gram, given as order symbols.
  long ngram_count(std::span<const std::string> ngram) const;
  std::size_t distinct_ngrams() const noexcept { return ngrams_.size(); }

  /// Most frequent signature of a lowercased form in the treebank.
  std::optional<std::string> signature_of(std::string_view form) const;

  void save(std::ostream& out) const;
  static MorphNgramModel load(std::istream& in);

 private:
  int order_;
  double alpha_;
  std::map<std::string, long> ngrams_;     // tab-joined order symbols
  std::map<std::string, long> histories_;  // tab-joined order-1 symbols
  std::map<std::string, std::size_t> vocab_;
  std::map<std::string, std::map<std::string, long>> lexicon_;
};

/// Throws Error on an empty treebank or order < 2.
MorphNgramModel build_morph_model(std::span<const DepTree> treebank, int order = 3, double alpha = 1.0);

class QuestionWordModel {
 public:
  explicit QuestionWordModel(double alpha = 1.0);

  void add(const std::string& condition, const std::string& word);

  double alpha() const noexcept { return alpha_; }
  /// Observed first words plus one OOV outcome.
  std::size_t outcomes() const noexcept { return words_.size() + 1; }
  double prob(std::string_view condition, std::string_view word) const;

  void save(std::ostream& out) const;
  static QuestionWordModel load(std::istream& in);

 private:
  double alpha_;
  std::map<std::string, std::map<std::string, long>> counts_;
  std::map<std::string, long> totals_;
  std::map<std::string, long> words_;
};

/// Dependency relation the answer hangs from: the covering node, else the
/// leftmost answer token. "_" when nothing in the answer is from the tree.
std::string answer_condition(const DepTree& tree, std::string_view answer);
std::string answer_condition(const Template& t, const DepTree& tree);

/// Triples whose answer cannot be located are skipped.
QuestionWordModel build_qword_model(std::span<const TrainingTriple> triples, double alpha = 1.0);

struct RankWeights {
  double morph = 1.0;
  double qword = 1.0;
};

struct RankModels {
  IdfModel idf;
  MorphNgramModel morph;
  QuestionWordModel qword;
  RankWeights weights;

  /// Throws Error unless weights are non-negative and not both zero.
  void validate() const;
};

/// File names inside a model directory.
inline constexpr std::string_view kIdfFile = "idf.tsv";
inline constexpr std::string_view kMorphFile = "morph.tsv";
inline constexpr std::string_view kQwordFile = "qword.tsv";

RankModels load_models(const std::string& dir, RankWeights weights = {});
void save_models(const std::string& dir, const RankModels& models);

/// w_morph * mean log P_morph over question words + w_qword * log P_qword.
/// Stores the total in c.score and both unweighted parts in c.score_parts.
double score_candidate(GenCandidate& c, const DepTree& tree, const Template& t, const RankModels& m);

struct BasicFilterOptions {
  bool min_length = true;
  std::size_t min_question_tokens = 3;
  bool nontrivial_answer = true;
  bool answer_in_question = true;
  bool dedup = true;
};

/// Drops short questions, empty or whole-sentence answers, questions that
/// contain their own answer, and duplicate pairs (best score survives).
std::vector<GenCandidate> basic_filter(std::span<const GenCandidate> cs, const BasicFilterOptions& options = {});

/// Keeps candidates scoring at least the mean of the sentence.
std::vector<GenCandidate> mean_filter(std::span<const GenCandidate> cs);

struct StageCounts {
  std::size_t applicable = 0;
  std::size_t after_basic = 0;
  std::size_t after_mean = 0;
};

struct SentenceOutcome {
  StageCounts counts;
  /// Mean-filter survivors, best first.
  std::vector<GenCandidate> ranked;
};

/// overgenerate -> score -> basic_filter -> mean_filter for one sentence.
SentenceOutcome run_pipeline(const TemplateSet& ts, const DepTree& tree, const RankModels& models,
                             const BasicFilterOptions& filters = {});

struct GenerationStats {
  std::size_t sentences = 0;
  std::size_t set_size = 0;
  StageCounts totals;
  /// Sentences with at least one candidate at each stage.
  StageCounts with_any;
  double pct_after_mean = 0.0;
  /// Per-sentence counts after basic filtering, over sentences with at
  /// least one applicable template.
  Summary per_sentence;
};

/// `set_size` of 0 means the number of sentences given.
GenerationStats generation_stats(const std::map<std::string, StageCounts>& per_sentence, std::size_t set_size = 0);

}  // namespace qgen
