#pragma once

// Inter-annotator agreement on Likert-type judgements.
//
// Randolph's free-marginal kappa measures agreement on the absolute score;
// Goodman-Kruskal's gamma measures agreement on the relative order of item
// pairs, ignoring pairs tied for either rater.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qgen {

enum class Direction { higher_is_better, lower_is_better };

struct Criterion {
  std::string_view id;
  Direction direction;
  std::string_view statement;
};

/// The nine questionnaire criteria C1..C9.
const std::array<Criterion, 9>& survey_criteria();
/// Index of a criterion id ("C1".."C9"), or nullopt.
std::optional<std::size_t> criterion_index(std::string_view id);

/// Items x raters scores in 1..categories.
class RatingMatrix {
 public:
  /// `cells` is row-major: cells[item * raters + rater]. Throws Error on a
  /// size mismatch or a score outside 1..categories.
  RatingMatrix(std::size_t items, std::size_t raters, std::vector<int> cells, int categories = 4);

  std::size_t items() const noexcept { return items_; }
  std::size_t raters() const noexcept { return raters_; }
  int categories() const noexcept { return categories_; }
  int at(std::size_t item, std::size_t rater) const { return cells_[item * raters_ + rater]; }
  /// Scores of one rater over all items.
  std::vector<int> column(std::size_t rater) const;

 private:
  std::size_t items_;
  std::size_t raters_;
  int categories_;
  std::vector<int> cells_;
};

/// (P_o - 1/k) / (1 - 1/k) with P_o the mean proportion of agreeing rater
/// pairs per item. Throws Error for zero items or fewer than two raters.
double randolph_kappa(const RatingMatrix& m);

/// Gamma, or "not available" when no pair of items is untied for both
/// raters; this happens exactly when some rater gave every item the same
/// score, which is then reported.
class Gamma {
 public:
  static Gamma value(double g) { return Gamma(g, std::nullopt); }
  static Gamma not_available(int constant_score) { return Gamma(0.0, constant_score); }

  bool available() const noexcept { return !na_score_.has_value(); }
  double get() const { return g_; }
  /// Constant score of the degenerate rater (valid when !available()).
  int constant_score() const { return na_score_.value(); }

  /// "0.78" style (given precision) or "NA/4".
  std::string to_string(int precision = 2) const;

  bool operator==(const Gamma&) const = default;

 private:
  Gamma(double g, std::optional<int> na) : g_(g), na_score_(na) {}
  double g_;
  std::optional<int> na_score_;
};

struct PairCounts {
  long long concordant = 0;
  long long discordant = 0;
};

/// Concordant/discordant item pairs via a contingency table of the two
/// score vectors. Throws Error on a length mismatch.
PairCounts count_pairs(std::span<const int> a, std::span<const int> b);

/// Throws Error when lengths differ or fewer than two items are given.
Gamma gk_gamma(std::span<const int> a, std::span<const int> b);

/// Gamma pooled over all rater pairs (equals gk_gamma for two raters).
Gamma gk_gamma(const RatingMatrix& m);

struct AgreementResult {
  double kappa = 0.0;
  Gamma gamma = Gamma::value(0.0);
};

AgreementResult agreement(const RatingMatrix& m);

}  // namespace qgen
