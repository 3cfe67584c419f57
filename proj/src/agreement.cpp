#include "qgen/agreement.hpp"

#include <algorithm>
#include <cstdio>

#include "qgen/error.hpp"

namespace qgen {

namespace {

constexpr std::array<Criterion, 9> kCriteria = {{
    {"C1", Direction::higher_is_better, "The question is grammatically correct."},
    {"C2", Direction::higher_is_better, "The question makes sense."},
    {"C3", Direction::lower_is_better, "The question would be clearer with more information."},
    {"C4", Direction::lower_is_better, "The question would be clearer with less information."},
    {"C5", Direction::higher_is_better, "The question is relevant to the sentence."},
    {"C6", Direction::higher_is_better, "The suggested answer answers the question correctly."},
    {"C7", Direction::lower_is_better, "The answer would be clearer if phrased differently."},
    {"C8", Direction::lower_is_better, "The answer would be clearer with more information."},
    {"C9", Direction::lower_is_better, "The answer would be clearer with less information."},
}};

/// Dense ranks 0..d-1 of the values.
std::vector<std::size_t> dense_ranks(std::span<const int> v, std::size_t& distinct) {
  std::vector<int> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  distinct = sorted.size();
  std::vector<std::size_t> out;
  out.reserve(v.size());
  for (int x : v) out.push_back(static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin()));
  return out;
}

std::optional<int> constant_value(std::span<const int> v) {
  if (v.empty()) return std::nullopt;
  if (std::all_of(v.begin(), v.end(), [&](int x) { return x == v.front(); })) return v.front();
  return std::nullopt;
}

}  // namespace

const std::array<Criterion, 9>& survey_criteria() { return kCriteria; }

std::optional<std::size_t> criterion_index(std::string_view id) {
  for (std::size_t i = 0; i < kCriteria.size(); ++i)
    if (kCriteria[i].id == id) return i;
  return std::nullopt;
}

RatingMatrix::RatingMatrix(std::size_t items, std::size_t raters, std::vector<int> cells, int categories)
    : items_(items), raters_(raters), categories_(categories), cells_(std::move(cells)) {
  if (categories_ < 2) throw Error("a rating scale needs at least two categories");
  if (cells_.size() != items_ * raters_) throw Error("rating matrix size does not match items x raters");
  for (int c : cells_)
    if (c < 1 || c > categories_) throw Error("score " + std::to_string(c) + " outside 1.." + std::to_string(categories_));
}

std::vector<int> RatingMatrix::column(std::size_t rater) const {
  std::vector<int> out;
  out.reserve(items_);
  for (std::size_t i = 0; i < items_; ++i) out.push_back(at(i, rater));
  return out;
}

double randolph_kappa(const RatingMatrix& m) {
  if (m.items() == 0) throw Error("kappa needs at least one item");
  if (m.raters() < 2) throw Error("kappa needs at least two raters");
  const auto r = static_cast<long long>(m.raters());
  long long agreeing = 0;
  std::vector<long long> n(static_cast<std::size_t>(m.categories()) + 1);
  for (std::size_t i = 0; i < m.items(); ++i) {
    std::fill(n.begin(), n.end(), 0);
    for (std::size_t j = 0; j < m.raters(); ++j) ++n[static_cast<std::size_t>(m.at(i, j))];
    for (auto c : n) agreeing += c * (c - 1);
  }
  const double observed = static_cast<double>(agreeing) / (static_cast<double>(m.items()) * static_cast<double>(r * (r - 1)));
  const double chance = 1.0 / m.categories();
  return (observed - chance) / (1.0 - chance);
}

std::string Gamma::to_string(int precision) const {
  if (!available()) return "NA/" + std::to_string(*na_score_);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, g_);
  return buf;
}

PairCounts count_pairs(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error("gamma needs two score sequences of equal length");
  std::size_t da = 0;
  std::size_t db = 0;
  const auto ra = dense_ranks(a, da);
  const auto rb = dense_ranks(b, db);
  // table[x][y]: items scored x by a and y by b (dense ranks).
  std::vector<std::vector<long long>> table(da, std::vector<long long>(db, 0));
  for (std::size_t i = 0; i < a.size(); ++i) ++table[ra[i]][rb[i]];

  // above[x][y] = items with rank_a > x and rank_b > y
  // below[x][y] = items with rank_a > x and rank_b < y
  std::vector<std::vector<long long>> upper(da + 1, std::vector<long long>(db + 1, 0));
  for (std::size_t x = da; x-- > 0;)
    for (std::size_t y = db; y-- > 0;)
      upper[x][y] = table[x][y] + upper[x + 1][y] + upper[x][y + 1] - upper[x + 1][y + 1];
  std::vector<std::vector<long long>> lower(da + 1, std::vector<long long>(db + 1, 0));
  for (std::size_t x = da; x-- > 0;)
    for (std::size_t y = 0; y < db; ++y)
      lower[x][y + 1] = table[x][y] + lower[x + 1][y + 1] + lower[x][y] - lower[x + 1][y];

  PairCounts pc;
  for (std::size_t x = 0; x < da; ++x)
    for (std::size_t y = 0; y < db; ++y) {
      if (!table[x][y]) continue;
      pc.concordant += table[x][y] * upper[x + 1][y + 1];
      pc.discordant += table[x][y] * lower[x + 1][y];
    }
  return pc;
}

Gamma gk_gamma(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error("gamma needs two score sequences of equal length");
  if (a.size() < 2) throw Error("gamma needs at least two items");
  const auto pc = count_pairs(a, b);
  if (pc.concordant + pc.discordant == 0) {
    if (auto x = constant_value(a)) return Gamma::not_available(*x);
    return Gamma::not_available(*constant_value(b));
  }
  return Gamma::value(static_cast<double>(pc.concordant - pc.discordant) /
                      static_cast<double>(pc.concordant + pc.discordant));
}

Gamma gk_gamma(const RatingMatrix& m) {
  if (m.raters() < 2) throw Error("gamma needs at least two raters");
  if (m.items() < 2) throw Error("gamma needs at least two items");
  std::vector<std::vector<int>> cols;
  for (std::size_t r = 0; r < m.raters(); ++r) cols.push_back(m.column(r));
  PairCounts total;
  for (std::size_t r = 0; r < cols.size(); ++r)
    for (std::size_t s = r + 1; s < cols.size(); ++s) {
      const auto pc = count_pairs(cols[r], cols[s]);
      total.concordant += pc.concordant;
      total.discordant += pc.discordant;
    }
  if (total.concordant + total.discordant == 0) {
    for (const auto& c : cols)
      if (auto x = constant_value(c)) return Gamma::not_available(*x);
  }
  return Gamma::value(static_cast<double>(total.concordant - total.discordant) /
                      static_cast<double>(total.concordant + total.discordant));
}

AgreementResult agreement(const RatingMatrix& m) { return {randolph_kappa(m), gk_gamma(m)}; }

}  // namespace qgen
