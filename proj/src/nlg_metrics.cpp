#include "qgen/nlg_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "qgen/error.hpp"
#include "qgen/text.hpp"

namespace qgen {

namespace {

using NgramCounts = std::unordered_map<std::string, int>;

NgramCounts ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts out;
  if (tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (std::size_t k = 0; k < n; ++k) {
      if (k) key += '\x1f';
      key += tokens[i + k];
    }
    ++out[key];
  }
  return out;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

void check_corpus(std::span<const std::string> hyps, std::span<const std::string> refs) {
  if (hyps.size() != refs.size()) throw Error("hypotheses and references differ in number");
  if (hyps.empty()) throw Error("empty corpus");
}

}  // namespace

std::vector<std::string> metric_tokens(std::string_view s) {
  auto lowered = text::lowercase(s);
  std::string_view v = lowered;
  while (!v.empty() && std::string_view(".?!,;: \t\r\n").find(v.back()) != std::string_view::npos) v.remove_suffix(1);
  return text::split_whitespace(v);
}

std::vector<double> bleu_n(std::span<const std::string> hypotheses, std::span<const std::string> references,
                           int max_n) {
  check_corpus(hypotheses, references);
  if (max_n < 1 || max_n > 4) throw Error("BLEU order must be in 1..4");
  const auto orders = static_cast<std::size_t>(max_n);
  std::vector<long> matched(orders, 0);
  std::vector<long> total(orders, 0);
  long hyp_len = 0;
  long ref_len = 0;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const auto h = metric_tokens(hypotheses[i]);
    const auto r = metric_tokens(references[i]);
    hyp_len += static_cast<long>(h.size());
    ref_len += static_cast<long>(r.size());
    for (std::size_t n = 1; n <= orders; ++n) {
      const auto hc = ngrams(h, n);
      const auto rc = ngrams(r, n);
      for (const auto& [g, c] : hc) {
        total[n - 1] += c;
        if (auto it = rc.find(g); it != rc.end()) matched[n - 1] += std::min(c, it->second);
      }
    }
  }
  const double bp = hyp_len == 0 ? 0.0
                    : hyp_len < ref_len ? std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len))
                                        : 1.0;
  std::vector<double> out;
  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t n = 0; n < orders; ++n) {
    if (matched[n] == 0 || total[n] == 0) zero = true;
    if (!zero) log_sum += std::log(static_cast<double>(matched[n]) / static_cast<double>(total[n]));
    out.push_back(zero ? 0.0 : bp * std::exp(log_sum / static_cast<double>(n + 1)));
  }
  return out;
}

double rouge_l(std::string_view hypothesis, std::span<const std::string> references, double beta) {
  const auto h = metric_tokens(hypothesis);
  double best = 0.0;
  if (h.empty()) return best;
  for (const auto& ref : references) {
    const auto r = metric_tokens(ref);
    if (r.empty()) continue;
    const auto lcs = static_cast<double>(lcs_length(h, r));
    if (lcs == 0) continue;
    const double p = lcs / static_cast<double>(h.size());
    const double rec = lcs / static_cast<double>(r.size());
    const double f = (1 + beta * beta) * p * rec / (rec + beta * beta * p);
    best = std::max(best, f);
  }
  return best;
}

double corpus_rouge_l(std::span<const std::string> hypotheses, std::span<const std::string> references, double beta) {
  check_corpus(hypotheses, references);
  double sum = 0.0;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) sum += rouge_l(hypotheses[i], references.subspan(i, 1), beta);
  return sum / static_cast<double>(hypotheses.size());
}

double cider(std::span<const std::string> hypotheses, std::span<const std::string> references) {
  check_corpus(hypotheses, references);
  if (hypotheses.size() < 2) throw Error("CIDEr needs a corpus of at least two items");
  const auto items = hypotheses.size();
  std::vector<std::vector<std::string>> hyp_tokens;
  std::vector<std::vector<std::string>> ref_tokens;
  for (std::size_t i = 0; i < items; ++i) {
    hyp_tokens.push_back(metric_tokens(hypotheses[i]));
    ref_tokens.push_back(metric_tokens(references[i]));
  }
  std::vector<double> per_item(items, 0.0);
  const double log_items = std::log(static_cast<double>(items));
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<NgramCounts> hc;
    std::vector<NgramCounts> rc;
    std::unordered_map<std::string, int> df;
    for (std::size_t i = 0; i < items; ++i) {
      hc.push_back(ngrams(hyp_tokens[i], n));
      rc.push_back(ngrams(ref_tokens[i], n));
      for (const auto& [g, c] : rc.back()) ++df[g];
    }
    auto idf = [&](const std::string& g) {
      auto it = df.find(g);
      return log_items - std::log(std::max(1.0, it == df.end() ? 0.0 : static_cast<double>(it->second)));
    };
    for (std::size_t i = 0; i < items; ++i) {
      double dot = 0.0;
      double hnorm = 0.0;
      double rnorm = 0.0;
      for (const auto& [g, c] : hc[i]) {
        const double w = c * idf(g);
        hnorm += w * w;
        if (auto it = rc[i].find(g); it != rc[i].end()) dot += w * it->second * idf(g);
      }
      for (const auto& [g, c] : rc[i]) {
        const double w = c * idf(g);
        rnorm += w * w;
      }
      if (hnorm > 0 && rnorm > 0) per_item[i] += dot / (std::sqrt(hnorm) * std::sqrt(rnorm)) / 4.0;
    }
  }
  double sum = 0.0;
  for (double s : per_item) sum += s;
  return 10.0 * sum / static_cast<double>(items);
}

std::vector<BigramCount> first_two_words_dist(std::span<const std::string> questions) {
  std::map<std::pair<std::string, std::optional<std::string>>, std::size_t> counts;
  for (const auto& q : questions) {
    auto words = metric_tokens(q);
    if (words.empty()) continue;
    std::optional<std::string> second;
    if (words.size() > 1) second = words[1];
    ++counts[{words[0], second}];
  }
  std::vector<BigramCount> out;
  for (const auto& [key, c] : counts) out.push_back({key.first, key.second, c});
  std::stable_sort(out.begin(), out.end(), [](const BigramCount& a, const BigramCount& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.label() < b.label();
  });
  return out;
}

}  // namespace qgen
