#include <random>

#include "doctest.h"
#include "qgen/nlg_metrics.hpp"
#include "support.hpp"

using namespace qgen;

namespace {

std::vector<std::string> v(std::initializer_list<const char*> xs) { return {xs.begin(), xs.end()}; }

std::string random_sentence(std::mt19937_64& rng) {
  static const std::vector<std::string> vocab = {"vad", "gör", "när", "hon", "han", "det", "är", "en", "ett", "Var"};
  const int len = std::uniform_int_distribution<int>(1, 8)(rng);
  std::string s;
  for (int i = 0; i < len; ++i) s += (i ? " " : "") + vocab[rng() % vocab.size()];
  if (rng() % 2) s += " ?";
  return s;
}

}  // namespace

TEST_CASE("metric tokenization") {
  CHECK(metric_tokens("When did John graduate?") == v({"when", "did", "john", "graduate"}));
  CHECK(metric_tokens("när dog han ?") == v({"när", "dog", "han"}));
  CHECK(metric_tokens("  ").empty());
}

TEST_CASE("bleu_n") {
  const auto same = v({"when did it happen ?", "who wrote the book"});
  for (double b : bleu_n(same, same)) CHECK(b == doctest::Approx(1.0));
  const auto h = v({"a b c"});
  const auto r = v({"a b d"});
  CHECK(bleu_n(h, r, 1)[0] == doctest::Approx(2.0 / 3.0));
  CHECK(bleu_n(h, r, 2)[1] == doctest::Approx(std::sqrt(2.0 / 3.0 * 1.0 / 2.0)));
  CHECK(bleu_n(h, r, 3)[2] == 0.0);
  // Brevity penalty: hypothesis shorter than reference.
  CHECK(bleu_n(v({"a b"}), v({"a b c d"}), 1)[0] == doctest::Approx(std::exp(1.0 - 2.0)));
  CHECK_THROWS_AS(bleu_n(v({}), v({})), Error);
  CHECK_THROWS_AS(bleu_n(h, v({"a", "b"})), Error);
  CHECK_THROWS_AS(bleu_n(h, r, 5), Error);
}

TEST_CASE("rouge_l") {
  CHECK(rouge_l("a b c", v({"a b c"})) == doctest::Approx(1.0));
  const double p = 2.0 / 3.0;
  const double rec = 1.0;
  const double b2 = 1.2 * 1.2;
  CHECK(rouge_l("a b c", v({"a c"})) == doctest::Approx((1 + b2) * p * rec / (rec + b2 * p)));
  CHECK(rouge_l("x y", v({"a c"})) == 0.0);
  CHECK(rouge_l("a b c", v({"x", "a b c"})) == doctest::Approx(1.0));
}

TEST_CASE("cider") {
  const auto refs = v({"the cat sat", "a dog ran far"});
  CHECK(cider(v({"x y z", "q w e r"}), refs) == 0.0);
  CHECK(cider(refs, refs) > 0.0);
  CHECK(cider(refs, refs) <= 10.0 + 1e-12);
  CHECK_THROWS_AS(cider(v({"a"}), v({"a"})), Error);
  const auto hyps = v({"the cat sat down", "a dog ran"});
  CHECK(cider(hyps, refs) == doctest::Approx(oracle::cider(hyps, refs)).epsilon(1e-12));
}

TEST_CASE("first_two_words_dist") {
  const auto d = first_two_words_dist(v({"vad gör x", "vad gör y", "var arbetar z"}));
  REQUIRE(d.size() == 2);
  CHECK(d[0] == BigramCount{"vad", "gör", 2});
  CHECK(d[1] == BigramCount{"var", "arbetar", 1});
  CHECK(first_two_words_dist(v({})).empty());
  const auto one = first_two_words_dist(v({"Varför?"}));
  REQUIRE(one.size() == 1);
  CHECK(one[0].label() == "varför");
  CHECK(one[0].count == 1);
}

TEST_CASE("property: metrics against independent oracles") {
  std::mt19937_64 rng(8);
  for (int f = 0; f < 40; ++f) {
    const auto n = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
    std::vector<std::string> hyps;
    std::vector<std::string> refs;
    for (std::size_t i = 0; i < n; ++i) {
      hyps.push_back(random_sentence(rng));
      // Every fixture has at least one 4-gram, so BLEU-4 is defined.
      if (i == 0) hyps.back() += " en ett det är";
      refs.push_back(rng() % 3 ? random_sentence(rng) : hyps.back());
    }
    const auto got = bleu_n(hyps, refs);
    const auto want = oracle::bleu(hyps, refs, 4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-9));
    double rl = 0;
    for (std::size_t i = 0; i < n; ++i) rl += oracle::rouge_l(hyps[i], refs[i], 1.2);
    CHECK(corpus_rouge_l(hyps, refs) == doctest::Approx(rl / static_cast<double>(n)).epsilon(1e-9));
    const double c = cider(hyps, refs);
    CHECK(c == doctest::Approx(oracle::cider(hyps, refs)).epsilon(1e-9));
    CHECK(c >= 0.0);
    CHECK(c <= 10.0 + 1e-9);
    for (double b : got) {
      CHECK(b >= 0.0);
      CHECK(b <= 1.0 + 1e-12);
    }
    for (double b : bleu_n(refs, refs)) CHECK(b == doctest::Approx(1.0));
    CHECK(corpus_rouge_l(refs, refs) == doctest::Approx(1.0));
  }
}
