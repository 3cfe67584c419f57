#pragma once

// Fixtures, random generators and brute-force oracles shared by the unit
// tests and the acceptance runner. The oracles deliberately avoid the
// library's own helpers.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qgen/conllu.hpp"
#include "qgen/induce.hpp"
#include "qgen/template.hpp"

namespace fixtures {

inline constexpr const char* kGraduate =
    "# sent_id = s1\n"
    "# text = John graduated in 2010\n"
    "1\tJohn\tJohn\tPROPN\t_\t_\t2\tnsubj\t_\t_\n"
    "2\tgraduated\tgraduate\tVERB\t_\tMood=Ind|Tense=Past|VerbForm=Fin\t0\troot\t_\t_\n"
    "3\tin\tin\tADP\t_\t_\t4\tcase\t_\t_\n"
    "4\t2010\t2010\tNUM\t_\tNumType=Card\t2\tobl\t_\t_\n"
    "\n";

inline constexpr const char* kStocks =
    "# sent_id = s3\n"
    "# text = Stocks crashed during previous summer months\n"
    "1\tStocks\tstock\tNOUN\t_\tNumber=Plur\t2\tnsubj\t_\t_\n"
    "2\tcrashed\tcrash\tVERB\t_\tMood=Ind|Tense=Past|VerbForm=Fin\t0\troot\t_\t_\n"
    "3\tduring\tduring\tADP\t_\t_\t6\tcase\t_\t_\n"
    "4\tprevious\tprevious\tADJ\t_\tDegree=Pos\t6\tamod\t_\t_\n"
    "5\tsummer\tsummer\tNOUN\t_\tNumber=Sing\t6\tcompound\t_\t_\n"
    "6\tmonths\tmonth\tNOUN\t_\tNumber=Plur\t2\tobl\t_\t_\n"
    "\n";

// The stocks sentence with the obl arc replaced, so the root has no obl child.
inline constexpr const char* kStocksNoObl =
    "# sent_id = s3b\n"
    "1\tStocks\tstock\tNOUN\t_\tNumber=Plur\t2\tnsubj\t_\t_\n"
    "2\tcrashed\tcrash\tVERB\t_\tMood=Ind|Tense=Past|VerbForm=Fin\t0\troot\t_\t_\n"
    "3\tduring\tduring\tADP\t_\t_\t6\tcase\t_\t_\n"
    "4\tprevious\tprevious\tADJ\t_\tDegree=Pos\t6\tamod\t_\t_\n"
    "5\tsummer\tsummer\tNOUN\t_\tNumber=Sing\t6\tcompound\t_\t_\n"
    "6\tmonths\tmonth\tNOUN\t_\tNumber=Plur\t2\tobj\t_\t_\n"
    "\n";

// A sentence whose adverbial clause is long, so a subtree expression over
// advcl copies the whole clause into the question.
inline constexpr const char* kAdvcl =
    "# sent_id = sv1\n"
    "# text = Anna arbetar hemma eftersom hon är sjuk\n"
    "1\tAnna\tAnna\tPROPN\t_\t_\t2\tnsubj\t_\t_\n"
    "2\tarbetar\tarbeta\tVERB\t_\tMood=Ind|Tense=Pres|VerbForm=Fin|Voice=Act\t0\troot\t_\t_\n"
    "3\themma\themma\tADV\t_\t_\t2\tadvmod\t_\t_\n"
    "4\teftersom\teftersom\tSCONJ\t_\t_\t7\tmark\t_\t_\n"
    "5\thon\thon\tPRON\t_\tCase=Nom|Definite=Def|Gender=Com|Number=Sing|PronType=Prs\t7\tnsubj\t_\t_\n"
    "6\tär\tvara\tAUX\t_\tMood=Ind|Tense=Pres|VerbForm=Fin|Voice=Act\t7\tcop\t_\t_\n"
    "7\tsjuk\tsjuk\tADJ\t_\tCase=Nom|Definite=Ind|Degree=Pos|Gender=Com|Number=Sing\t2\tadvcl\t_\t_\n"
    "\n";

inline qgen::DepTree tree(const char* conllu) { return qgen::parse_conllu(conllu).at(0); }

}  // namespace fixtures

namespace gen {

inline const std::vector<std::string> kDeprels = {"nsubj", "obj", "obl", "advmod", "amod", "case",
                                                  "det",   "nmod", "conj", "mark", "advcl", "compound"};
inline const std::vector<std::string> kUpos = {"NOUN", "VERB", "ADJ", "ADV", "ADP", "PRON", "DET", "PROPN", "NUM"};
// (form, lemma)
inline const std::vector<std::pair<std::string, std::string>> kWords = {
    {"dogs", "dog"},   {"ran", "run"},     {"the", "the"},       {"Anna", "Anna"},   {"quickly", "quickly"},
    {"into", "into"},  {"houses", "house"}, {"green", "green"},  {"sang", "sing"},   {"river", "river"},
    {"old", "old"},    {"books", "book"},  {"Stockholm", "Stockholm"}, {"after", "after"}, {"wrote", "write"},
    {"small", "small"}, {"cats", "cat"},   {"1998", "1998"},     {"with", "with"}, {"slowly", "slowly"}};
inline const std::vector<std::string> kFunctionWords = {"when", "what", "did", "who", "where", "does", "how"};

/// Random tree of n tokens built by random attachment (may be non-projective).
inline qgen::DepTree random_tree(std::mt19937_64& rng, int n, const std::string& sent_id = "r") {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> head(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t k = 1; k < order.size(); ++k) {
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    head[static_cast<std::size_t>(order[k])] = order[pick(rng)];
  }
  std::vector<qgen::Token> tokens;
  for (int i = 1; i <= n; ++i) {
    qgen::Token t;
    t.id = i;
    const auto& w = kWords[std::uniform_int_distribution<std::size_t>(0, kWords.size() - 1)(rng)];
    t.form = w.first;
    t.lemma = w.second;
    t.upos = kUpos[std::uniform_int_distribution<std::size_t>(0, kUpos.size() - 1)(rng)];
    t.xpos = "_";
    if (rng() % 2) t.feats.emplace_back("Number", rng() % 2 ? "Sing" : "Plur");
    t.head = head[static_cast<std::size_t>(i)];
    t.deprel = t.head == 0 ? "root" : kDeprels[std::uniform_int_distribution<std::size_t>(0, kDeprels.size() - 1)(rng)];
    t.deps = "_";
    t.misc = "_";
    tokens.push_back(std::move(t));
  }
  std::string text;
  for (const auto& t : tokens) text += (text.empty() ? "" : " ") + t.form;
  return qgen::DepTree(sent_id, text, std::move(tokens));
}

/// A triple over a random tree: the answer is a contiguous token span, the
/// question mixes tree words (forms or lemmas) with function words.
inline qgen::TrainingTriple random_triple(std::mt19937_64& rng, const std::string& sent_id = "r") {
  auto tree = random_tree(rng, std::uniform_int_distribution<int>(3, 10)(rng), sent_id);
  const int n = static_cast<int>(tree.size());
  const int len = std::uniform_int_distribution<int>(1, std::min(3, n))(rng);
  const int first = std::uniform_int_distribution<int>(1, n - len + 1)(rng);
  std::string answer;
  for (int i = first; i < first + len; ++i) answer += (answer.empty() ? "" : " ") + tree.token(i).form;

  std::string question = kFunctionWords[std::uniform_int_distribution<std::size_t>(0, kFunctionWords.size() - 1)(rng)];
  const int words = std::uniform_int_distribution<int>(1, 5)(rng);
  for (int w = 0; w < words; ++w) {
    const auto r = rng() % 4;
    if (r == 0) {
      question += " " + kFunctionWords[std::uniform_int_distribution<std::size_t>(0, kFunctionWords.size() - 1)(rng)];
    } else {
      const auto& t = tree.token(std::uniform_int_distribution<int>(1, n)(rng));
      question += " " + (r == 1 ? t.lemma : t.form);
    }
  }
  question += " ?";
  return {std::move(tree), question, answer, std::nullopt};
}

/// IDF table where every function word is in every document.
inline qgen::IdfModel function_word_idf(int docs = 10) {
  std::map<std::string, int> df;
  for (const auto& w : kFunctionWords) df[w] = docs;
  return qgen::IdfModel(df, docs);
}

inline qgen::RelPath random_path(std::mt19937_64& rng, int min_depth, int max_depth) {
  qgen::RelPath p;
  const int depth = std::uniform_int_distribution<int>(min_depth, max_depth)(rng);
  for (int i = 0; i < depth; ++i)
    p.steps.push_back(kDeprels[std::uniform_int_distribution<std::size_t>(0, kDeprels.size() - 1)(rng)]);
  return p;
}

inline qgen::TemplateExpr random_expr(std::mt19937_64& rng) {
  static const std::vector<std::string> literals = {"when", "did", "?", "vad", "gör", "hur", "x-y", "2010", "it's",
                                                    "#", "r", "r.nsubj", "_", "là", "naïve"};
  static const std::vector<std::string> tags = {"", "PRON|PronType=Int", "AUX|Mood=Ind|Tense=Past", "PUNCT|_"};
  std::optional<int> hint;
  if (rng() % 2) hint = std::uniform_int_distribution<int>(1, 40)(rng);
  switch (rng() % 3) {
    case 0:
      return qgen::Literal{literals[rng() % literals.size()], tags[rng() % tags.size()]};
    case 1:
      return qgen::NodeExpr{random_path(rng, 0, 3), rng() % 2 ? qgen::Attr::form : qgen::Attr::lemma, hint};
    default:
      return qgen::SubtreeExpr{random_path(rng, 0, 3), hint};
  }
}

inline qgen::Template random_template(std::mt19937_64& rng) {
  qgen::Template t;
  const int q = std::uniform_int_distribution<int>(1, 7)(rng);
  const int a = std::uniform_int_distribution<int>(1, 4)(rng);
  for (int i = 0; i < q; ++i) t.question.push_back(random_expr(rng));
  for (int i = 0; i < a; ++i) t.answer.push_back(random_expr(rng));
  t.guard = qgen::collect_paths(t);
  if (rng() % 2) t.root_upos = kUpos[rng() % kUpos.size()];
  const int sources = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int i = 0; i < sources; ++i) t.sources.push_back("s" + std::to_string(rng() % 1000));
  t.support = std::max(1, sources);
  return t;
}

}  // namespace gen

namespace oracle {

/// Randolph's kappa by counting agreeing ordered rater pairs item by item.
inline double kappa(const std::vector<std::vector<int>>& items, int k) {
  double sum = 0;
  for (const auto& row : items) {
    double agree = 0;
    double pairs = 0;
    for (std::size_t a = 0; a < row.size(); ++a)
      for (std::size_t b = 0; b < row.size(); ++b) {
        if (a == b) continue;
        pairs += 1;
        if (row[a] == row[b]) agree += 1;
      }
    sum += agree / pairs;
  }
  const double po = sum / static_cast<double>(items.size());
  return (po - 1.0 / k) / (1.0 - 1.0 / k);
}

struct GammaResult {
  bool available = true;
  double value = 0;
  int constant = 0;
};

/// Gamma pooled over rater pairs by checking every item pair for every
/// rater pair.
inline GammaResult gamma(const std::vector<std::vector<int>>& items) {
  const std::size_t n = items.size();
  const std::size_t r = items.at(0).size();
  long long c = 0;
  long long d = 0;
  for (std::size_t p = 0; p < r; ++p)
    for (std::size_t q = p + 1; q < r; ++q)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          const int s = (items[i][p] - items[j][p]) * (items[i][q] - items[j][q]);
          if (s > 0) ++c;
          if (s < 0) ++d;
        }
  if (c + d > 0) return {true, static_cast<double>(c - d) / static_cast<double>(c + d), 0};
  for (std::size_t p = 0; p < r; ++p) {
    bool constant = true;
    for (std::size_t i = 1; i < n; ++i) constant = constant && items[i][p] == items[0][p];
    if (constant) return {false, 0, items[0][p]};
  }
  return {false, 0, 0};
}

/// Lowercase ASCII, drop trailing . ? ! , ; : and split on spaces.
inline std::vector<std::string> words(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  while (!s.empty() && std::string(".?!,;: ").find(s.back()) != std::string::npos) s.pop_back();
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::vector<std::vector<std::string>> grams(const std::vector<std::string>& w, std::size_t n) {
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i + n <= w.size(); ++i) out.emplace_back(w.begin() + static_cast<long>(i), w.begin() + static_cast<long>(i + n));
  return out;
}

inline long occurrences(const std::vector<std::vector<std::string>>& list, const std::vector<std::string>& g) {
  return std::count(list.begin(), list.end(), g);
}

/// Corpus BLEU by explicit n-gram enumeration.
inline std::vector<double> bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs, int max_n) {
  std::vector<double> match(static_cast<std::size_t>(max_n), 0);
  std::vector<double> total(static_cast<std::size_t>(max_n), 0);
  double c = 0;
  double r = 0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const auto h = words(hyps[i]);
    const auto ref = words(refs[i]);
    c += static_cast<double>(h.size());
    r += static_cast<double>(ref.size());
    for (int n = 1; n <= max_n; ++n) {
      const auto hg = grams(h, static_cast<std::size_t>(n));
      const auto rg = grams(ref, static_cast<std::size_t>(n));
      total[static_cast<std::size_t>(n - 1)] += static_cast<double>(hg.size());
      std::set<std::vector<std::string>> distinct(hg.begin(), hg.end());
      for (const auto& g : distinct)
        match[static_cast<std::size_t>(n - 1)] += static_cast<double>(std::min(occurrences(hg, g), occurrences(rg, g)));
    }
  }
  std::vector<double> out;
  for (int n = 1; n <= max_n; ++n) {
    double logp = 0;
    bool zero = c == 0;
    for (int k = 0; k < n; ++k) {
      if (match[static_cast<std::size_t>(k)] == 0) zero = true;
      else logp += std::log(match[static_cast<std::size_t>(k)] / total[static_cast<std::size_t>(k)]);
    }
    const double bp = c < r ? std::exp(1 - r / c) : 1.0;
    out.push_back(zero ? 0.0 : bp * std::exp(logp / n));
  }
  return out;
}

/// Plain recursive LCS with memoization.
inline std::size_t lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size() || j == b.size()) return 0;
    auto it = memo.find({i, j});
    if (it != memo.end()) return it->second;
    std::size_t v = a[i] == b[j] ? 1 + self(self, i + 1, j + 1) : std::max(self(self, i + 1, j), self(self, i, j + 1));
    memo[{i, j}] = v;
    return v;
  };
  return rec(rec, 0, 0);
}

inline double rouge_l(const std::string& hyp, const std::string& ref, double beta) {
  const auto h = words(hyp);
  const auto r = words(ref);
  if (h.empty() || r.empty()) return 0;
  const double l = static_cast<double>(lcs(h, r));
  if (l == 0) return 0;
  const double p = l / static_cast<double>(h.size());
  const double rec = l / static_cast<double>(r.size());
  return (1 + beta * beta) * p * rec / (rec + beta * beta * p);
}

/// CIDEr from term-frequency-normalized tf-idf vectors.
inline double cider(const std::vector<std::string>& hyps, const std::vector<std::string>& refs) {
  const auto m = hyps.size();
  double total = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double item = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
      auto vec = [&](const std::string& s) {
        const auto g = grams(words(s), n);
        std::map<std::vector<std::string>, double> v;
        for (const auto& x : g) {
          double df = 0;
          for (const auto& ref : refs) {
            const auto rg = grams(words(ref), n);
            if (std::find(rg.begin(), rg.end(), x) != rg.end()) df += 1;
          }
          const double idf = std::log(static_cast<double>(m) / std::max(1.0, df));
          v[x] = static_cast<double>(occurrences(g, x)) / static_cast<double>(g.size()) * idf;
        }
        return v;
      };
      const auto vh = vec(hyps[i]);
      const auto vr = vec(refs[i]);
      double dot = 0;
      double nh = 0;
      double nr = 0;
      for (const auto& [g, w] : vh) {
        nh += w * w;
        if (auto it = vr.find(g); it != vr.end()) dot += w * it->second;
      }
      for (const auto& [g, w] : vr) nr += w * w;
      if (nh > 0 && nr > 0) item += dot / std::sqrt(nh * nr);
    }
    total += item / 4;
  }
  return 10 * total / static_cast<double>(m);
}

}  // namespace oracle
