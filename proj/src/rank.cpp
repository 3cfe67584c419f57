#include "qgen/rank.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

#include "qgen/text.hpp"

namespace qgen {

namespace {

constexpr std::string_view kMorphHeader = "#qgen-morph v1";
constexpr std::string_view kQwordHeader = "#qgen-qword v1";

std::string join_tab(std::span<const std::string> symbols) {
  std::string out;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i) out += '\t';
    out += symbols[i];
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(const std::string& s, int line_no) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("malformed number '" + s + "'", line_no);
  return v;
}

long parse_count(const std::string& s, int line_no) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 1) throw ParseError("malformed count '" + s + "'", line_no);
  return v;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error("smoothing constant must be positive");
}

void expect_header(std::istream& in, std::string_view header) {
  std::string line;
  if (!std::getline(in, line) || line != header) throw ParseError("expected header '" + std::string(header) + "'", 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// MorphNgramModel

MorphNgramModel::MorphNgramModel(int order, double alpha) : order_(order), alpha_(alpha) {
  if (order_ < 2) throw Error("n-gram order must be at least 2");
  check_alpha(alpha_);
}

void MorphNgramModel::add_sequence(std::span<const std::string> signatures) {
  std::vector<std::string> symbols(static_cast<std::size_t>(order_ - 1), std::string(kBegin));
  symbols.insert(symbols.end(), signatures.begin(), signatures.end());
  symbols.emplace_back(kEnd);
  const auto n = static_cast<std::size_t>(order_);
  for (std::size_t i = n - 1; i < symbols.size(); ++i) {
    std::span<const std::string> gram(symbols.data() + i + 1 - n, n);
    ++ngrams_[join_tab(gram)];
    ++histories_[join_tab(gram.first(n - 1))];
    ++vocab_[symbols[i]];
  }
}

void MorphNgramModel::add_sentence(const DepTree& tree) {
  std::vector<std::string> sigs;
  for (const auto& t : tree.tokens()) {
    sigs.push_back(morph_signature(t));
    ++lexicon_[text::lowercase(t.form)][sigs.back()];
  }
  add_sequence(sigs);
}

double MorphNgramModel::prob(std::span<const std::string> history, std::string_view symbol) const {
  const auto width = static_cast<std::size_t>(order_ - 1);
  std::vector<std::string> h;
  for (std::size_t pad = history.size(); pad < width; ++pad) h.emplace_back(kBegin);
  const auto keep = std::min(width, history.size());
  h.insert(h.end(), history.end() - static_cast<std::ptrdiff_t>(keep), history.end());
  const auto hkey = join_tab(h);

  long joint = 0;
  if (symbol != kUnknown && vocab_.contains(std::string(symbol))) {
    auto it = ngrams_.find(hkey + '\t' + std::string(symbol));
    if (it != ngrams_.end()) joint = it->second;
  }
  auto hit = histories_.find(hkey);
  const long context = hit == histories_.end() ? 0 : hit->second;
  const double outcomes = static_cast<double>(vocab_.size() + 1);
  return (static_cast<double>(joint) + alpha_) / (static_cast<double>(context) + alpha_ * outcomes);
}

double MorphNgramModel::log_prob(std::span<const std::string> signatures, bool with_end) const {
  std::vector<std::string> history;
  double total = 0.0;
  for (const auto& s : signatures) {
    total += std::log(prob(history, s));
    history.push_back(s);
  }
  if (with_end) total += std::log(prob(history, kEnd));
  return total;
}

long MorphNgramModel::ngram_count(std::span<const std::string> ngram) const {
  auto it = ngrams_.find(join_tab(ngram));
  return it == ngrams_.end() ? 0 : it->second;
}

std::optional<std::string> MorphNgramModel::signature_of(std::string_view form) const {
  auto it = lexicon_.find(text::lowercase(form));
  if (it == lexicon_.end()) return std::nullopt;
  const std::string* best = nullptr;
  long best_count = 0;
  for (const auto& [sig, count] : it->second)
    if (count > best_count) {
      best = &sig;
      best_count = count;
    }
  return *best;
}

void MorphNgramModel::save(std::ostream& out) const {
  out << kMorphHeader << '\n' << "order\t" << order_ << '\n' << "alpha\t" << format_double(alpha_) << '\n';
  for (const auto& [gram, count] : ngrams_) out << "ngram\t" << count << '\t' << gram << '\n';
  for (const auto& [form, sigs] : lexicon_)
    for (const auto& [sig, count] : sigs) out << "lex\t" << count << '\t' << form << '\t' << sig << '\n';
}

MorphNgramModel MorphNgramModel::load(std::istream& in) {
  expect_header(in, kMorphHeader);
  std::string line;
  int line_no = 1;
  int order = 0;
  double alpha = 0;
  std::vector<std::vector<std::string>> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cols = text::split(line, '\t');
    if (cols[0] == "order" && cols.size() == 2) {
      order = static_cast<int>(parse_count(cols[1], line_no));
    } else if (cols[0] == "alpha" && cols.size() == 2) {
      alpha = parse_double(cols[1], line_no);
    } else if ((cols[0] == "ngram" || cols[0] == "lex") && cols.size() >= 4) {
      parse_count(cols[1], line_no);
      cols.push_back(std::to_string(line_no));
      records.push_back(std::move(cols));
    } else {
      throw ParseError("unexpected record", line_no);
    }
  }
  MorphNgramModel m(order, alpha);
  const auto n = static_cast<std::size_t>(order);
  for (const auto& r : records) {
    const long count = std::stol(r[1]);
    const int rec_line = std::stoi(r.back());
    if (r[0] == "lex") {
      if (r.size() != 5) throw ParseError("lexicon record needs form and signature", rec_line);
      m.lexicon_[r[2]][r[3]] += count;
      continue;
    }
    if (r.size() != n + 3) throw ParseError("n-gram record of the wrong order", rec_line);
    std::span<const std::string> gram(r.data() + 2, n);
    m.ngrams_[join_tab(gram)] += count;
    m.histories_[join_tab(gram.first(n - 1))] += count;
    m.vocab_[gram.back()] += static_cast<std::size_t>(count);
  }
  return m;
}

MorphNgramModel build_morph_model(std::span<const DepTree> treebank, int order, double alpha) {
  if (treebank.empty()) throw Error("cannot build a morphological model from an empty treebank");
  MorphNgramModel m(order, alpha);
  for (const auto& tree : treebank) m.add_sentence(tree);
  return m;
}

// ---------------------------------------------------------------------------
// QuestionWordModel

QuestionWordModel::QuestionWordModel(double alpha) : alpha_(alpha) { check_alpha(alpha_); }

void QuestionWordModel::add(const std::string& condition, const std::string& word) {
  ++counts_[condition][word];
  ++totals_[condition];
  ++words_[word];
}

double QuestionWordModel::prob(std::string_view condition, std::string_view word) const {
  const double outcomes = static_cast<double>(this->outcomes());
  auto it = counts_.find(std::string(condition));
  if (it == counts_.end()) return 1.0 / outcomes;
  long joint = 0;
  if (auto w = it->second.find(std::string(word)); w != it->second.end()) joint = w->second;
  const long total = totals_.at(it->first);
  return (static_cast<double>(joint) + alpha_) / (static_cast<double>(total) + alpha_ * outcomes);
}

void QuestionWordModel::save(std::ostream& out) const {
  out << kQwordHeader << '\n' << "alpha\t" << format_double(alpha_) << '\n';
  for (const auto& [cond, words] : counts_)
    for (const auto& [word, count] : words) out << "count\t" << count << '\t' << cond << '\t' << word << '\n';
}

QuestionWordModel QuestionWordModel::load(std::istream& in) {
  expect_header(in, kQwordHeader);
  std::string line;
  int line_no = 1;
  std::optional<QuestionWordModel> m;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cols = text::split(line, '\t');
    if (cols[0] == "alpha" && cols.size() == 2 && !m) {
      m.emplace(parse_double(cols[1], line_no));
    } else if (cols[0] == "count" && cols.size() == 4 && m) {
      const long count = parse_count(cols[1], line_no);
      m->counts_[cols[2]][cols[3]] += count;
      m->totals_[cols[2]] += count;
      m->words_[cols[3]] += count;
    } else {
      throw ParseError("unexpected record", line_no);
    }
  }
  if (!m) throw ParseError("missing alpha record", line_no);
  return *m;
}

std::string answer_condition(const DepTree& tree, std::string_view answer) {
  const auto span = locate_answer(tree, answer);
  return span.covering ? span.covering->deprel : tree.token(span.first).deprel;
}

std::string answer_condition(const Template& t, const DepTree& tree) {
  if (t.answer.size() == 1)
    if (const auto* sub = std::get_if<SubtreeExpr>(&t.answer.front()))
      return resolve_path(tree, sub->path, sub->hint).deprel;
  const Token* leftmost = nullptr;
  for (const auto& e : t.answer)
    for (const auto& p : expand_expr(e, tree))
      if (p.token && (!leftmost || p.token->id < leftmost->id)) leftmost = p.token;
  return leftmost ? leftmost->deprel : "_";
}

QuestionWordModel build_qword_model(std::span<const TrainingTriple> triples, double alpha) {
  QuestionWordModel m(alpha);
  for (const auto& triple : triples) {
    auto words = text::tokenize(triple.question);
    if (words.empty()) continue;
    std::string condition;
    try {
      condition = answer_condition(triple.tree, triple.answer);
    } catch (const AlignmentFailure&) {
      continue;
    }
    m.add(condition, text::lowercase(words.front()));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Models on disk

void RankModels::validate() const {
  if (weights.morph < 0 || weights.qword < 0) throw Error("ranking weights must be non-negative");
  if (weights.morph == 0 && weights.qword == 0) throw Error("ranking weights must not both be zero");
}

RankModels load_models(const std::string& dir, RankWeights weights) {
  namespace fs = std::filesystem;
  auto open = [&](std::string_view name) {
    const auto path = fs::path(dir) / name;
    std::ifstream in(path);
    if (!in) throw Error("missing model file " + path.string());
    return in;
  };
  auto idf_in = open(kIdfFile);
  auto morph_in = open(kMorphFile);
  auto qword_in = open(kQwordFile);
  RankModels m{IdfModel::load(idf_in), MorphNgramModel::load(morph_in), QuestionWordModel::load(qword_in), weights};
  m.validate();
  return m;
}

void save_models(const std::string& dir, const RankModels& models) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](std::string_view name) {
    const auto path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
  };
  auto idf_out = open(kIdfFile);
  models.idf.save(idf_out);
  auto morph_out = open(kMorphFile);
  models.morph.save(morph_out);
  auto qword_out = open(kQwordFile);
  models.qword.save(qword_out);
}

// ---------------------------------------------------------------------------
// Scoring and filtering

double score_candidate(GenCandidate& c, const DepTree& tree, const Template& t, const RankModels& m) {
  std::vector<std::string> signatures;
  std::string first_word;
  for (const auto& e : t.question) {
    for (const auto& p : expand_expr(e, tree)) {
      if (first_word.empty() && signatures.empty()) first_word = text::lowercase(p.text);
      if (p.token) {
        signatures.push_back(morph_signature(*p.token));
      } else if (p.literal && !p.literal->tag.empty()) {
        signatures.push_back(p.literal->tag);
      } else {
        signatures.push_back(m.morph.signature_of(p.text).value_or(std::string(MorphNgramModel::kUnknown)));
      }
    }
  }
  if (signatures.empty()) throw Error("cannot score an empty question");

  const double morph = m.morph.log_prob(signatures) / static_cast<double>(signatures.size());
  const double qword = std::log(m.qword.prob(answer_condition(t, tree), first_word));
  const double score = m.weights.morph * morph + m.weights.qword * qword;
  c.score_parts["morph"] = morph;
  c.score_parts["qword"] = qword;
  c.score = score;
  return score;
}

std::vector<GenCandidate> basic_filter(std::span<const GenCandidate> cs, const BasicFilterOptions& options) {
  std::vector<const GenCandidate*> kept;
  for (const auto& c : cs) {
    if (options.min_length && text::split_whitespace(c.question).size() < options.min_question_tokens) continue;
    if (options.nontrivial_answer && (c.answer.empty() || c.answer == c.source)) continue;
    if (options.answer_in_question && !c.answer.empty() &&
        (' ' + c.question + ' ').find(' ' + c.answer + ' ') != std::string::npos)
      continue;
    kept.push_back(&c);
  }
  if (options.dedup) {
    auto score_of = [](const GenCandidate* c) { return c->score.value_or(-std::numeric_limits<double>::infinity()); };
    std::map<std::pair<std::string, std::string>, const GenCandidate*> best;
    for (const auto* c : kept) {
      auto [it, inserted] = best.try_emplace({c->question, c->answer}, c);
      if (!inserted && score_of(c) > score_of(it->second)) it->second = c;
    }
    std::erase_if(kept, [&](const GenCandidate* c) { return best.at({c->question, c->answer}) != c; });
  }
  std::vector<GenCandidate> out;
  out.reserve(kept.size());
  for (const auto* c : kept) out.push_back(*c);
  return out;
}

std::vector<GenCandidate> mean_filter(std::span<const GenCandidate> cs) {
  if (cs.empty()) return {};
  long double sum = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& c : cs) {
    if (!c.score) throw Error("mean_filter needs scored candidates");
    sum += *c.score;
    lo = std::min(lo, *c.score);
    hi = std::max(hi, *c.score);
  }
  // Rounding must not push the mean above the best score.
  const double mean = std::clamp(static_cast<double>(sum / static_cast<long double>(cs.size())), lo, hi);
  std::vector<GenCandidate> out;
  for (const auto& c : cs)
    if (*c.score >= mean) out.push_back(c);
  return out;
}

SentenceOutcome run_pipeline(const TemplateSet& ts, const DepTree& tree, const RankModels& models,
                             const BasicFilterOptions& filters) {
  SentenceOutcome out;
  auto candidates = overgenerate(ts, tree);
  out.counts.applicable = candidates.size();
  for (auto& c : candidates) score_candidate(c, tree, ts.templates[c.template_id], models);
  auto basic = basic_filter(candidates, filters);
  out.counts.after_basic = basic.size();
  out.ranked = mean_filter(basic);
  out.counts.after_mean = out.ranked.size();
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const GenCandidate& a, const GenCandidate& b) { return *a.score > *b.score; });
  return out;
}

GenerationStats generation_stats(const std::map<std::string, StageCounts>& per_sentence, std::size_t set_size) {
  GenerationStats s;
  s.sentences = per_sentence.size();
  s.set_size = set_size ? set_size : per_sentence.size();
  std::vector<double> per_ss;
  for (const auto& [id, c] : per_sentence) {
    s.totals.applicable += c.applicable;
    s.totals.after_basic += c.after_basic;
    s.totals.after_mean += c.after_mean;
    s.with_any.applicable += c.applicable > 0;
    s.with_any.after_basic += c.after_basic > 0;
    s.with_any.after_mean += c.after_mean > 0;
    if (c.applicable > 0) per_ss.push_back(static_cast<double>(c.after_basic));
  }
  if (s.set_size) s.pct_after_mean = 100.0 * static_cast<double>(s.with_any.after_mean) / static_cast<double>(s.set_size);
  s.per_sentence = describe(per_ss);
  return s;
}

}  // namespace qgen
