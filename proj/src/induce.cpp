#include "qgen/induce.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "qgen/text.hpp"

namespace qgen {

namespace {

constexpr std::string_view kIdfHeader = "#qgen-idf v1";

std::optional<int> hint_for(const Token& t) {
  if (t.head == 0) return std::nullopt;
  return t.id;
}

NodeExpr node_expr(const DepTree& tree, const Token& t, Attr attr) {
  return NodeExpr{tree.path_to(t.id), attr, hint_for(t)};
}

SubtreeExpr subtree_expr(const DepTree& tree, const Token& t) { return SubtreeExpr{tree.path_to(t.id), hint_for(t)}; }

struct FoldedTree {
  std::vector<std::string> forms;   // index = id - 1
  std::vector<std::string> lemmas;  // empty when the lemma is absent
  std::vector<std::vector<std::string>> yields;  // folded forms of each subtree
};

FoldedTree fold(const DepTree& tree) {
  FoldedTree f;
  for (const auto& t : tree.tokens()) {
    f.forms.push_back(text::lowercase(t.form));
    f.lemmas.push_back(t.lemma == "_" || t.lemma.empty() ? std::string() : text::lowercase(t.lemma));
  }
  for (const auto& t : tree.tokens()) {
    std::vector<std::string> y;
    for (const auto* u : subtree_yield(tree, t)) y.push_back(f.forms[static_cast<std::size_t>(u->id - 1)]);
    f.yields.push_back(std::move(y));
  }
  return f;
}

/// Token matching a folded word by form, else by lemma (leftmost in each case).
const Token* match_word(const DepTree& tree, const FoldedTree& f, const std::string& word, Attr& attr) {
  for (std::size_t i = 0; i < f.forms.size(); ++i)
    if (f.forms[i] == word) {
      attr = Attr::form;
      return &tree.tokens()[i];
    }
  for (std::size_t i = 0; i < f.lemmas.size(); ++i)
    if (!f.lemmas[i].empty() && f.lemmas[i] == word) {
      attr = Attr::lemma;
      return &tree.tokens()[i];
    }
  return nullptr;
}

/// Question-tree token aligned with each question word, when the parse
/// tokenizes the question the same way.
std::vector<const Token*> align_question_tree(const std::optional<DepTree>& qtree,
                                              const std::vector<std::string>& folded_words) {
  std::vector<const Token*> out(folded_words.size(), nullptr);
  if (!qtree || qtree->size() != folded_words.size()) return out;
  for (std::size_t i = 0; i < folded_words.size(); ++i)
    if (text::lowercase(qtree->tokens()[i].form) != folded_words[i]) return std::vector<const Token*>(folded_words.size());
  for (std::size_t i = 0; i < folded_words.size(); ++i) out[i] = &qtree->tokens()[i];
  return out;
}

std::string answer_key(std::string_view s) {
  std::string out;
  for (char c : text::lowercase(s))
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') out += c;
  return out;
}

std::optional<AnswerSpan> find_span(const DepTree& tree, const std::string& target) {
  if (target.empty()) return std::nullopt;
  std::vector<std::string> forms;
  for (const auto& t : tree.tokens()) forms.push_back(text::lowercase(t.form));
  const int n = static_cast<int>(forms.size());
  for (int i = 0; i < n; ++i) {
    std::string concat;
    for (int j = i; j < n; ++j) {
      concat += forms[static_cast<std::size_t>(j)];
      if (concat.size() > target.size() || target.compare(0, concat.size(), concat) != 0) break;
      if (concat.size() == target.size()) return AnswerSpan{i + 1, j + 1, nullptr};
    }
  }
  return std::nullopt;
}

}  // namespace

IdfModel::IdfModel(std::map<std::string, int> document_frequency, int doc_count)
    : df_(std::move(document_frequency)), doc_count_(doc_count) {
  if (doc_count_ < 1) throw Error("IDF model needs at least one document");
  for (const auto& [term, df] : df_)
    if (df < 1 || df > doc_count_) throw Error("document frequency of '" + term + "' out of range");
}

double IdfModel::idf(std::string_view lemma) const {
  const double n = static_cast<double>(doc_count_);
  auto it = df_.find(text::lowercase(lemma));
  if (it == df_.end()) return std::log(n / 0.5);
  return std::log(n / static_cast<double>(it->second));
}

void IdfModel::save(std::ostream& out) const {
  out << kIdfHeader << '\n' << "docs\t" << doc_count_ << '\n';
  for (const auto& [term, df] : df_) out << "df\t" << term << '\t' << df << '\n';
}

IdfModel IdfModel::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kIdfHeader) throw ParseError("not an IDF model file", 1);
  std::map<std::string, int> df;
  int docs = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cols = text::split(line, '\t');
    try {
      if (cols.size() == 2 && cols[0] == "docs") {
        docs = std::stoi(cols[1]);
      } else if (cols.size() == 3 && cols[0] == "df") {
        df[cols[1]] = std::stoi(cols[2]);
      } else {
        throw ParseError("unexpected record", line_no);
      }
    } catch (const std::logic_error&) {
      throw ParseError("malformed count", line_no);
    }
  }
  return IdfModel(std::move(df), docs);
}

IdfModel build_idf(std::span<const std::vector<std::string>> documents) {
  if (documents.empty()) throw Error("cannot build IDF from an empty corpus");
  std::map<std::string, int> df;
  for (const auto& doc : documents) {
    std::set<std::string> seen;
    for (const auto& term : doc) seen.insert(text::lowercase(term));
    for (const auto& term : seen) ++df[term];
  }
  return IdfModel(std::move(df), static_cast<int>(documents.size()));
}

IdfModel build_idf(std::span<const std::vector<DepTree>> documents) {
  std::vector<std::vector<std::string>> terms;
  terms.reserve(documents.size());
  for (const auto& doc : documents) {
    auto& bag = terms.emplace_back();
    for (const auto& tree : doc)
      for (const auto& t : tree.tokens()) bag.push_back(t.lemma == "_" ? t.form : t.lemma);
  }
  return build_idf(terms);
}

AnswerSpan locate_answer(const DepTree& tree, std::string_view answer) {
  auto span = find_span(tree, answer_key(answer));
  if (!span) {
    // Retry without trailing punctuation the tree may have split off or dropped.
    auto words = text::tokenize(answer);
    while (!words.empty() && text::is_punctuation(words.back())) words.pop_back();
    auto stripped = answer_key(text::join(words, ""));
    if (stripped != answer_key(answer)) span = find_span(tree, stripped);
  }
  if (!span) throw AlignmentFailure("answer '" + std::string(answer) + "' not found in sentence " + tree.sent_id());

  const int width = span->last - span->first + 1;
  for (int id = span->first; id <= span->last; ++id) {
    const auto& t = tree.token(id);
    auto y = subtree_yield(tree, t);
    if (static_cast<int>(y.size()) == width && y.front()->id == span->first && y.back()->id == span->last) {
      span->covering = &t;
      break;
    }
  }
  return *span;
}

std::string normalize_question(std::string_view question) {
  auto words = text::tokenize(question);
  for (auto& w : words) w = text::lowercase(w);
  return text::join(words, " ");
}

std::string normalize_answer(std::string_view answer) { return normalize_question(answer); }

Template induce_pair(const TrainingTriple& triple, const IdfModel& idf, const InductionOptions& options) {
  const auto& tree = triple.tree;
  const auto words = text::tokenize(triple.question);
  if (words.empty()) throw InductionFailure("empty question");
  std::vector<std::string> folded;
  for (const auto& w : words) folded.push_back(text::lowercase(w));
  const auto ftree = fold(tree);
  const auto qtokens = align_question_tree(triple.question_tree, folded);

  Template t;
  const std::size_t m = folded.size();
  std::size_t i = 0;
  while (i < m) {
    // Longest run of question words equal to a complete multi-word subtree.
    const Token* span_node = nullptr;
    std::size_t span_len = 0;
    for (std::size_t len = m - i; len >= 2 && !span_node; --len) {
      for (std::size_t k = 0; k < ftree.yields.size(); ++k) {
        const auto& y = ftree.yields[k];
        if (y.size() == len && std::equal(y.begin(), y.end(), folded.begin() + static_cast<std::ptrdiff_t>(i))) {
          span_node = &tree.tokens()[k];
          span_len = len;
          break;
        }
      }
    }
    if (span_node) {
      t.question.emplace_back(subtree_expr(tree, *span_node));
      i += span_len;
      continue;
    }

    Attr attr = Attr::form;
    if (const auto* tok = match_word(tree, ftree, folded[i], attr)) {
      t.question.emplace_back(node_expr(tree, *tok, attr));
      ++i;
      continue;
    }

    const auto& word = words[i];
    if (word.find_first_of("[]<>") != std::string::npos)
      throw InductionFailure("question word '" + word + "' cannot be a literal");
    if (!text::is_punctuation(word)) {
      const std::string lemma = qtokens[i] && qtokens[i]->lemma != "_" ? qtokens[i]->lemma : folded[i];
      if (idf.idf(lemma) > options.theta_content)
        throw InductionFailure("content word '" + word + "' does not occur in sentence " + tree.sent_id());
    }
    t.question.emplace_back(Literal{word, qtokens[i] ? morph_signature(*qtokens[i]) : std::string()});
    ++i;
  }

  try {
    const auto span = locate_answer(tree, triple.answer);
    if (span.covering) {
      t.answer.emplace_back(subtree_expr(tree, *span.covering));
    } else {
      for (int id = span.first; id <= span.last; ++id) t.answer.emplace_back(node_expr(tree, tree.token(id), Attr::form));
    }
  } catch (const AlignmentFailure&) {
    // Not a contiguous run: fall back to matching the answer word by word.
    for (const auto& w : text::tokenize(triple.answer)) {
      Attr attr = Attr::form;
      const auto* tok = match_word(tree, ftree, text::lowercase(w), attr);
      if (!tok) throw;
      t.answer.emplace_back(node_expr(tree, *tok, attr));
    }
    if (t.answer.empty()) throw;
  }

  t.guard = collect_paths(t);
  if (!tree.root().upos.empty() && tree.root().upos != "_") t.root_upos = tree.root().upos;
  t.support = 1;
  t.sources = {tree.sent_id()};
  return t;
}

namespace {

std::optional<int>* hint_of(TemplateExpr& e) {
  if (auto* n = std::get_if<NodeExpr>(&e)) return &n->hint;
  if (auto* s = std::get_if<SubtreeExpr>(&e)) return &s->hint;
  return nullptr;
}

// Templates differing only in hints or literal tags are the same template.
std::string merge_key(const Template& t) {
  auto strip = [](std::vector<TemplateExpr> exprs) {
    for (auto& e : exprs) {
      if (auto* h = hint_of(e)) h->reset();
      if (auto* l = std::get_if<Literal>(&e)) l->tag.clear();
    }
    return render_expressions(exprs);
  };
  return strip(t.question) + '\t' + strip(t.answer);
}

// Keeps the smallest hint and the smallest known tag, so the merged
// template does not depend on input order.
void merge_details(std::vector<TemplateExpr>& into, std::vector<TemplateExpr> from) {
  for (std::size_t k = 0; k < into.size(); ++k) {
    if (auto* h = hint_of(into[k])) {
      const auto other = *hint_of(from[k]);
      if (other && (!*h || *other < **h)) *h = other;
    }
    auto* a = std::get_if<Literal>(&into[k]);
    const auto* b = std::get_if<Literal>(&from[k]);
    if (a && b && !b->tag.empty() && (a->tag.empty() || b->tag < a->tag)) a->tag = b->tag;
  }
}

}  // namespace

TemplateSet induce_all(std::span<const TrainingTriple> triples, const IdfModel& idf, const InductionOptions& options,
                       InductionReport* report) {
  InductionReport r;
  TemplateSet ts;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& triple : triples) {
    ++r.triples;
    Template t;
    try {
      t = induce_pair(triple, idf, options);
    } catch (const AlignmentFailure&) {
      ++r.alignment_failures;
      continue;
    } catch (const InductionFailure&) {
      ++r.induction_failures;
      continue;
    }
    ++r.succeeded;
    auto key = merge_key(t);
    auto [it, inserted] = index.emplace(std::move(key), ts.templates.size());
    if (inserted) {
      ts.templates.push_back(std::move(t));
      continue;
    }
    auto& merged = ts.templates[it->second];
    merged.sources.insert(merged.sources.end(), t.sources.begin(), t.sources.end());
    if (merged.root_upos != t.root_upos) merged.root_upos.reset();
    merge_details(merged.question, t.question);
    merge_details(merged.answer, t.answer);
  }
  for (auto& t : ts.templates) {
    std::sort(t.sources.begin(), t.sources.end());
    t.sources.erase(std::unique(t.sources.begin(), t.sources.end()), t.sources.end());
    t.support = static_cast<int>(t.sources.size());
  }
  if (report) *report = r;
  return ts;
}

Summary template_stats(const TemplateSet& ts) {
  std::vector<double> supports;
  supports.reserve(ts.size());
  for (const auto& t : ts.templates) supports.push_back(t.support);
  return describe(supports);
}

}  // namespace qgen
