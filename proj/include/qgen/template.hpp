#pragma once

// Question/answer templates over dependency trees.
//
// Expression syntax, one expression per space-separated token:
//
//   [r]                 surface form of the root
//   [r.lemma]           lemma of the root
//   [r.nsubj#1]         form of the node reached by the nsubj arc (hint 1)
//   [r.nsubj.lemma#1]   its lemma
//   <r.obl#4>           whole subtree below the obl arc, in surface order
//   anything else       literal word, emitted verbatim
//
// Hints record the surface position of the node in the training sentence.
// When applying a template they only break ties between matching nodes.
//
// Template file lines are tab-separated:
//
//   question  answer  [support  sources  [root_upos  literal_tags]]
//
// `sources` is a comma-joined list of sentence ids. `literal_tags` lists the
// morphological signature of every literal (question first, then answer),
// space-separated, `_` when unknown. Trailing columns holding only default
// values are omitted.

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qgen/conllu.hpp"

namespace qgen {

struct Literal {
  std::string text;
  /// Morphological signature of the word when the template was induced.
  std::string tag;

  bool operator==(const Literal&) const = default;
};

enum class Attr { form, lemma };

struct NodeExpr {
  RelPath path;
  Attr attr = Attr::form;
  std::optional<int> hint;

  bool operator==(const NodeExpr&) const = default;
};

struct SubtreeExpr {
  RelPath path;
  std::optional<int> hint;

  bool operator==(const SubtreeExpr&) const = default;
};

using TemplateExpr = std::variant<Literal, NodeExpr, SubtreeExpr>;

struct Template {
  std::vector<TemplateExpr> question;
  std::vector<TemplateExpr> answer;
  /// Paths that must resolve for the template to fire.
  std::set<RelPath> guard;
  std::optional<std::string> root_upos;
  int support = 1;
  std::vector<std::string> sources;

  bool operator==(const Template&) const = default;
};

struct TemplateSet {
  std::vector<Template> templates;

  std::size_t size() const noexcept { return templates.size(); }
  bool empty() const noexcept { return templates.empty(); }
};

/// Paths referenced by any expression of `t`.
std::set<RelPath> collect_paths(const Template& t);

/// Parses one expression sequence (a question or an answer column).
/// `column_base` is added to reported column offsets.
std::vector<TemplateExpr> parse_expressions(std::string_view text, int column_base = 0);
std::string render_expressions(const std::vector<TemplateExpr>& exprs);

/// Parses a template line; the guard is synthesized from the paths used.
/// Throws ParseError with a 1-based column.
Template parse_template_line(std::string_view line);
std::string render_template(const Template& t);

/// Template file reader; `#` lines and blank lines are skipped.
TemplateSet read_templates(std::istream& in);
TemplateSet read_template_file(const std::string& path);
void write_templates(std::ostream& out, const TemplateSet& ts);

/// One emitted word and the tree token it came from (nullptr for literals).
struct Piece {
  std::string text;
  const Token* token = nullptr;
  const Literal* literal = nullptr;
};

/// Expression value as separate words. Throws NoMatch.
std::vector<Piece> expand_expr(const TemplateExpr& e, const DepTree& tree);

/// Expression value as one string, words joined by single spaces. Throws NoMatch.
std::string eval_expr(const TemplateExpr& e, const DepTree& tree);

}  // namespace qgen
