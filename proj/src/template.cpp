#include "qgen/template.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "qgen/text.hpp"

namespace qgen {

namespace {

constexpr std::string_view kBrackets = "[]<>";

bool has_bracket(std::string_view s) { return s.find_first_of(kBrackets) != std::string_view::npos; }

template <class F>
void for_each_literal(const Template& t, F&& f) {
  for (const auto* seq : {&t.question, &t.answer})
    for (const auto& e : *seq)
      if (const auto* lit = std::get_if<Literal>(&e)) f(*lit);
}

template <class F>
void for_each_literal(Template& t, F&& f) {
  for (auto* seq : {&t.question, &t.answer})
    for (auto& e : *seq)
      if (auto* lit = std::get_if<Literal>(&e)) f(*lit);
}

TemplateExpr parse_bracketed(std::string_view tok, int col) {
  const bool subtree = tok.front() == '<';
  const char close = subtree ? '>' : ']';
  if (tok.size() < 2 || tok.back() != close) throw ParseError("unbalanced brackets in '" + std::string(tok) + "'", 0, col);
  auto inner = tok.substr(1, tok.size() - 2);
  if (has_bracket(inner)) throw ParseError("unbalanced brackets in '" + std::string(tok) + "'", 0, col);

  std::optional<int> hint;
  if (auto hash = inner.rfind('#'); hash != std::string_view::npos) {
    auto digits = inner.substr(hash + 1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    const bool all_digits = std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (digits.empty() || !all_digits || ec != std::errc() || ptr != digits.data() + digits.size() || value < 1)
      throw ParseError("non-numeric hint '" + std::string(digits) + "'", 0, col + 1 + static_cast<int>(hash) + 1);
    hint = value;
    inner = inner.substr(0, hash);
  }

  auto parts = text::split(inner, '.');
  if (parts.front() != "r") throw ParseError("path must start at the root 'r'", 0, col + 1);
  RelPath path;
  int offset = col + 2;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i].empty() || parts[i].find('#') != std::string::npos)
      throw ParseError("empty path step", 0, offset);
    offset += static_cast<int>(parts[i].size()) + 1;
    path.steps.push_back(parts[i]);
  }

  Attr attr = Attr::form;
  if (!path.steps.empty() && path.steps.back() == "lemma") {
    if (subtree) throw ParseError("subtree expressions take no attribute", 0, col);
    attr = Attr::lemma;
    path.steps.pop_back();
  }
  if (subtree) return SubtreeExpr{std::move(path), hint};
  return NodeExpr{std::move(path), attr, hint};
}

std::string render_expr(const TemplateExpr& e) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Literal>) {
          return x.text;
        } else {
          std::string out;
          out += std::is_same_v<T, SubtreeExpr> ? '<' : '[';
          out += x.path.to_string();
          if constexpr (std::is_same_v<T, NodeExpr>) {
            if (x.attr == Attr::lemma) out += ".lemma";
          }
          if (x.hint) out += "#" + std::to_string(*x.hint);
          out += std::is_same_v<T, SubtreeExpr> ? '>' : ']';
          return out;
        }
      },
      e);
}

const std::string& lemma_or_form(const Token& t) { return t.lemma == "_" || t.lemma.empty() ? t.form : t.lemma; }

}  // namespace

std::set<RelPath> collect_paths(const Template& t) {
  std::set<RelPath> paths;
  for (const auto* seq : {&t.question, &t.answer})
    for (const auto& e : *seq) {
      if (const auto* n = std::get_if<NodeExpr>(&e)) paths.insert(n->path);
      if (const auto* s = std::get_if<SubtreeExpr>(&e)) paths.insert(s->path);
    }
  return paths;
}

std::vector<TemplateExpr> parse_expressions(std::string_view line, int column_base) {
  if (line.empty()) throw ParseError("empty expression sequence", 0, column_base + 1);
  std::vector<TemplateExpr> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    auto end = line.find(' ', start);
    if (end == std::string_view::npos) end = line.size();
    auto tok = line.substr(start, end - start);
    const int col = column_base + static_cast<int>(start) + 1;
    if (tok.empty()) throw ParseError("empty token (expressions are separated by single spaces)", 0, col);
    if (tok.front() == '[' || tok.front() == '<') {
      out.push_back(parse_bracketed(tok, col));
    } else {
      if (auto bad = tok.find_first_of(kBrackets); bad != std::string_view::npos)
        throw ParseError("unbalanced brackets in '" + std::string(tok) + "'", 0, col + static_cast<int>(bad));
      out.push_back(Literal{std::string(tok), {}});
    }
    start = end + 1;
  }
  return out;
}

std::string render_expressions(const std::vector<TemplateExpr>& exprs) {
  std::string out;
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    if (i) out += ' ';
    out += render_expr(exprs[i]);
  }
  return out;
}

Template parse_template_line(std::string_view line) {
  auto cols = text::split(line, '\t');
  if (cols.size() != 2 && cols.size() != 4 && cols.size() != 6)
    throw ParseError("expected 2, 4 or 6 tab-separated columns, found " + std::to_string(cols.size()), 0, 1);

  Template t;
  int base = 0;
  t.question = parse_expressions(cols[0], base);
  base += static_cast<int>(cols[0].size()) + 1;
  t.answer = parse_expressions(cols[1], base);
  base += static_cast<int>(cols[1].size()) + 1;

  if (cols.size() >= 4) {
    int support = 0;
    auto [ptr, ec] = std::from_chars(cols[2].data(), cols[2].data() + cols[2].size(), support);
    if (ec != std::errc() || ptr != cols[2].data() + cols[2].size() || support < 1)
      throw ParseError("support must be a positive integer", 0, base + 1);
    t.support = support;
    base += static_cast<int>(cols[2].size()) + 1;
    if (!cols[3].empty()) {
      for (auto& id : text::split(cols[3], ',')) {
        if (id.empty()) throw ParseError("empty source id", 0, base + 1);
        t.sources.push_back(std::move(id));
      }
    }
    base += static_cast<int>(cols[3].size()) + 1;
  }
  if (cols.size() == 6) {
    if (cols[4] != "_") t.root_upos = cols[4];
    base += static_cast<int>(cols[4].size()) + 1;
    auto tags = text::split_whitespace(cols[5]);
    std::size_t literals = 0;
    for_each_literal(std::as_const(t), [&](const Literal&) { ++literals; });
    if (tags.size() != literals)
      throw ParseError("expected " + std::to_string(literals) + " literal tags, found " + std::to_string(tags.size()), 0,
                       base + 1);
    std::size_t i = 0;
    for_each_literal(t, [&](Literal& lit) {
      lit.tag = tags[i] == "_" ? std::string() : tags[i];
      ++i;
    });
  }
  t.guard = collect_paths(t);
  return t;
}

std::string render_template(const Template& t) {
  std::string out = render_expressions(t.question) + '\t' + render_expressions(t.answer);
  bool tagged = false;
  for_each_literal(t, [&](const Literal& lit) { tagged = tagged || !lit.tag.empty(); });
  const bool meta = t.root_upos.has_value() || tagged;
  if (meta || t.support != 1 || !t.sources.empty()) {
    out += '\t' + std::to_string(t.support) + '\t' + text::join(t.sources, ",");
  }
  if (meta) {
    out += '\t' + t.root_upos.value_or("_") + '\t';
    std::vector<std::string> tags;
    for_each_literal(t, [&](const Literal& lit) { tags.push_back(lit.tag.empty() ? "_" : lit.tag); });
    out += text::join(tags, " ");
  }
  return out;
}

TemplateSet read_templates(std::istream& in) {
  TemplateSet ts;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    try {
      ts.templates.push_back(parse_template_line(line));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return ts;
}

TemplateSet read_template_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_templates(in);
}

void write_templates(std::ostream& out, const TemplateSet& ts) {
  for (const auto& t : ts.templates) out << render_template(t) << '\n';
}

std::vector<Piece> expand_expr(const TemplateExpr& e, const DepTree& tree) {
  if (const auto* lit = std::get_if<Literal>(&e)) return {Piece{lit->text, nullptr, lit}};
  if (const auto* node = std::get_if<NodeExpr>(&e)) {
    const auto& tok = resolve_path(tree, node->path, node->hint);
    return {Piece{node->attr == Attr::lemma ? lemma_or_form(tok) : tok.form, &tok, nullptr}};
  }
  const auto& sub = std::get<SubtreeExpr>(e);
  const auto& head = resolve_path(tree, sub.path, sub.hint);
  std::vector<Piece> out;
  for (const auto* tok : subtree_yield(tree, head)) out.push_back(Piece{tok->form, tok, nullptr});
  return out;
}

std::string eval_expr(const TemplateExpr& e, const DepTree& tree) {
  std::string out;
  for (const auto& p : expand_expr(e, tree)) {
    if (!out.empty()) out += ' ';
    out += p.text;
  }
  return out;
}

}  // namespace qgen
