#include "qgen/conllu.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "qgen/text.hpp"

namespace qgen {

namespace {

constexpr int kColumns = 10;

std::optional<int> to_int(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

/// Value of a `# key = value` comment, if the comment has that key.
std::optional<std::string> comment_value(std::string_view line, std::string_view key) {
  auto body = text::trim(line.substr(1));
  if (!body.starts_with(key)) return std::nullopt;
  auto rest = text::trim(body.substr(key.size()));
  if (rest.empty() || rest.front() != '=') return std::nullopt;
  return std::string(text::trim(rest.substr(1)));
}

std::vector<std::pair<std::string, std::string>> parse_feats(std::string_view column, int line_no) {
  std::vector<std::pair<std::string, std::string>> feats;
  if (column == "_") return feats;
  for (const auto& item : text::split(column, '|')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ParseError("malformed FEATS item '" + item + "'", line_no, 6);
    feats.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return feats;
}

struct Block {
  int first_line = 0;
  std::vector<std::string> comments;
  std::vector<Token> tokens;
  std::vector<RawLine> raw_lines;
  std::string sent_id;
  std::string text;
};

}  // namespace

std::string Token::feats_string() const {
  if (feats.empty()) return "_";
  std::string out;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    if (i) out += '|';
    out += feats[i].first;
    out += '=';
    out += feats[i].second;
  }
  return out;
}

std::string RelPath::to_string() const {
  std::string out = "r";
  for (const auto& s : steps) {
    out += '.';
    out += s;
  }
  return out;
}

DepTree::DepTree(std::string sent_id, std::string text, std::vector<Token> tokens,
                 std::vector<std::string> comments, std::vector<RawLine> raw_lines)
    : sent_id_(std::move(sent_id)),
      text_(std::move(text)),
      tokens_(std::move(tokens)),
      comments_(std::move(comments)),
      raw_lines_(std::move(raw_lines)) {
  const int n = static_cast<int>(tokens_.size());
  children_.assign(tokens_.size() + 1, {});
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const auto& t = tokens_[static_cast<std::size_t>(i)];
    if (t.id != i + 1)
      throw InvalidTree("token ids must run 1..n in order; found " + std::to_string(t.id) + " at position " +
                        std::to_string(i + 1));
    if (t.head < 0 || t.head > n) throw InvalidTree("dangling head " + std::to_string(t.head) + " on token " + std::to_string(t.id));
    if (t.head == t.id) throw InvalidTree("token " + std::to_string(t.id) + " heads itself");
    if (t.head == 0) {
      ++roots;
      root_id_ = t.id;
    }
    children_[static_cast<std::size_t>(t.head)].push_back(t.id);
  }
  if (roots == 0) throw InvalidTree("no root");
  if (roots > 1) throw InvalidTree("multiple roots");
  for (const auto& t : tokens_)
    if ((t.head == 0) != (t.deprel == "root"))
      throw InvalidTree("token " + std::to_string(t.id) + ": deprel 'root' must coincide with head 0");
  // Every token must reach the root within n steps.
  for (const auto& t : tokens_) {
    int cur = t.id;
    int steps = 0;
    while (cur != 0) {
      cur = token(cur).head;
      if (++steps > n) throw InvalidTree("cyclic arcs through token " + std::to_string(t.id));
    }
  }
}

bool DepTree::dominates(int ancestor, int node) const {
  for (int cur = node; cur != 0; cur = token(cur).head)
    if (cur == ancestor) return true;
  return false;
}

RelPath DepTree::path_to(int id) const {
  RelPath path;
  for (int cur = id; token(cur).head != 0; cur = token(cur).head) path.steps.push_back(token(cur).deprel);
  std::reverse(path.steps.begin(), path.steps.end());
  return path;
}

bool DepTree::starts_document() const {
  return std::any_of(comments_.begin(), comments_.end(), [](const std::string& c) {
    return text::trim(std::string_view(c).substr(1)).starts_with("newdoc");
  });
}

std::string DepTree::normalized_text() const {
  std::vector<std::string> forms;
  forms.reserve(tokens_.size());
  for (const auto& t : tokens_) forms.push_back(text::lowercase(t.form));
  return text::join(forms, " ");
}

std::vector<DepTree> parse_conllu(std::string_view input) {
  std::vector<DepTree> trees;
  Block block;
  bool open = false;

  auto finish = [&]() {
    if (!open) return;
    if (block.tokens.empty())
      throw ParseError("sentence block without syntactic words", block.first_line);
    if (block.sent_id.empty()) block.sent_id = std::to_string(trees.size() + 1);
    try {
      trees.emplace_back(std::move(block.sent_id), std::move(block.text), std::move(block.tokens),
                         std::move(block.comments), std::move(block.raw_lines));
    } catch (const InvalidTree& e) {
      throw ParseError(e.what(), block.first_line);
    }
    block = Block{};
    open = false;
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos < input.size()) {
    auto eol = input.find('\n', pos);
    std::string_view line = input.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? input.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (text::trim(line).empty()) {
      finish();
      continue;
    }
    if (!open) {
      open = true;
      block.first_line = line_no;
    }
    if (line.front() == '#') {
      if (block.tokens.empty() && block.raw_lines.empty()) {
        if (auto v = comment_value(line, "sent_id")) block.sent_id = *v;
        if (auto v = comment_value(line, "text")) block.text = *v;
      }
      block.comments.emplace_back(line);
      continue;
    }

    auto cols = text::split(line, '\t');
    if (static_cast<int>(cols.size()) != kColumns)
      throw ParseError("expected 10 tab-separated fields, found " + std::to_string(cols.size()), line_no);

    const auto& id_col = cols[0];
    if (id_col.find('-') != std::string::npos || id_col.find('.') != std::string::npos) {
      block.raw_lines.push_back({block.tokens.size(), std::string(line)});
      continue;
    }
    auto id = to_int(id_col);
    if (!id) throw ParseError("non-integer id '" + id_col + "'", line_no, 1);
    auto head = to_int(cols[6]);
    if (!head) throw ParseError("non-integer head '" + cols[6] + "'", line_no, 7);

    Token t;
    t.id = *id;
    t.form = cols[1];
    t.lemma = cols[2];
    t.upos = cols[3];
    t.xpos = cols[4];
    t.feats = parse_feats(cols[5], line_no);
    t.head = *head;
    t.deprel = cols[7];
    t.deps = cols[8];
    t.misc = cols[9];
    if (t.id != static_cast<int>(block.tokens.size()) + 1)
      throw ParseError("token id " + id_col + " out of sequence", line_no, 1);
    block.tokens.push_back(std::move(t));
  }
  finish();
  return trees;
}

std::vector<DepTree> read_conllu_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_conllu(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

void write_conllu(std::ostream& out, const DepTree& tree) {
  if (tree.comments().empty()) {
    if (!tree.sent_id().empty()) out << "# sent_id = " << tree.sent_id() << '\n';
    if (!tree.text().empty()) out << "# text = " << tree.text() << '\n';
  } else {
    for (const auto& c : tree.comments()) out << c << '\n';
  }
  auto raw = tree.raw_lines().begin();
  const auto raw_end = tree.raw_lines().end();
  std::size_t written = 0;
  for (const auto& t : tree.tokens()) {
    for (; raw != raw_end && raw->after == written; ++raw) out << raw->text << '\n';
    out << t.id << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << '\t' << t.xpos << '\t'
        << t.feats_string() << '\t' << t.head << '\t' << t.deprel << '\t' << t.deps << '\t' << t.misc << '\n';
    ++written;
  }
  for (; raw != raw_end; ++raw) out << raw->text << '\n';
  out << '\n';
}

std::string serialize_conllu(std::span<const DepTree> trees) {
  std::ostringstream out;
  for (const auto& t : trees) write_conllu(out, t);
  return out.str();
}

std::vector<std::vector<DepTree>> group_documents(std::span<const DepTree> trees) {
  std::vector<std::vector<DepTree>> docs;
  const bool marked = std::any_of(trees.begin(), trees.end(), [](const DepTree& t) { return t.starts_document(); });
  for (const auto& t : trees) {
    if (docs.empty() || !marked || t.starts_document()) docs.emplace_back();
    docs.back().push_back(t);
  }
  return docs;
}

const Token* find_path(const DepTree& tree, const RelPath& path, std::optional<int> hint) {
  // Depth-first over children in ascending id order, so the first endpoint
  // reached is the leftmost choice at every step.
  const Token* first = nullptr;
  const Token* hinted = nullptr;
  std::function<void(int, std::size_t)> walk = [&](int id, std::size_t depth) {
    if (hinted) return;
    if (depth == path.steps.size()) {
      const auto& t = tree.token(id);
      if (!first) first = &t;
      if (hint && t.id == *hint) hinted = &t;
      return;
    }
    for (int child : tree.children(id)) {
      if (tree.token(child).deprel != path.steps[depth]) continue;
      walk(child, depth + 1);
      if (first && !hint) return;
    }
  };
  walk(tree.root().id, 0);
  return hinted ? hinted : first;
}

const Token& resolve_path(const DepTree& tree, const RelPath& path, std::optional<int> hint) {
  if (const auto* t = find_path(tree, path, hint)) return *t;
  throw NoMatch("no node at " + path.to_string() + " in sentence " + tree.sent_id());
}

std::vector<const Token*> subtree_yield(const DepTree& tree, const Token& node) {
  std::vector<int> ids;
  std::vector<int> stack{node.id};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    ids.push_back(id);
    for (int c : tree.children(id)) stack.push_back(c);
  }
  std::sort(ids.begin(), ids.end());
  std::vector<const Token*> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(&tree.token(id));
  return out;
}

std::string morph_signature(const Token& t) {
  auto feats = t.feats;
  std::sort(feats.begin(), feats.end());
  std::string out = t.upos;
  out += '|';
  if (feats.empty()) return out + "_";
  for (std::size_t i = 0; i < feats.size(); ++i) {
    if (i) out += '|';
    out += feats[i].first + '=' + feats[i].second;
  }
  return out;
}

bool subtree_has_gap(const DepTree& tree, const Token& node) {
  auto y = subtree_yield(tree, node);
  return y.back()->id - y.front()->id + 1 != static_cast<int>(y.size());
}

}  // namespace qgen
