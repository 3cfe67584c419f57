#pragma once

// CoNLL-U ingestion and dependency-tree navigation.
//
// A DepTree holds the syntactic words of one sentence. Multiword-token
// ranges ("3-4") and empty nodes ("5.1") carry no head, so they are kept
// only as raw lines for serialization and never take part in the arcs.

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qgen/error.hpp"

namespace qgen {

struct Token {
  int id = 0;
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos;
  /// FEATS as ordered Name=Value pairs; empty means `_`.
  std::vector<std::pair<std::string, std::string>> feats;
  int head = 0;
  std::string deprel;
  std::string deps;
  std::string misc;

  /// FEATS column text (`_` when empty).
  std::string feats_string() const;

  bool operator==(const Token&) const = default;
};

/// Sequence of dependency labels followed downwards from the root `r`.
struct RelPath {
  std::vector<std::string> steps;

  bool empty() const noexcept { return steps.empty(); }
  /// `r`, `r.nsubj`, `r.obl.case`, ...
  std::string to_string() const;

  auto operator<=>(const RelPath&) const = default;
};

/// A non-token line kept verbatim: it followed `after` syntactic words.
struct RawLine {
  std::size_t after = 0;
  std::string text;

  bool operator==(const RawLine&) const = default;
};

/// Structural violation found while building a tree.
class InvalidTree : public Error {
 public:
  using Error::Error;
};

/// Immutable dependency tree. Token ids run 1..size() in surface order.
class DepTree {
 public:
  /// Validates the arc structure; throws InvalidTree on sequence gaps,
  /// dangling heads, self loops, cycles, or anything but a single root.
  DepTree(std::string sent_id, std::string text, std::vector<Token> tokens,
          std::vector<std::string> comments = {}, std::vector<RawLine> raw_lines = {});

  const std::string& sent_id() const noexcept { return sent_id_; }
  const std::string& text() const noexcept { return text_; }
  std::span<const Token> tokens() const noexcept { return tokens_; }
  std::size_t size() const noexcept { return tokens_.size(); }

  const Token& token(int id) const { return tokens_.at(static_cast<std::size_t>(id - 1)); }
  const Token& root() const { return token(root_id_); }
  /// Dependent ids of `id` in ascending order; id 0 yields the root.
  std::span<const int> children(int id) const { return children_.at(static_cast<std::size_t>(id)); }

  bool dominates(int ancestor, int node) const;
  /// Labels on the arcs from the root down to `id`.
  RelPath path_to(int id) const;

  const std::vector<std::string>& comments() const noexcept { return comments_; }
  const std::vector<RawLine>& raw_lines() const noexcept { return raw_lines_; }
  /// True when the tree was preceded by a `# newdoc` comment.
  bool starts_document() const;

  /// Lowercased forms joined by single spaces.
  std::string normalized_text() const;

  bool operator==(const DepTree& other) const {
    return sent_id_ == other.sent_id_ && text_ == other.text_ && tokens_ == other.tokens_ &&
           comments_ == other.comments_ && raw_lines_ == other.raw_lines_;
  }

 private:
  std::string sent_id_;
  std::string text_;
  std::vector<Token> tokens_;
  std::vector<std::string> comments_;
  std::vector<RawLine> raw_lines_;
  std::vector<std::vector<int>> children_;  // index 0 is the virtual root
  int root_id_ = 0;
};

/// Parses every sentence block. Throws ParseError naming the offending line.
std::vector<DepTree> parse_conllu(std::string_view text);
std::vector<DepTree> read_conllu_file(const std::string& path);

void write_conllu(std::ostream& out, const DepTree& tree);
std::string serialize_conllu(std::span<const DepTree> trees);

/// Splits a corpus at `# newdoc` boundaries. Without any such comment every
/// sentence is its own document.
std::vector<std::vector<DepTree>> group_documents(std::span<const DepTree> trees);

/// Follows `path` from the root. Among all tokens reachable by the path the
/// one whose id equals `hint` wins; otherwise the leftmost choice at every
/// step. Returns nullptr when nothing is reachable.
const Token* find_path(const DepTree& tree, const RelPath& path, std::optional<int> hint = std::nullopt);

/// As find_path, but throws NoMatch.
const Token& resolve_path(const DepTree& tree, const RelPath& path, std::optional<int> hint = std::nullopt);

/// UPOS plus the FEATS pairs sorted by name, e.g. `NOUN|Case=Nom|Number=Sing`.
std::string morph_signature(const Token& t);

/// Tokens dominated by `node` (itself included), in surface order. For
/// non-projective trees the result may be discontinuous.
std::vector<const Token*> subtree_yield(const DepTree& tree, const Token& node);

/// True when the yield of `node` skips over a token it does not dominate.
bool subtree_has_gap(const DepTree& tree, const Token& node);

}  // namespace qgen
