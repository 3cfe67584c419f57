#include "qgen/generate.hpp"

#include <algorithm>

#include "qgen/text.hpp"

namespace qgen {

namespace {

std::string evaluate(const std::vector<TemplateExpr>& exprs, const DepTree& tree) {
  std::vector<std::string> words;
  for (const auto& e : exprs)
    for (auto& p : expand_expr(e, tree)) words.push_back(std::move(p.text));
  return text::lowercase(text::join(words, " "));
}

}  // namespace

bool guard_matches(const Template& t, const DepTree& tree) {
  if (t.root_upos && tree.root().upos != *t.root_upos) return false;
  return std::all_of(t.guard.begin(), t.guard.end(),
                     [&](const RelPath& p) { return find_path(tree, p) != nullptr; });
}

std::optional<GenCandidate> apply_template(const Template& t, std::size_t template_id, const DepTree& tree) {
  GenCandidate c;
  try {
    c.question = evaluate(t.question, tree);
    c.answer = evaluate(t.answer, tree);
  } catch (const NoMatch&) {
    return std::nullopt;
  }
  if (c.answer.empty() || c.question.empty()) return std::nullopt;
  c.template_id = template_id;
  c.sent_id = tree.sent_id();
  c.source = tree.normalized_text();
  return c;
}

std::vector<GenCandidate> overgenerate(const TemplateSet& ts, const DepTree& tree, OvergenerateCounts* counts) {
  std::vector<GenCandidate> out;
  OvergenerateCounts local;
  for (std::size_t i = 0; i < ts.templates.size(); ++i) {
    const auto& t = ts.templates[i];
    if (!guard_matches(t, tree)) {
      ++local.guard_rejected;
      continue;
    }
    if (auto c = apply_template(t, i, tree)) {
      out.push_back(std::move(*c));
    } else {
      ++local.dropped;
    }
  }
  if (counts) *counts = local;
  return out;
}

}  // namespace qgen
