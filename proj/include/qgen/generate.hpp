#pragma once

// Overgeneration: every template is tried on every sentence.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qgen/conllu.hpp"
#include "qgen/template.hpp"

namespace qgen {

struct GenCandidate {
  std::string question;
  std::string answer;
  std::size_t template_id = 0;
  std::string sent_id;
  /// Source sentence as lowercased forms joined by spaces.
  std::string source;
  std::optional<double> score;
  std::map<std::string, double> score_parts;

  bool operator==(const GenCandidate&) const = default;
};

/// Every guard path resolves and the root UPOS (if recorded) agrees.
bool guard_matches(const Template& t, const DepTree& tree);

/// Evaluates and lowercases the template on `tree`. Returns nullopt when an
/// expression does not resolve or the answer comes out empty.
std::optional<GenCandidate> apply_template(const Template& t, std::size_t template_id, const DepTree& tree);

struct OvergenerateCounts {
  std::size_t guard_rejected = 0;
  std::size_t dropped = 0;
};

/// All successful applications, in template order. Duplicates are kept.
std::vector<GenCandidate> overgenerate(const TemplateSet& ts, const DepTree& tree,
                                       OvergenerateCounts* counts = nullptr);

}  // namespace qgen
