#pragma once

// Pipeline configuration, read from an INI-style `key = value` file:
//
//   ngram_order = 3
//   alpha = 1.0
//   weights = 1.0, 1.0            # morph, question word
//   theta_content = 1.0
//   filters = min_length, nontrivial_answer, answer_in_question, dedup
//   min_question_tokens = 3
//   rouge_beta = 1.2
//   seed = 0
//
// `filters = none` disables every basic filter rule.

#include <cstdint>
#include <iosfwd>
#include <string>

#include "qgen/rank.hpp"

namespace qgen {

struct Config {
  int ngram_order = 3;
  double alpha = 1.0;
  RankWeights weights;
  double theta_content = 1.0;
  BasicFilterOptions filters;
  double rouge_beta = 1.2;
  std::uint64_t seed = 0;
};

/// Throws Error on unknown keys or malformed values.
Config parse_config(std::istream& in);
Config load_config(const std::string& path);

}  // namespace qgen
