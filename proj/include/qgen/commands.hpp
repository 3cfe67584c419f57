#pragma once

// The command-line subcommands as callable functions. Each returns a
// process exit code and reports on `out`/`err`.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qgen/config.hpp"

namespace qgen::cli {

struct InduceArgs {
  std::string train_conllu;
  std::string triples_tsv;
  std::string out_templates;
  /// One parse per triple row, in row order; gives literals their tags.
  std::string question_conllu;
  /// Precomputed IDF table; built from the training data when empty.
  std::string idf;
  Config config;
};
int induce(const InduceArgs& a, std::ostream& out, std::ostream& err);

struct BuildModelsArgs {
  std::vector<std::string> treebank;  ///< CoNLL-U files for the morphological model
  std::string train_conllu;
  std::string triples_tsv;
  std::string out_dir;
  Config config;
};
int build_models(const BuildModelsArgs& a, std::ostream& out, std::ostream& err);

struct GenerateArgs {
  std::string templates;
  std::string input_conllu;
  std::string models_dir;
  std::string out;
  /// Denominator for percentages; the number of input sentences when 0.
  std::size_t set_size = 0;
  unsigned threads = 0;  ///< 0 = hardware concurrency
  Config config;
};
int generate(const GenerateArgs& a, std::ostream& out, std::ostream& err);

struct ExportSurveyArgs {
  std::string gold_tsv;
  std::string generated;
  std::string out;
  std::optional<std::uint64_t> seed;  ///< config seed when unset
  Config config;
};
int export_survey(const ExportSurveyArgs& a, std::ostream& out, std::ostream& err);

struct ServeArgs {
  std::string triples;
  std::string store;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string guidelines;  ///< text file; built-in text when empty
  std::string ui_dir;
  std::optional<std::uint64_t> seed;
  Config config;
};
int serve(const ServeArgs& a, std::ostream& out, std::ostream& err);

struct IaaArgs {
  std::string store;
  std::string out;  ///< stdout when empty
  std::string triples;  ///< evaluation set, for the set/origin split
  int precision = 2;
};
int iaa(const IaaArgs& a, std::ostream& out, std::ostream& err);

struct MetricsArgs {
  std::string input_tsv;  ///< id, hypothesis, reference
  std::string out;
  Config config;
};
int metrics(const MetricsArgs& a, std::ostream& out, std::ostream& err);

struct StatsArgs {
  std::string questions;  ///< one question per line, or a TSV column
  int column = 0;         ///< 1-based TSV column; 0 = whole line
  std::string out_csv;    ///< stdout when empty
};
int stats(const StatsArgs& a, std::ostream& out, std::ostream& err);

}  // namespace qgen::cli
