// qgen: template induction, overgenerate-and-rank question generation and
// the evaluation toolkit.

#include <iostream>

#include "CLI11.hpp"
#include "qgen/commands.hpp"
#include "qgen/error.hpp"

namespace {

void add_config(CLI::App* cmd, std::string& path) {
  cmd->add_option("-c,--config", path, "Configuration file")->check(CLI::ExistingFile);
}

qgen::Config config_from(const std::string& path) { return path.empty() ? qgen::Config{} : qgen::load_config(path); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dependency-template question generation"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;

  qgen::cli::InduceArgs induce;
  auto* c_induce = app.add_subcommand("induce", "Induce templates from training triples");
  c_induce->add_option("--conllu", induce.train_conllu, "Parsed training sentences")->required()->check(CLI::ExistingFile);
  c_induce->add_option("--triples", induce.triples_tsv, "TSV of sent_id, question, answer")->required()->check(CLI::ExistingFile);
  c_induce->add_option("-o,--out", induce.out_templates, "Template file to write")->required();
  c_induce->add_option("--question-conllu", induce.question_conllu, "Parsed questions, one per triple row")
      ->check(CLI::ExistingFile);
  c_induce->add_option("--idf", induce.idf, "IDF table (built from the training data if absent)")->check(CLI::ExistingFile);
  add_config(c_induce, config_path);

  qgen::cli::BuildModelsArgs build;
  auto* c_build = app.add_subcommand("build-models", "Build the IDF, morphological and question-word models");
  c_build->add_option("--treebank", build.treebank, "CoNLL-U treebank file(s)")->required()->check(CLI::ExistingFile);
  c_build->add_option("--conllu", build.train_conllu, "Parsed training sentences")->required()->check(CLI::ExistingFile);
  c_build->add_option("--triples", build.triples_tsv, "TSV of sent_id, question, answer")->required()->check(CLI::ExistingFile);
  c_build->add_option("-o,--out", build.out_dir, "Model directory")->required();
  add_config(c_build, config_path);

  qgen::cli::GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Generate and rank QA-pairs for unseen sentences");
  c_gen->add_option("--templates", gen.templates, "Template file")->required()->check(CLI::ExistingFile);
  c_gen->add_option("--conllu", gen.input_conllu, "Parsed input sentences")->required()->check(CLI::ExistingFile);
  c_gen->add_option("--models", gen.models_dir, "Model directory")->required();
  c_gen->add_option("-o,--out", gen.out, "Output JSONL")->required();
  c_gen->add_option("--set-size", gen.set_size, "Sentences in the set, for percentages");
  c_gen->add_option("-j,--threads", gen.threads, "Worker threads (0 = all cores)");
  add_config(c_gen, config_path);

  qgen::cli::ExportSurveyArgs exp;
  auto* c_exp = app.add_subcommand("export-survey", "Pair generated and gold QA-pairs into an evaluation set");
  c_exp->add_option("--gold", exp.gold_tsv, "TSV of sent_id, question, answer[, set[, sentence]]")
      ->required()
      ->check(CLI::ExistingFile);
  c_exp->add_option("--generated", exp.generated, "Output of generate")->required()->check(CLI::ExistingFile);
  c_exp->add_option("-o,--out", exp.out, "Evaluation triples (JSONL)")->required();
  c_exp->add_option("--seed", seed, "Shuffle seed");
  add_config(c_exp, config_path);

  qgen::cli::ServeArgs srv;
  auto* c_srv = app.add_subcommand("serve", "Serve the survey API");
  c_srv->add_option("--triples", srv.triples, "Evaluation triples")->required()->check(CLI::ExistingFile);
  c_srv->add_option("--store", srv.store, "Judgement store (created if missing)")->required();
  c_srv->add_option("--host", srv.host, "Bind address");
  c_srv->add_option("--port", srv.port, "Port (0 picks a free one)");
  c_srv->add_option("--guidelines", srv.guidelines, "Guideline text file")->check(CLI::ExistingFile);
  c_srv->add_option("--ui", srv.ui_dir, "Static survey UI to serve at /")->check(CLI::ExistingDirectory);
  c_srv->add_option("--seed", seed, "Session order seed");
  add_config(c_srv, config_path);

  qgen::cli::IaaArgs iaa;
  auto* c_iaa = app.add_subcommand("iaa", "Inter-annotator agreement per criterion");
  c_iaa->add_option("--store", iaa.store, "Judgements (store or flat records)")->required()->check(CLI::ExistingFile);
  c_iaa->add_option("--triples", iaa.triples, "Evaluation triples, for the set/origin split")->check(CLI::ExistingFile);
  c_iaa->add_option("-o,--out", iaa.out, "Report TSV (default stdout)");
  c_iaa->add_option("--precision", iaa.precision, "Decimals")->check(CLI::Range(0, 12));

  qgen::cli::MetricsArgs met;
  auto* c_met = app.add_subcommand("metrics", "BLEU, ROUGE-L and CIDEr");
  c_met->add_option("input", met.input_tsv, "TSV of id, hypothesis, reference")->required()->check(CLI::ExistingFile);
  c_met->add_option("-o,--out", met.out, "Report TSV (default stdout)");
  add_config(c_met, config_path);

  qgen::cli::StatsArgs st;
  auto* c_st = app.add_subcommand("stats", "Distribution of the first two words of questions");
  c_st->add_option("input", st.questions, "Questions, one per line")->required()->check(CLI::ExistingFile);
  c_st->add_option("--column", st.column, "Take the question from this 1-based TSV column");
  c_st->add_option("-o,--out", st.out_csv, "CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto config = config_from(config_path);
    auto& out = std::cout;
    auto& err = std::cerr;
    if (c_induce->parsed()) return (induce.config = config, qgen::cli::induce(induce, out, err));
    if (c_build->parsed()) return (build.config = config, qgen::cli::build_models(build, out, err));
    if (c_gen->parsed()) return (gen.config = config, qgen::cli::generate(gen, out, err));
    if (c_exp->parsed()) {
      exp.config = config;
      exp.seed = seed;
      return qgen::cli::export_survey(exp, out, err);
    }
    if (c_srv->parsed()) {
      srv.config = config;
      srv.seed = seed;
      return qgen::cli::serve(srv, out, err);
    }
    if (c_iaa->parsed()) return qgen::cli::iaa(iaa, out, err);
    if (c_met->parsed()) return (met.config = config, qgen::cli::metrics(met, out, err));
    if (c_st->parsed()) return qgen::cli::stats(st, out, err);
  } catch (const qgen::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
