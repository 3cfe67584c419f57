#include "qgen/commands.hpp"

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "qgen/conllu.hpp"
#include "qgen/error.hpp"
#include "qgen/generate.hpp"
#include "qgen/induce.hpp"
#include "qgen/nlg_metrics.hpp"
#include "qgen/rank.hpp"
#include "qgen/survey.hpp"
#include "qgen/survey_server.hpp"
#include "qgen/text.hpp"

namespace qgen::cli {

using nlohmann::json;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  return out;
}

std::string fixed(double v, int precision = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::vector<GoldItem> read_triples(const std::string& path) {
  auto in = open_in(path);
  try {
    return read_gold_tsv(in);
  } catch (const ParseError& e) {
    throw Error(path + ": " + e.what());
  }
}

/// Attaches each triple to its sentence tree; rows whose sentence is
/// missing are reported and dropped.
std::vector<TrainingTriple> join_triples(const std::vector<DepTree>& trees, const std::vector<GoldItem>& rows,
                                         const std::vector<DepTree>* questions, std::ostream& err,
                                         std::size_t* missing) {
  std::map<std::string, const DepTree*> by_id;
  for (const auto& t : trees) by_id.try_emplace(t.sent_id(), &t);
  std::vector<TrainingTriple> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto it = by_id.find(rows[i].sent_id);
    if (it == by_id.end()) {
      err << "warning: no tree for sentence " << rows[i].sent_id << "\n";
      if (missing) ++*missing;
      continue;
    }
    TrainingTriple t{*it->second, rows[i].question, rows[i].answer, std::nullopt};
    if (questions) t.question_tree = (*questions)[i];
    out.push_back(std::move(t));
  }
  return out;
}

/// One IDF document per treebank document: the lemmas of its sentences and
/// the words of the questions asked about them.
IdfModel training_idf(const std::vector<DepTree>& trees, const std::vector<GoldItem>& rows) {
  const auto docs = group_documents(trees);
  std::map<std::string, std::size_t> doc_of;
  std::vector<std::vector<std::string>> terms(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& tree : docs[d]) {
      doc_of.try_emplace(tree.sent_id(), d);
      for (const auto& t : tree.tokens()) terms[d].push_back(t.lemma == "_" ? t.form : t.lemma);
    }
  }
  for (const auto& row : rows) {
    auto it = doc_of.find(row.sent_id);
    if (it == doc_of.end()) continue;
    for (auto& w : text::tokenize(row.question)) terms[it->second].push_back(std::move(w));
  }
  return build_idf(terms);
}

void print_summary(std::ostream& out, const std::string& prefix, const Summary& s) {
  out << prefix << "_mean\t" << fixed(s.mean) << "\n"
      << prefix << "_std\t" << fixed(s.stddev) << "\n"
      << prefix << "_median\t" << fixed(s.median, 1) << "\n"
      << prefix << "_min\t" << fixed(s.min, 0) << "\n"
      << prefix << "_max\t" << fixed(s.max, 0) << "\n";
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

int induce(const InduceArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto trees = read_conllu_file(a.train_conllu);
    const auto rows = read_triples(a.triples_tsv);
    if (rows.empty()) throw Error("no training triples in " + a.triples_tsv);

    std::vector<DepTree> questions;
    if (!a.question_conllu.empty()) {
      questions = read_conllu_file(a.question_conllu);
      if (questions.size() != rows.size())
        throw Error("question parses (" + std::to_string(questions.size()) + ") do not match triples (" +
                    std::to_string(rows.size()) + ")");
    }

    IdfModel idf;
    if (!a.idf.empty()) {
      auto in = open_in(a.idf);
      idf = IdfModel::load(in);
    } else {
      idf = training_idf(trees, rows);
    }

    std::size_t missing = 0;
    const auto triples = join_triples(trees, rows, questions.empty() ? nullptr : &questions, err, &missing);
    InductionReport report;
    const auto ts = induce_all(triples, idf, InductionOptions{a.config.theta_content}, &report);

    out << "triples\t" << rows.size() << "\n"
        << "missing_sentence\t" << missing << "\n"
        << "induced\t" << report.succeeded << "\n"
        << "alignment_failures\t" << report.alignment_failures << "\n"
        << "induction_failures\t" << report.induction_failures << "\n"
        << "templates\t" << ts.templates.size() << "\n";
    if (report.succeeded == 0) throw Error("no template could be induced");
    print_summary(out, "support", template_stats(ts));

    auto f = open_out(a.out_templates);
    write_templates(f, ts);
    return 0;
  });
}

int build_models(const BuildModelsArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (a.treebank.empty()) throw Error("no treebank given");
    std::vector<DepTree> treebank;
    for (const auto& path : a.treebank) {
      auto part = read_conllu_file(path);
      std::move(part.begin(), part.end(), std::back_inserter(treebank));
    }
    const auto trees = read_conllu_file(a.train_conllu);
    const auto rows = read_triples(a.triples_tsv);
    if (rows.empty()) throw Error("no training triples in " + a.triples_tsv);
    const auto triples = join_triples(trees, rows, nullptr, err, nullptr);

    RankModels m{training_idf(trees, rows), build_morph_model(treebank, a.config.ngram_order, a.config.alpha),
                 build_qword_model(triples, a.config.alpha), a.config.weights};
    std::filesystem::create_directories(a.out_dir);
    save_models(a.out_dir, m);

    out << "idf_documents\t" << m.idf.doc_count() << "\n"
        << "idf_terms\t" << m.idf.document_frequency().size() << "\n"
        << "morph_sentences\t" << treebank.size() << "\n"
        << "morph_vocabulary\t" << m.morph.vocabulary_size() << "\n"
        << "morph_ngrams\t" << m.morph.distinct_ngrams() << "\n"
        << "qword_outcomes\t" << m.qword.outcomes() << "\n";
    return 0;
  });
}

int generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto ts = read_template_file(a.templates);
    const auto trees = read_conllu_file(a.input_conllu);
    const auto models = load_models(a.models_dir, a.config.weights);

    std::vector<SentenceOutcome> results(trees.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mu;
    std::string first_error;
    auto worker = [&] {
      for (std::size_t i = next++; i < trees.size(); i = next++) {
        try {
          results[i] = run_pipeline(ts, trees[i], models, a.config.filters);
        } catch (const std::exception& e) {
          std::lock_guard lock(error_mu);
          if (first_error.empty()) first_error = trees[i].sent_id() + ": " + e.what();
        }
      }
    };
    unsigned n = a.threads ? a.threads : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, trees.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (!first_error.empty()) throw Error(first_error);

    auto f = open_out(a.out);
    std::map<std::string, StageCounts> per_sentence;
    for (std::size_t i = 0; i < trees.size(); ++i) {
      const auto& tree = trees[i];
      auto key = tree.sent_id();
      if (per_sentence.contains(key)) key += "#" + std::to_string(i);
      per_sentence[key] = results[i].counts;
      const std::string sentence = tree.text().empty() ? tree.normalized_text() : tree.text();
      for (std::size_t r = 0; r < results[i].ranked.size(); ++r) {
        const auto& c = results[i].ranked[r];
        json j = {{"sent_id", tree.sent_id()}, {"rank", r + 1},          {"template_id", c.template_id},
                  {"question", c.question},    {"answer", c.answer},     {"score", c.score.value_or(0.0)},
                  {"score_parts", c.score_parts}, {"sentence", sentence}};
        f << j.dump() << "\n";
      }
    }

    const auto s = generation_stats(per_sentence, a.set_size);
    const double set = static_cast<double>(s.set_size ? s.set_size : 1);
    out << "sentences\t" << s.sentences << "\n"
        << "set_size\t" << s.set_size << "\n"
        << "stage\tcandidates\tsentences\tpct_of_set\n";
    auto row = [&](const char* name, std::size_t total, std::size_t with_any) {
      out << name << "\t" << total << "\t" << with_any << "\t" << fixed(100.0 * static_cast<double>(with_any) / set, 1)
          << "\n";
    };
    row("applicable", s.totals.applicable, s.with_any.applicable);
    row("after_basic", s.totals.after_basic, s.with_any.after_basic);
    row("after_mean", s.totals.after_mean, s.with_any.after_mean);
    print_summary(out, "per_sentence", s.per_sentence);
    return 0;
  });
}

int export_survey(const ExportSurveyArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto gold = read_triples(a.gold_tsv);
    auto gin = open_in(a.generated);
    std::vector<GeneratedItem> generated;
    try {
      generated = read_generated_jsonl(gin);
    } catch (const ParseError& e) {
      throw Error(a.generated + ": " + e.what());
    }
    std::vector<std::string> warnings;
    const auto triples = qgen::export_survey(gold, generated, a.seed.value_or(a.config.seed), &warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    auto f = open_out(a.out);
    write_eval_triples(f, triples);
    std::map<std::string, std::size_t> per_set;
    for (const auto& t : triples) ++per_set[t.set + "/" + std::string(to_string(t.origin))];
    out << "triples\t" << triples.size() << "\n";
    for (const auto& [k, v] : per_set) out << k << "\t" << v << "\n";
    out << "skipped\t" << warnings.size() << "\n";
    return 0;
  });
}

namespace {
std::atomic<httplib::Server*> g_server{nullptr};
extern "C" void stop_server(int) {
  if (auto* s = g_server.load()) s->stop();
}
}  // namespace

int serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto triples = read_eval_triples_file(a.triples);
    if (triples.empty()) throw Error("no evaluation triples in " + a.triples);
    std::string guidelines(default_guidelines());
    if (!a.guidelines.empty()) {
      auto in = open_in(a.guidelines);
      std::stringstream ss;
      ss << in.rdbuf();
      guidelines = ss.str();
    }
    JudgementStore store(a.store);
    SurveyService service(std::move(triples), store, a.seed.value_or(a.config.seed), guidelines);

    httplib::Server server;
    install_routes(server, service, a.ui_dir);
    int port = a.port;
    if (port == 0) {
      port = server.bind_to_any_port(a.host);
      if (port < 0) throw Error("cannot bind " + a.host);
    } else if (!server.bind_to_port(a.host, port)) {
      throw Error("cannot bind " + a.host + ":" + std::to_string(port) + " (port busy?)");
    }
    out << "listening on http://" << a.host << ":" << port << std::endl;

    g_server = &server;
    std::signal(SIGINT, stop_server);
    std::signal(SIGTERM, stop_server);
    const bool ok = server.listen_after_bind();
    g_server = nullptr;
    return ok ? 0 : 1;
  });
}

int iaa(const IaaArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto in = open_in(a.store);
    std::vector<Judgement> judgements;
    try {
      judgements = read_judgements(in);
    } catch (const ParseError& e) {
      throw Error(a.store + ": " + e.what());
    }
    std::vector<EvalTriple> triples;
    if (!a.triples.empty()) triples = read_eval_triples_file(a.triples);
    const auto table = compute_iaa(judgements, triples);
    if (a.out.empty()) {
      write_iaa_tsv(out, table, a.precision);
    } else {
      auto f = open_out(a.out);
      write_iaa_tsv(f, table, a.precision);
    }
    return 0;
  });
}

int metrics(const MetricsArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto in = open_in(a.input_tsv);
    std::vector<std::string> hyps;
    std::vector<std::string> refs;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (text::trim(line).empty()) continue;
      auto cols = text::split(line, '\t');
      if (lineno == 1 && cols[0] == "id") continue;
      if (cols.size() != 3)
        throw Error(a.input_tsv + ": line " + std::to_string(lineno) + ": expected id, hypothesis, reference");
      hyps.push_back(cols[1]);
      refs.push_back(cols[2]);
    }
    if (hyps.empty()) throw Error("no items in " + a.input_tsv);

    std::ostringstream report;
    report << "metric\tvalue\n";
    const auto bleu = bleu_n(hyps, refs, 4);
    for (std::size_t n = 0; n < bleu.size(); ++n) report << "BLEU-" << n + 1 << "\t" << fixed(bleu[n], 4) << "\n";
    report << "ROUGE-L\t" << fixed(corpus_rouge_l(hyps, refs, a.config.rouge_beta), 4) << "\n";
    report << "CIDEr\t" << (hyps.size() >= 2 ? fixed(cider(hyps, refs), 4) : std::string("-")) << "\n";
    report << "items\t" << hyps.size() << "\n";
    if (a.out.empty()) {
      out << report.str();
    } else {
      auto f = open_out(a.out);
      f << report.str();
    }
    return 0;
  });
}

int stats(const StatsArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto in = open_in(a.questions);
    std::vector<std::string> questions;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (a.column > 0) {
        auto cols = text::split(line, '\t');
        if (text::trim(line).empty()) continue;
        if (static_cast<std::size_t>(a.column) > cols.size())
          throw Error(a.questions + ": line " + std::to_string(lineno) + " has no column " + std::to_string(a.column));
        questions.push_back(cols[static_cast<std::size_t>(a.column) - 1]);
      } else if (!text::trim(line).empty()) {
        questions.push_back(line);
      }
    }
    std::ostringstream csv;
    csv << "first_two_words,count\n";
    for (const auto& b : first_two_words_dist(questions)) csv << csv_field(b.label()) << "," << b.count << "\n";
    if (a.out_csv.empty()) {
      out << csv.str();
    } else {
      auto f = open_out(a.out_csv);
      f << csv.str();
    }
    return 0;
  });
}

}  // namespace qgen::cli
