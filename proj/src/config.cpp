#include "qgen/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <set>

#include "qgen/text.hpp"

namespace qgen {

namespace {

namespace pt = boost::property_tree;

template <class T>
T get(const pt::ptree& tree, const std::string& key) {
  try {
    return tree.get<T>(key);
  } catch (const pt::ptree_bad_data&) {
    throw Error("config: malformed value for '" + key + "'");
  }
}

std::vector<std::string> list(const std::string& value) {
  std::vector<std::string> out;
  for (const auto& item : text::split(value, ',')) {
    auto t = text::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

}  // namespace

Config parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error("config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  Config c;
  for (const auto& [key, node] : tree) {
    if (!node.empty()) throw Error("config: sections are not supported ('" + key + "')");
    if (key == "ngram_order") {
      c.ngram_order = get<int>(tree, key);
    } else if (key == "alpha") {
      c.alpha = get<double>(tree, key);
    } else if (key == "weights") {
      auto w = list(node.data());
      if (w.size() != 2) throw Error("config: weights takes two values (morph, qword)");
      try {
        c.weights = {std::stod(w[0]), std::stod(w[1])};
      } catch (const std::logic_error&) {
        throw Error("config: malformed value for 'weights'");
      }
    } else if (key == "theta_content") {
      c.theta_content = get<double>(tree, key);
    } else if (key == "filters") {
      auto names = list(node.data());
      std::set<std::string> enabled(names.begin(), names.end());
      enabled.erase("none");
      for (const auto& n : enabled)
        if (n != "min_length" && n != "nontrivial_answer" && n != "answer_in_question" && n != "dedup")
          throw Error("config: unknown filter '" + n + "'");
      c.filters.min_length = enabled.contains("min_length");
      c.filters.nontrivial_answer = enabled.contains("nontrivial_answer");
      c.filters.answer_in_question = enabled.contains("answer_in_question");
      c.filters.dedup = enabled.contains("dedup");
    } else if (key == "min_question_tokens") {
      c.filters.min_question_tokens = get<std::size_t>(tree, key);
    } else if (key == "rouge_beta") {
      c.rouge_beta = get<double>(tree, key);
    } else if (key == "seed") {
      c.seed = get<std::uint64_t>(tree, key);
    } else {
      throw Error("config: unknown key '" + key + "'");
    }
  }
  if (c.ngram_order < 2) throw Error("config: ngram_order must be at least 2");
  if (!(c.alpha > 0)) throw Error("config: alpha must be positive");
  if (c.theta_content < 0) throw Error("config: theta_content must be non-negative");
  RankModels{{}, MorphNgramModel(), QuestionWordModel(), c.weights}.validate();
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  return parse_config(in);
}

}  // namespace qgen
