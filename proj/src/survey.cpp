#include "qgen/survey.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "qgen/error.hpp"
#include "qgen/text.hpp"

namespace qgen {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0, bound) by rejection, independent of the standard library's
// distribution implementation.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % bound;
}

template <class T>
void shuffle(std::vector<T>& v, std::uint64_t key) {
  std::mt19937_64 rng(key);
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[bounded(rng, i)]);
}

std::string str_field(const json& j, const char* key, bool required = true) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) throw Error(std::string("missing field '") + key + "'");
    return {};
  }
  if (!it->is_string()) throw Error(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

int score_value(const json& v, std::string_view criterion) {
  if (!v.is_number_integer()) throw Error("score for " + std::string(criterion) + " must be an integer");
  const auto s = v.get<long long>();
  if (s < 1 || s > 4) throw Error("score for " + std::string(criterion) + " must be in 1..4, got " + std::to_string(s));
  return static_cast<int>(s);
}

json parse_line(const std::string& line, std::size_t lineno) {
  try {
    auto j = json::parse(line);
    if (!j.is_object()) throw ParseError("expected a JSON object", lineno);
    return j;
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
  }
}

}  // namespace

std::string_view to_string(Origin o) { return o == Origin::gold ? "gold" : "generated"; }

Origin parse_origin(std::string_view s) {
  if (s == "gold") return Origin::gold;
  if (s == "generated") return Origin::generated;
  throw Error("unknown origin '" + std::string(s) + "'");
}

json to_json(const EvalTriple& t) {
  return {{"triple_id", t.triple_id}, {"source_sentence", t.source_sentence}, {"question", t.question},
          {"answer", t.answer},       {"origin", to_string(t.origin)},         {"set", t.set}};
}

EvalTriple eval_triple_from_json(const json& j) {
  EvalTriple t;
  t.triple_id = str_field(j, "triple_id");
  t.source_sentence = str_field(j, "source_sentence");
  t.question = str_field(j, "question");
  t.answer = str_field(j, "answer");
  t.origin = parse_origin(str_field(j, "origin"));
  t.set = str_field(j, "set");
  if (t.triple_id.empty()) throw Error("empty triple_id");
  return t;
}

std::vector<EvalTriple> read_eval_triples(std::istream& in) {
  std::vector<EvalTriple> out;
  std::set<std::string> ids;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(eval_triple_from_json(parse_line(line, lineno)));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), lineno);
    }
    if (!ids.insert(out.back().triple_id).second)
      throw ParseError("duplicate triple_id '" + out.back().triple_id + "'", lineno);
  }
  return out;
}

std::vector<EvalTriple> read_eval_triples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return read_eval_triples(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

void write_eval_triples(std::ostream& out, std::span<const EvalTriple> triples) {
  for (const auto& t : triples) out << to_json(t).dump() << '\n';
}

std::vector<GoldItem> read_gold_tsv(std::istream& in) {
  std::vector<GoldItem> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    auto cols = text::split(line, '\t');
    if (lineno == 1 && cols[0] == "sent_id") continue;
    if (cols.size() < 3 || cols.size() > 5)
      throw ParseError("expected 3 to 5 tab-separated columns, got " + std::to_string(cols.size()), lineno);
    GoldItem g{cols[0], cols[1], cols[2], "dev", ""};
    if (cols.size() > 3 && !cols[3].empty()) g.set = cols[3];
    if (cols.size() > 4) g.sentence = cols[4];
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<GeneratedItem> read_generated_jsonl(std::istream& in) {
  std::vector<GeneratedItem> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (text::trim(line).empty()) continue;
    auto j = parse_line(line, lineno);
    try {
      out.push_back({str_field(j, "sent_id"), str_field(j, "question"), str_field(j, "answer"),
                     str_field(j, "sentence", false)});
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return out;
}

std::vector<EvalTriple> export_survey(std::span<const GoldItem> gold, std::span<const GeneratedItem> generated,
                                      std::uint64_t seed, std::vector<std::string>* warnings) {
  std::map<std::string, const GoldItem*> first_gold;
  for (const auto& g : gold) first_gold.try_emplace(g.sent_id, &g);

  std::vector<EvalTriple> out;
  std::set<std::string> seen;
  for (const auto& item : generated) {
    if (!seen.insert(item.sent_id).second) continue;
    auto it = first_gold.find(item.sent_id);
    if (it == first_gold.end()) {
      if (warnings) warnings->push_back("no gold QA-pair for sentence " + item.sent_id + ", skipped");
      continue;
    }
    const GoldItem& g = *it->second;
    const std::string sentence = !g.sentence.empty() ? g.sentence : item.sentence;
    out.push_back({"", sentence, item.question, item.answer, Origin::generated, g.set});
    out.push_back({"", sentence, g.question, g.answer, Origin::gold, g.set});
  }
  shuffle(out, splitmix(seed));
  const auto width = std::max<std::size_t>(3, std::to_string(out.size()).size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto n = std::to_string(i + 1);
    out[i].triple_id = "T" + std::string(width - n.size(), '0') + n;
  }
  return out;
}

std::vector<std::string> session_order(std::span<const std::string> ids, std::uint64_t seed,
                                       std::string_view judge_id) {
  std::vector<std::string> out(ids.begin(), ids.end());
  shuffle(out, splitmix(seed ^ fnv1a(judge_id)));
  return out;
}

json to_json(const JudgementRecord& r) {
  json scores = json::object();
  for (std::size_t i = 0; i < r.scores.size(); ++i) scores[std::string(survey_criteria()[i].id)] = r.scores[i];
  json j = {{"judge_id", r.judge_id}, {"triple_id", r.triple_id}, {"scores", scores}, {"timestamp", r.timestamp}};
  if (r.revised) j["revised"] = true;
  return j;
}

JudgementRecord judgement_from_json(const json& j) {
  if (!j.is_object()) throw Error("judgement must be a JSON object");
  JudgementRecord r;
  r.judge_id = str_field(j, "judge_id");
  r.triple_id = str_field(j, "triple_id");
  if (r.judge_id.empty()) throw Error("empty judge_id");
  if (r.triple_id.empty()) throw Error("empty triple_id");
  auto it = j.find("scores");
  if (it == j.end() || !it->is_object()) throw Error("missing 'scores' object");
  for (const auto& [key, value] : it->items())
    if (!criterion_index(key)) throw Error("unknown criterion '" + key + "'");
  for (std::size_t i = 0; i < survey_criteria().size(); ++i) {
    const std::string id(survey_criteria()[i].id);
    auto s = it->find(id);
    if (s == it->end()) throw Error("missing score for " + id);
    r.scores[i] = score_value(*s, id);
  }
  r.timestamp = str_field(j, "timestamp", false);
  if (auto rev = j.find("revised"); rev != j.end()) {
    if (!rev->is_boolean()) throw Error("field 'revised' must be a boolean");
    r.revised = rev->get<bool>();
  }
  return r;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::time_point_cast<std::chrono::seconds>(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now - secs).count();
  const std::time_t t = std::chrono::system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char frac[8];
  std::snprintf(frac, sizeof frac, ".%03dZ", static_cast<int>(ms % 1000));
  return std::string(buf) + frac;
}

JudgementStore::JudgementStore(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) {
    std::ofstream create(path_, std::ios::app);
    if (!create) throw Error("cannot create judgement store " + path_);
    return;
  }
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (text::trim(line).empty()) continue;
    try {
      records_.push_back(judgement_from_json(parse_line(line, lineno)));
    } catch (const Error& e) {
      throw Error("corrupt judgement store " + path_ + " at line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

JudgementRecord JudgementStore::append(JudgementRecord r) {
  std::lock_guard lock(mu_);
  if (r.timestamp.empty()) r.timestamp = utc_now();
  r.revised = std::any_of(records_.begin(), records_.end(), [&](const JudgementRecord& o) {
    return o.judge_id == r.judge_id && o.triple_id == r.triple_id;
  });
  const std::string line = to_json(r).dump() + '\n';
  const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
  if (fd < 0) throw Error("cannot open judgement store " + path_ + ": " + std::strerror(errno));
  std::size_t done = 0;
  while (done < line.size()) {
    const auto n = ::write(fd, line.data() + done, line.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string msg = std::strerror(errno);
      ::close(fd);
      throw Error("write to judgement store failed: " + msg);
    }
    done += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  records_.push_back(r);
  return r;
}

std::vector<JudgementRecord> JudgementStore::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::vector<std::string> JudgementStore::answered(std::string_view judge_id) const {
  std::lock_guard lock(mu_);
  std::set<std::string> ids;
  for (const auto& r : records_)
    if (r.judge_id == judge_id) ids.insert(r.triple_id);
  return {ids.begin(), ids.end()};
}

std::vector<Judgement> flatten(std::span<const JudgementRecord> records) {
  std::vector<Judgement> out;
  for (const auto& r : records)
    for (std::size_t c = 0; c < r.scores.size(); ++c) out.push_back({r.judge_id, r.triple_id, c, r.scores[c], r.timestamp});
  return out;
}

std::vector<Judgement> read_judgements(std::istream& in) {
  std::vector<Judgement> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (text::trim(line).empty()) continue;
    auto j = parse_line(line, lineno);
    try {
      if (j.contains("scores")) {
        const JudgementRecord r = judgement_from_json(j);
        for (auto& f : flatten(std::span(&r, 1))) out.push_back(std::move(f));
        continue;
      }
      Judgement f;
      f.judge_id = str_field(j, "judge_id");
      f.triple_id = str_field(j, "triple_id");
      const auto crit = str_field(j, "criterion");
      auto idx = criterion_index(crit);
      if (!idx) throw Error("unknown criterion '" + crit + "'");
      f.criterion = *idx;
      auto s = j.find("score");
      if (s == j.end()) throw Error("missing field 'score'");
      f.score = score_value(*s, crit);
      f.timestamp = str_field(j, "timestamp", false);
      out.push_back(std::move(f));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return out;
}

IaaTable compute_iaa(std::span<const Judgement> judgements, std::span<const EvalTriple> triples) {
  const std::size_t ncrit = survey_criteria().size();

  // (criterion, triple, judge) -> (timestamp, score), latest wins.
  std::map<std::tuple<std::size_t, std::string, std::string>, std::pair<std::string, int>> latest;
  for (const auto& j : judgements) {
    if (j.criterion >= ncrit) throw Error("criterion index out of range");
    auto key = std::make_tuple(j.criterion, j.triple_id, j.judge_id);
    auto value = std::make_pair(j.timestamp, j.score);
    auto [it, inserted] = latest.try_emplace(key, value);
    if (!inserted && it->second < value) it->second = value;
  }

  IaaTable table;
  std::vector<std::vector<std::string>> slice_items;
  if (triples.empty()) {
    std::set<std::string> ids;
    for (const auto& [key, v] : latest) ids.insert(std::get<1>(key));
    table.slices.push_back("all");
    slice_items.emplace_back(ids.begin(), ids.end());
  } else {
    std::map<std::pair<std::string, Origin>, std::vector<std::string>> by_slice;
    for (const auto& t : triples) by_slice[{t.set, t.origin}].push_back(t.triple_id);
    for (auto& [key, ids] : by_slice) {
      table.slices.push_back(key.first + "/" + std::string(to_string(key.second)));
      std::sort(ids.begin(), ids.end());
      slice_items.push_back(std::move(ids));
    }
  }

  std::set<std::string> judges;
  for (const auto& [key, v] : latest) judges.insert(std::get<2>(key));

  bool any = false;
  table.cells.assign(ncrit, std::vector<IaaCell>(table.slices.size()));
  for (std::size_t c = 0; c < ncrit; ++c) {
    for (std::size_t s = 0; s < table.slices.size(); ++s) {
      const auto& items = slice_items[s];
      IaaCell& cell = table.cells[c][s];
      cell.items = items.size();
      std::vector<std::vector<int>> columns;
      for (const auto& judge : judges) {
        std::vector<int> col;
        for (const auto& item : items) {
          auto it = latest.find({c, item, judge});
          if (it == latest.end()) break;
          col.push_back(it->second.second);
        }
        if (col.size() == items.size()) columns.push_back(std::move(col));
      }
      cell.raters = columns.size();
      if (columns.size() < 2 || items.size() < 2) continue;
      std::vector<int> cells;
      cells.reserve(items.size() * columns.size());
      for (std::size_t i = 0; i < items.size(); ++i)
        for (const auto& col : columns) cells.push_back(col[i]);
      cell.result = agreement(RatingMatrix(items.size(), columns.size(), std::move(cells)));
      any = true;
    }
  }
  if (!any) throw Error("no slice has two raters who scored all of its items");
  return table;
}

void write_iaa_tsv(std::ostream& out, const IaaTable& table, int precision) {
  out << "criterion\tstatistic";
  for (const auto& s : table.slices) out << '\t' << s;
  out << '\n';
  for (std::size_t c = 0; c < table.cells.size(); ++c) {
    for (const char* stat : {"kappa", "gamma"}) {
      out << survey_criteria()[c].id << '\t' << stat;
      for (const auto& cell : table.cells[c]) {
        out << '\t';
        if (!cell.result) {
          out << '-';
        } else if (std::string_view(stat) == "kappa") {
          out << Gamma::value(cell.result->kappa).to_string(precision);
        } else {
          out << cell.result->gamma.to_string(precision);
        }
      }
      out << '\n';
    }
  }
}

}  // namespace qgen
