#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "qgen/error.hpp"
#include "qgen/survey.hpp"
#include "qgen/survey_server.hpp"

using namespace qgen;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("qgen-survey-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::vector<GoldItem> gold_items(int dev, int test) {
  std::vector<GoldItem> out;
  for (int i = 0; i < dev + test; ++i) {
    const auto id = "s" + std::to_string(i);
    out.push_back({id, "gold question " + std::to_string(i) + " ?", "gold answer", i < dev ? "dev" : "test",
                   "sentence " + std::to_string(i)});
  }
  return out;
}

std::vector<GeneratedItem> generated_items(int n) {
  std::vector<GeneratedItem> out;
  for (int i = 0; i < n; ++i) {
    const auto id = "s" + std::to_string(i);
    out.push_back({id, "best question " + std::to_string(i) + " ?", "best answer", ""});
    out.push_back({id, "second question ?", "second answer", ""});
  }
  return out;
}

JudgementRecord record(const std::string& judge, const std::string& triple, int score,
                       const std::string& ts = "2026-01-01T00:00:00.000Z") {
  JudgementRecord r;
  r.judge_id = judge;
  r.triple_id = triple;
  r.scores.fill(score);
  r.timestamp = ts;
  return r;
}

json scores_json(int score) {
  json s = json::object();
  for (int c = 1; c <= 9; ++c) s["C" + std::to_string(c)] = score;
  return s;
}

std::vector<EvalTriple> small_set() {
  std::vector<EvalTriple> out;
  for (int i = 0; i < 4; ++i)
    out.push_back({"T" + std::to_string(i), "s", "q", "a", i % 2 ? Origin::generated : Origin::gold, "dev"});
  return out;
}

}  // namespace

TEST_CASE("export pairs each generated QA-pair with its gold pair") {
  const auto gold = gold_items(1, 0);
  const auto gen = generated_items(1);
  const auto triples = export_survey(gold, gen, 0);
  REQUIRE(triples.size() == 2);
  CHECK(triples[0].source_sentence == triples[1].source_sentence);
  std::set<Origin> origins = {triples[0].origin, triples[1].origin};
  CHECK(origins.size() == 2);
  for (const auto& t : triples) {
    if (t.origin == Origin::generated) CHECK(t.question == "best question 0 ?");
    else CHECK(t.question == "gold question 0 ?");
  }
}

TEST_CASE("export at evaluation scale") {
  const auto triples = export_survey(gold_items(29, 24), generated_items(53), 42);
  CHECK(triples.size() == 106);
  std::set<std::string> ids;
  std::map<std::string, int> per_slice;
  for (const auto& t : triples) {
    ids.insert(t.triple_id);
    ++per_slice[t.set + "/" + std::string(to_string(t.origin))];
  }
  CHECK(ids.size() == 106);
  CHECK(per_slice["dev/gold"] == 29);
  CHECK(per_slice["dev/generated"] == 29);
  CHECK(per_slice["test/gold"] == 24);
  CHECK(per_slice["test/generated"] == 24);
  CHECK(export_survey(gold_items(29, 24), generated_items(53), 42) == triples);
  CHECK(export_survey(gold_items(29, 24), generated_items(53), 43) != triples);
}

TEST_CASE("export edge cases") {
  SUBCASE("duplicate gold sent_ids pair with the leftmost") {
    std::vector<GoldItem> gold = {{"s0", "first ?", "a", "dev", "x"}, {"s0", "second ?", "b", "dev", "x"}};
    const auto triples = export_survey(gold, generated_items(1), 0);
    REQUIRE(triples.size() == 2);
    for (const auto& t : triples)
      if (t.origin == Origin::gold) CHECK(t.question == "first ?");
  }
  SUBCASE("generated sentences without gold are skipped with a warning") {
    std::vector<std::string> warnings;
    const auto triples = export_survey(gold_items(1, 0), generated_items(3), 0, &warnings);
    CHECK(triples.size() == 2);
    CHECK(warnings.size() == 2);
  }
  SUBCASE("files round-trip") {
    const auto triples = export_survey(gold_items(3, 2), generated_items(5), 1);
    std::stringstream ss;
    write_eval_triples(ss, triples);
    CHECK(read_eval_triples(ss) == triples);
    std::istringstream dup(
        R"({"triple_id":"T1","source_sentence":"s","question":"q","answer":"a","origin":"gold","set":"dev"})"
        "\n"
        R"({"triple_id":"T1","source_sentence":"s","question":"q","answer":"a","origin":"gold","set":"dev"})"
        "\n");
    CHECK_THROWS_AS(read_eval_triples(dup), qgen::ParseError);
  }
  SUBCASE("gold TSV") {
    std::istringstream in("sent_id\tquestion\tanswer\tset\ns1\tq?\ta\ttest\ns2\tq2?\tb\n");
    const auto gold = read_gold_tsv(in);
    REQUIRE(gold.size() == 2);
    CHECK(gold[0].set == "test");
    CHECK(gold[1].set == "dev");
    std::istringstream bad("s1\tonly two\n");
    CHECK_THROWS_AS(read_gold_tsv(bad), qgen::ParseError);
  }
}

TEST_CASE("session order") {
  std::vector<std::string> ids;
  for (int i = 0; i < 106; ++i) ids.push_back("T" + std::to_string(i));
  const auto a = session_order(ids, 7, "judge-a");
  const auto b = session_order(ids, 7, "judge-b");
  CHECK(a != b);
  CHECK(session_order(ids, 7, "judge-a") == a);
  CHECK(session_order(ids, 8, "judge-a") != a);
  for (const auto& order : {a, b}) {
    std::vector<std::string> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::string> expected = ids;
    std::sort(expected.begin(), expected.end());
    CHECK(sorted == expected);
  }
  CHECK(session_order({}, 1, "x").empty());
}

TEST_CASE("judgement validation") {
  json ok = {{"judge_id", "j"}, {"triple_id", "T1"}, {"scores", scores_json(3)}};
  CHECK(judgement_from_json(ok).scores[8] == 3);
  auto bad = ok;
  bad["scores"]["C4"] = 5;
  CHECK_THROWS_WITH_AS(judgement_from_json(bad), doctest::Contains("C4"), qgen::Error);
  bad = ok;
  bad["scores"].erase("C9");
  CHECK_THROWS_WITH_AS(judgement_from_json(bad), doctest::Contains("C9"), qgen::Error);
  bad = ok;
  bad["scores"]["C10"] = 1;
  CHECK_THROWS_AS(judgement_from_json(bad), qgen::Error);
  bad = ok;
  bad["scores"]["C1"] = "3";
  CHECK_THROWS_AS(judgement_from_json(bad), qgen::Error);
  bad = ok;
  bad.erase("judge_id");
  CHECK_THROWS_AS(judgement_from_json(bad), qgen::Error);
}

TEST_CASE("judgement store") {
  TempDir dir;
  const auto path = dir.file("store.jsonl");
  {
    JudgementStore store(path);
    CHECK(store.records().empty());
    const auto r = store.append(record("a", "T1", 2, ""));
    CHECK_FALSE(r.timestamp.empty());
    CHECK_FALSE(r.revised);
    store.append(record("a", "T2", 3));
    CHECK(store.append(record("a", "T1", 4)).revised);
  }
  JudgementStore reopened(path);
  const auto recs = reopened.records();
  REQUIRE(recs.size() == 3);
  CHECK(recs[2].revised);
  CHECK(reopened.answered("a") == std::vector<std::string>{"T1", "T2"});
  CHECK(reopened.answered("b").empty());

  std::ofstream(path, std::ios::app) << "{\"judge_id\": \"a\", \"triple_id\": \"T3\", \"sco";
  CHECK_THROWS_WITH_AS(JudgementStore{path}, doctest::Contains("line 4"), qgen::Error);
}

TEST_CASE("compute_iaa") {
  const auto triples = small_set();
  SUBCASE("identical judges agree perfectly") {
    std::vector<JudgementRecord> recs;
    for (int i = 0; i < 4; ++i)
      for (const char* j : {"a", "b"}) recs.push_back(record(j, "T" + std::to_string(i), 1 + i % 4));
    const auto table = compute_iaa(flatten(recs));
    REQUIRE(table.slices == std::vector<std::string>{"all"});
    for (const auto& row : table.cells) {
      REQUIRE(row[0].result);
      CHECK(row[0].result->kappa == doctest::Approx(1.0));
      CHECK(row[0].result->gamma.get() == doctest::Approx(1.0));
    }
  }
  SUBCASE("constant rater gives NA") {
    std::vector<JudgementRecord> recs;
    for (int i = 0; i < 4; ++i) {
      recs.push_back(record("a", "T" + std::to_string(i), 4));
      recs.push_back(record("b", "T" + std::to_string(i), 1 + i));
    }
    const auto table = compute_iaa(flatten(recs));
    std::ostringstream out;
    write_iaa_tsv(out, table);
    CHECK(out.str().find("C1\tgamma\tNA/4\n") != std::string::npos);
  }
  SUBCASE("opposite orderings give gamma -1 in their slice") {
    std::vector<Judgement> js;
    const int a[] = {1, 1, 1, 3};
    const int b[] = {2, 2, 2, 1};
    std::vector<EvalTriple> ts;
    for (int i = 0; i < 4; ++i) {
      ts.push_back({"G" + std::to_string(i), "s", "q", "a", Origin::generated, "test"});
      for (std::size_t c = 0; c < 9; ++c) {
        js.push_back({"A", "G" + std::to_string(i), c, a[i], ""});
        js.push_back({"B", "G" + std::to_string(i), c, b[i], ""});
      }
    }
    const auto table = compute_iaa(js, ts);
    REQUIRE(table.slices == std::vector<std::string>{"test/generated"});
    CHECK(table.cells[0][0].result->gamma.get() == -1.0);
  }
  SUBCASE("slices and missing raters") {
    std::vector<JudgementRecord> recs;
    for (int i = 0; i < 4; ++i) {
      recs.push_back(record("a", "T" + std::to_string(i), 1 + i % 2));
      recs.push_back(record("b", "T" + std::to_string(i), 1 + (i / 2) % 2));
    }
    recs.push_back(record("c", "T0", 1));
    const auto table = compute_iaa(flatten(recs), triples);
    CHECK(table.slices == std::vector<std::string>{"dev/gold", "dev/generated"});
    CHECK(table.cells[0][0].raters == 2);
    std::ostringstream out;
    write_iaa_tsv(out, table);
    CHECK(out.str().rfind("criterion\tstatistic\tdev/gold\tdev/generated\n", 0) == 0);
  }
  SUBCASE("fewer than two complete raters is an error") {
    std::vector<JudgementRecord> recs = {record("a", "T0", 1), record("a", "T1", 2), record("b", "T0", 1)};
    CHECK_THROWS_AS(compute_iaa(flatten(recs)), qgen::Error);
  }
  SUBCASE("later judgements replace earlier ones regardless of record order") {
    std::mt19937_64 rng(4);
    std::vector<JudgementRecord> recs;
    for (int i = 0; i < 4; ++i)
      for (const char* j : {"a", "b", "c"}) {
        recs.push_back(record(j, "T" + std::to_string(i), 1 + static_cast<int>(rng() % 4), "2026-01-01T00:00:00.000Z"));
        recs.push_back(record(j, "T" + std::to_string(i), 1 + static_cast<int>(rng() % 4), "2026-01-02T00:00:00.000Z"));
      }
    std::ostringstream base;
    write_iaa_tsv(base, compute_iaa(flatten(recs), triples), 12);
    for (int k = 0; k < 20; ++k) {
      std::shuffle(recs.begin(), recs.end(), rng);
      std::ostringstream out;
      write_iaa_tsv(out, compute_iaa(flatten(recs), triples), 12);
      CHECK(out.str() == base.str());
    }
  }
}

TEST_CASE("judgement input formats") {
  std::istringstream in(
      R"({"judge_id":"a","triple_id":"T1","criterion":"C2","score":3})"
      "\n"
      R"({"judge_id":"b","triple_id":"T1","scores":{"C1":1,"C2":1,"C3":1,"C4":1,"C5":1,"C6":1,"C7":1,"C8":1,"C9":1}})"
      "\n");
  const auto js = read_judgements(in);
  REQUIRE(js.size() == 10);
  CHECK(js[0].criterion == 1);
  CHECK(js[0].score == 3);
  std::istringstream bad(R"({"judge_id":"a","triple_id":"T1","criterion":"C2","score":7})");
  CHECK_THROWS_AS(read_judgements(bad), qgen::ParseError);
}

TEST_CASE("HTTP API") {
  TempDir dir;
  const auto store_path = dir.file("store.jsonl");
  std::vector<std::string> ids;
  const auto triples = export_survey(gold_items(29, 24), generated_items(53), 5);
  for (const auto& t : triples) ids.push_back(t.triple_id);

  auto run = [&](auto&& body) {
    JudgementStore store(store_path);
    SurveyService service(triples, store, 99);
    httplib::Server server;
    install_routes(server, service);
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    httplib::Client client("127.0.0.1", port);
    body(client);
    server.stop();
    t.join();
  };

  std::vector<std::string> order_a;
  run([&](httplib::Client& client) {
    auto res = client.Get("/api/session/judge-a");
    REQUIRE(res);
    CHECK(res->status == 200);
    auto a = json::parse(res->body);
    order_a = a["triples"].get<std::vector<std::string>>();
    CHECK(a["cursor"] == 0);
    auto b = json::parse(client.Get("/api/session/judge-b")->body)["triples"].get<std::vector<std::string>>();
    CHECK(order_a.size() == 106);
    CHECK(order_a != b);
    auto sa = order_a;
    auto sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    CHECK(sa == sb);

    res = client.Get("/api/triple/" + order_a[0]);
    REQUIRE(res);
    CHECK(res->status == 200);
    auto triple = json::parse(res->body);
    CHECK(triple["triple_id"] == order_a[0]);
    CHECK(triple["criteria"].size() == 9);
    CHECK_FALSE(triple["guidelines"].get<std::string>().empty());
    CHECK(client.Get("/api/triple/nope")->status == 404);

    json body = {{"judge_id", "judge-a"}, {"triple_id", order_a[0]}, {"scores", scores_json(3)}};
    res = client.Post("/api/judgement", body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK_FALSE(json::parse(res->body)["timestamp"].get<std::string>().empty());

    auto bad = body;
    bad["scores"]["C5"] = 5;
    res = client.Post("/api/judgement", bad.dump(), "application/json");
    CHECK(res->status == 422);
    CHECK(json::parse(res->body)["error"].get<std::string>().find("C5") != std::string::npos);
    bad = body;
    bad["scores"].erase("C1");
    CHECK(client.Post("/api/judgement", bad.dump(), "application/json")->status == 422);
    bad = body;
    bad["triple_id"] = "nope";
    CHECK(client.Post("/api/judgement", bad.dump(), "application/json")->status == 422);
    CHECK(client.Post("/api/judgement", "{not json", "application/json")->status == 400);

    body["scores"] = scores_json(1);
    CHECK(client.Post("/api/judgement", body.dump(), "application/json")->status == 200);
    res = client.Get("/api/export");
    REQUIRE(res);
    std::istringstream lines(res->body);
    std::vector<json> records;
    for (std::string line; std::getline(lines, line);) records.push_back(json::parse(line));
    REQUIRE(records.size() == 2);
    CHECK_FALSE(records[0].contains("revised"));
    CHECK(records[1]["revised"] == true);
  });

  // A new service over the same store resumes where the judge stopped.
  run([&](httplib::Client& client) {
    auto s = json::parse(client.Get("/api/session/judge-a")->body);
    CHECK(s["triples"].get<std::vector<std::string>>() == order_a);
    CHECK(s["answered"] == json::array({order_a[0]}));
    CHECK(s["cursor"] == 1);
  });
}
