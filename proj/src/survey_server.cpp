#include "qgen/survey_server.hpp"

#include "httplib.h"
#include "qgen/error.hpp"

namespace qgen {

using nlohmann::json;

namespace {

SurveyService::Response error_response(int status, const std::string& message) {
  return {status, json{{"error", message}}.dump()};
}

}  // namespace

std::string_view default_guidelines() {
  return "Each screen shows one sentence, a question about it and a suggested answer. "
         "Rate every statement from 1 (disagree) to 4 (agree), judging the question and the answer "
         "only against the sentence shown. If the question cannot be understood, give 1 to all "
         "statements about the suggested answer (C6 to C9).";
}

SurveyService::SurveyService(std::vector<EvalTriple> triples, JudgementStore& store, std::uint64_t seed,
                             std::string guidelines)
    : triples_(std::move(triples)), store_(store), seed_(seed), guidelines_(std::move(guidelines)) {
  for (std::size_t i = 0; i < triples_.size(); ++i) {
    if (!index_.emplace(triples_[i].triple_id, i).second)
      throw Error("duplicate triple_id '" + triples_[i].triple_id + "'");
    ids_.push_back(triples_[i].triple_id);
  }
}

SurveyService::Response SurveyService::session(const std::string& judge_id) const {
  if (judge_id.empty()) return error_response(422, "empty judge_id");
  const auto order = session_order(ids_, seed_, judge_id);
  const auto done = store_.answered(judge_id);
  const std::set<std::string> done_set(done.begin(), done.end());
  std::size_t cursor = order.size();
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!done_set.contains(order[i])) {
      cursor = i;
      break;
    }
  }
  json answered = json::array();
  for (const auto& id : order)
    if (done_set.contains(id)) answered.push_back(id);
  return {200, json{{"judge_id", judge_id}, {"triples", order}, {"answered", answered}, {"cursor", cursor}}.dump()};
}

SurveyService::Response SurveyService::triple(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return error_response(404, "unknown triple '" + id + "'");
  json j = to_json(triples_[it->second]);
  json criteria = json::array();
  for (const auto& c : survey_criteria()) criteria.push_back({{"id", c.id}, {"statement", c.statement}});
  j["criteria"] = criteria;
  j["guidelines"] = guidelines_;
  return {200, j.dump()};
}

SurveyService::Response SurveyService::submit(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    return error_response(400, std::string("invalid JSON: ") + e.what());
  }
  JudgementRecord r;
  try {
    r = judgement_from_json(j);
  } catch (const Error& e) {
    return error_response(422, e.what());
  }
  if (!index_.contains(r.triple_id)) return error_response(422, "unknown triple '" + r.triple_id + "'");
  // The server clock orders revisions, whatever the client sent.
  r.timestamp.clear();
  r.revised = false;
  try {
    return {200, to_json(store_.append(std::move(r))).dump()};
  } catch (const Error& e) {
    return error_response(500, e.what());
  }
}

SurveyService::Response SurveyService::export_records() const {
  std::string out;
  for (const auto& r : store_.records()) out += to_json(r).dump() + '\n';
  return {200, out, "application/x-ndjson"};
}

void install_routes(httplib::Server& server, SurveyService& service, const std::string& ui_dir) {
  auto reply = [](httplib::Response& res, const SurveyService::Response& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  server.Get(R"(/api/session/([^/]+))", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.session(req.matches[1]));
  });
  server.Get(R"(/api/triple/([^/]+))", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.triple(req.matches[1]));
  });
  server.Post("/api/judgement", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.submit(req.body));
  });
  server.Get("/api/export", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.export_records());
  });
  if (!ui_dir.empty() && !server.set_mount_point("/", ui_dir)) throw Error("cannot serve UI directory " + ui_dir);
}

}  // namespace qgen
