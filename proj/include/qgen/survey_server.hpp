#pragma once

// HTTP JSON API for the survey:
//
//   GET  /api/session/{judge_id}  ordered triple ids, answered ids, cursor
//   GET  /api/triple/{id}         the triple, criteria and guideline text
//   POST /api/judgement           store one complete judgement
//   GET  /api/export              every stored record, one JSON per line

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qgen/survey.hpp"

namespace httplib {
class Server;
}

namespace qgen {

/// Guideline text served when none is configured.
std::string_view default_guidelines();

/// Request handling independent of the transport.
class SurveyService {
 public:
  SurveyService(std::vector<EvalTriple> triples, JudgementStore& store, std::uint64_t seed,
                std::string guidelines = std::string(default_guidelines()));

  struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
  };

  Response session(const std::string& judge_id) const;
  Response triple(const std::string& id) const;
  Response submit(const std::string& body);
  Response export_records() const;

 private:
  std::vector<EvalTriple> triples_;
  std::vector<std::string> ids_;
  std::map<std::string, std::size_t> index_;
  JudgementStore& store_;
  std::uint64_t seed_;
  std::string guidelines_;
};

/// Installs the API routes; `ui_dir`, when non-empty, is served at "/".
void install_routes(httplib::Server& server, SurveyService& service, const std::string& ui_dir = {});

}  // namespace qgen
