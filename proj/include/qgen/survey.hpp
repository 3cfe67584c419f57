#pragma once

// Human evaluation: building the evaluation set, per-judge presentation
// order, the judgement store and agreement tables over stored judgements.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qgen/agreement.hpp"

namespace qgen {

enum class Origin { gold, generated };

std::string_view to_string(Origin o);
Origin parse_origin(std::string_view s);

struct EvalTriple {
  std::string triple_id;
  std::string source_sentence;
  std::string question;
  std::string answer;
  Origin origin = Origin::gold;
  std::string set = "dev";

  bool operator==(const EvalTriple&) const = default;
};

nlohmann::json to_json(const EvalTriple& t);
/// Throws Error on missing or mistyped fields.
EvalTriple eval_triple_from_json(const nlohmann::json& j);

std::vector<EvalTriple> read_eval_triples(std::istream& in);
std::vector<EvalTriple> read_eval_triples_file(const std::string& path);
void write_eval_triples(std::ostream& out, std::span<const EvalTriple> triples);

struct GoldItem {
  std::string sent_id;
  std::string question;
  std::string answer;
  std::string set = "dev";
  std::string sentence;
};

struct GeneratedItem {
  std::string sent_id;
  std::string question;
  std::string answer;
  std::string sentence;
};

/// Gold TSV: sent_id, question, answer[, set[, sentence]]; an optional
/// header row starting with "sent_id" is skipped.
std::vector<GoldItem> read_gold_tsv(std::istream& in);
/// Generator output records (one JSON object per line).
std::vector<GeneratedItem> read_generated_jsonl(std::istream& in);

/// Pairs the first generated item of every sentence with the leftmost gold
/// item of the same sent_id, shuffles with `seed` and numbers the result.
/// Sentences without gold are skipped and reported in `warnings`.
std::vector<EvalTriple> export_survey(std::span<const GoldItem> gold, std::span<const GeneratedItem> generated,
                                      std::uint64_t seed, std::vector<std::string>* warnings = nullptr);

/// Deterministic permutation of `ids` keyed by (seed, judge_id).
std::vector<std::string> session_order(std::span<const std::string> ids, std::uint64_t seed,
                                       std::string_view judge_id);

struct JudgementRecord {
  std::string judge_id;
  std::string triple_id;
  std::array<int, 9> scores{};
  std::string timestamp;  ///< UTC, e.g. 2026-03-01T12:00:00Z
  bool revised = false;   ///< replaces an earlier record of the same judge and triple

  bool operator==(const JudgementRecord&) const = default;
};

nlohmann::json to_json(const JudgementRecord& r);
/// Requires judge_id, triple_id and all nine scores in 1..4; timestamp and
/// revised are optional. Throws Error naming the first problem.
JudgementRecord judgement_from_json(const nlohmann::json& j);

std::string utc_now();

/// Append-only newline-delimited store, one writer at a time.
class JudgementStore {
 public:
  /// Loads existing records; throws Error naming the line of a corrupt one.
  explicit JudgementStore(std::string path);

  /// Stamps the record if it has no timestamp, marks revisions, appends and
  /// flushes. Returns the stored record.
  JudgementRecord append(JudgementRecord r);

  std::vector<JudgementRecord> records() const;
  /// Triple ids answered by a judge.
  std::vector<std::string> answered(std::string_view judge_id) const;

 private:
  std::string path_;
  mutable std::mutex mu_;
  std::vector<JudgementRecord> records_;
};

/// One score for one criterion, the unit of the agreement input.
struct Judgement {
  std::string judge_id;
  std::string triple_id;
  std::size_t criterion = 0;  ///< 0-based, C1 = 0
  int score = 0;
  std::string timestamp;
};

/// Reads store records (with a "scores" object) and flat records with
/// "criterion" and "score", in any mix.
std::vector<Judgement> read_judgements(std::istream& in);
std::vector<Judgement> flatten(std::span<const JudgementRecord> records);

struct IaaCell {
  std::optional<AgreementResult> result;  ///< empty when the slice has < 2 complete raters
  std::size_t items = 0;
  std::size_t raters = 0;
};

struct IaaTable {
  std::vector<std::string> slices;  ///< "dev/gold", "dev/generated", ... or "all"
  /// cells[criterion][slice]
  std::vector<std::vector<IaaCell>> cells;
};

/// Later timestamps replace earlier scores of the same judge, triple and
/// criterion (ties go to the higher score), so record order is irrelevant.
/// With triples, items are sliced by set and origin; otherwise one slice.
/// Throws Error when no slice has two raters who scored all its items.
IaaTable compute_iaa(std::span<const Judgement> judgements, std::span<const EvalTriple> triples = {});

/// criterion, statistic, one column per slice; "-" where not computable.
void write_iaa_tsv(std::ostream& out, const IaaTable& table, int precision = 2);

}  // namespace qgen
