#pragma once

#include <map>
#include <string>
#include <vector>

#include "argen/dataset.hpp"

namespace argen {

/// Argument classification scores: micro precision/recall/F1 over exact
/// (start, end, role) matches, set semantics after duplicate collapse.
struct ScoreReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t num_gold = 0;
  std::size_t num_pred = 0;
  std::size_t num_correct = 0;

  struct Cell {
    std::size_t num_gold = 0;
    std::size_t num_pred = 0;
    std::size_t num_correct = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
  };
  std::map<std::string, Cell> by_event_type;
  std::map<std::string, Cell> by_role;

  std::string source_language;  // labels for source => target reporting
  std::string target_language;
};

/// Scores predictions against gold instances. Instances are keyed by
/// (doc_id, sent_id, event_type); a prediction referencing a key absent
/// from the gold split is an error. Unresolved predictions count toward
/// num_pred and are never correct.
ScoreReport score(const std::vector<InstancePredictions>& predictions,
                  const DatasetSplit& golds);

/// Arithmetic mean of P/R/F1 across seed runs; counts are summed for
/// transparency. Requires at least one report.
ScoreReport aggregate_seeds(const std::vector<ScoreReport>& reports);

std::string report_to_text(const ScoreReport& report);
std::string report_to_json_string(const ScoreReport& report);

}  // namespace argen
