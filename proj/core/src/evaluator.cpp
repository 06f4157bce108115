#include "argen/evaluator.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace argen {

namespace {

using OffsetRole = std::tuple<std::size_t, std::size_t, std::string>;

void finish_cell(ScoreReport::Cell& cell) {
  cell.precision = cell.num_pred == 0
                       ? 0.0
                       : static_cast<double>(cell.num_correct) / cell.num_pred;
  cell.recall = cell.num_gold == 0
                    ? 0.0
                    : static_cast<double>(cell.num_correct) / cell.num_gold;
  double pr = cell.precision + cell.recall;
  cell.f1 = pr == 0.0 ? 0.0 : 2.0 * cell.precision * cell.recall / pr;
}

std::string instance_key(const std::string& doc_id, const std::string& sent_id,
                         const std::string& event_type) {
  return doc_id + "|" + sent_id + "|" + event_type;
}

}  // namespace

ScoreReport score(const std::vector<InstancePredictions>& predictions,
                  const DatasetSplit& golds) {
  // Gold pairs per instance key, duplicates collapsed.
  std::map<std::string, std::set<OffsetRole>> gold_sets;
  std::map<std::string, std::string> key_event_type;
  for (const auto& inst : golds.instances) {
    std::string key = instance_key(inst.doc_id, inst.sent_id, inst.event_type);
    key_event_type[key] = inst.event_type;
    auto& set = gold_sets[key];
    for (const auto& arg : inst.arguments)
      set.insert({arg.span.start, arg.span.end, arg.role});
  }

  std::map<std::string, std::set<OffsetRole>> pred_sets;
  std::map<std::string, std::set<std::pair<std::string, std::string>>> unresolved_sets;
  for (const auto& inst : predictions) {
    std::string key = instance_key(inst.doc_id, inst.sent_id, inst.event_type);
    if (gold_sets.find(key) == gold_sets.end())
      throw std::runtime_error("score: prediction references unknown instance " +
                               key);
    for (const auto& pred : inst.predictions) {
      if (pred.resolution == Resolution::unresolved || !pred.span)
        unresolved_sets[key].insert({pred.role, pred.text});
      else
        pred_sets[key].insert({pred.span->start, pred.span->end, pred.role});
    }
  }

  ScoreReport report;
  auto bump = [](ScoreReport::Cell& cell, std::size_t gold, std::size_t pred,
                 std::size_t correct) {
    cell.num_gold += gold;
    cell.num_pred += pred;
    cell.num_correct += correct;
  };

  for (const auto& [key, gold_set] : gold_sets) {
    const std::string& event_type = key_event_type[key];
    report.num_gold += gold_set.size();
    bump(report.by_event_type[event_type], gold_set.size(), 0, 0);
    for (const auto& [s, e, role] : gold_set)
      bump(report.by_role[role], 1, 0, 0);

    auto pit = pred_sets.find(key);
    if (pit != pred_sets.end()) {
      report.num_pred += pit->second.size();
      bump(report.by_event_type[event_type], 0, pit->second.size(), 0);
      for (const auto& pair : pit->second) {
        const auto& role = std::get<2>(pair);
        bump(report.by_role[role], 0, 1, 0);
        if (gold_set.count(pair)) {
          ++report.num_correct;
          ++report.by_event_type[event_type].num_correct;
          ++report.by_role[role].num_correct;
        }
      }
    }
    auto uit = unresolved_sets.find(key);
    if (uit != unresolved_sets.end()) {
      report.num_pred += uit->second.size();
      bump(report.by_event_type[event_type], 0, uit->second.size(), 0);
      for (const auto& [role, text] : uit->second) bump(report.by_role[role], 0, 1, 0);
    }
  }

  report.precision = report.num_pred == 0
                         ? 0.0
                         : static_cast<double>(report.num_correct) / report.num_pred;
  report.recall = report.num_gold == 0
                      ? 0.0
                      : static_cast<double>(report.num_correct) / report.num_gold;
  double pr = report.precision + report.recall;
  report.f1 = pr == 0.0 ? 0.0 : 2.0 * report.precision * report.recall / pr;
  for (auto& [k, cell] : report.by_event_type) finish_cell(cell);
  for (auto& [k, cell] : report.by_role) finish_cell(cell);
  return report;
}

ScoreReport aggregate_seeds(const std::vector<ScoreReport>& reports) {
  if (reports.empty())
    throw std::invalid_argument("aggregate_seeds: no reports given");
  ScoreReport mean;
  for (const auto& r : reports) {
    mean.precision += r.precision;
    mean.recall += r.recall;
    mean.f1 += r.f1;
    mean.num_gold += r.num_gold;
    mean.num_pred += r.num_pred;
    mean.num_correct += r.num_correct;
    for (const auto& [k, cell] : r.by_event_type) {
      auto& agg = mean.by_event_type[k];
      agg.num_gold += cell.num_gold;
      agg.num_pred += cell.num_pred;
      agg.num_correct += cell.num_correct;
    }
    for (const auto& [k, cell] : r.by_role) {
      auto& agg = mean.by_role[k];
      agg.num_gold += cell.num_gold;
      agg.num_pred += cell.num_pred;
      agg.num_correct += cell.num_correct;
    }
  }
  const double n = static_cast<double>(reports.size());
  mean.precision /= n;
  mean.recall /= n;
  mean.f1 /= n;
  for (auto& [k, cell] : mean.by_event_type) finish_cell(cell);
  for (auto& [k, cell] : mean.by_role) finish_cell(cell);
  mean.source_language = reports.front().source_language;
  mean.target_language = reports.front().target_language;
  return mean;
}

std::string report_to_text(const ScoreReport& r) {
  std::ostringstream out;
  if (!r.source_language.empty() || !r.target_language.empty())
    out << r.source_language << " => " << r.target_language << "\n";
  out << "argument classification\n";
  char line[160];
  std::snprintf(line, sizeof(line),
                "P %.4f  R %.4f  F1 %.4f  (gold %zu, pred %zu, correct %zu)\n",
                r.precision, r.recall, r.f1, r.num_gold, r.num_pred,
                r.num_correct);
  out << line;
  if (!r.by_event_type.empty()) {
    out << "per event type:\n";
    for (const auto& [k, c] : r.by_event_type) {
      std::snprintf(line, sizeof(line), "  %-28s P %.4f R %.4f F1 %.4f (g %zu p %zu c %zu)\n",
                    k.c_str(), c.precision, c.recall, c.f1, c.num_gold,
                    c.num_pred, c.num_correct);
      out << line;
    }
  }
  if (!r.by_role.empty()) {
    out << "per role:\n";
    for (const auto& [k, c] : r.by_role) {
      std::snprintf(line, sizeof(line), "  %-28s P %.4f R %.4f F1 %.4f (g %zu p %zu c %zu)\n",
                    k.c_str(), c.precision, c.recall, c.f1, c.num_gold,
                    c.num_pred, c.num_correct);
      out << line;
    }
  }
  return out.str();
}

std::string report_to_json_string(const ScoreReport& r) {
  nlohmann::json j;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["num_gold"] = r.num_gold;
  j["num_pred"] = r.num_pred;
  j["num_correct"] = r.num_correct;
  if (!r.source_language.empty()) j["source_language"] = r.source_language;
  if (!r.target_language.empty()) j["target_language"] = r.target_language;
  auto cells = [](const std::map<std::string, ScoreReport::Cell>& m) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [k, c] : m)
      out[k] = {{"precision", c.precision}, {"recall", c.recall},
                {"f1", c.f1},               {"num_gold", c.num_gold},
                {"num_pred", c.num_pred},   {"num_correct", c.num_correct}};
    return out;
  };
  j["by_event_type"] = cells(r.by_event_type);
  j["by_role"] = cells(r.by_role);
  return j.dump(2);
}

}  // namespace argen
