#include "argen/analysis.hpp"

#include <sstream>
#include <stdexcept>

namespace argen {

const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::both_wrong: return "both_wrong";
    case ErrorCategory::over_generating: return "over_generating";
    case ErrorCategory::wrong_language: return "wrong_language";
    case ErrorCategory::not_in_passage: return "not_in_passage";
    case ErrorCategory::unresolved_other: return "unresolved_other";
  }
  return "?";
}

std::optional<ErrorCategory> error_category_from_string(const std::string& s) {
  if (s == "both_wrong") return ErrorCategory::both_wrong;
  if (s == "over_generating") return ErrorCategory::over_generating;
  if (s == "wrong_language") return ErrorCategory::wrong_language;
  if (s == "not_in_passage") return ErrorCategory::not_in_passage;
  if (s == "unresolved_other") return ErrorCategory::unresolved_other;
  return std::nullopt;
}

bool prediction_correct(const ArgumentPrediction& pred,
                        const std::vector<Argument>& gold_arguments) {
  if (!pred.span) return false;
  for (const auto& gold : gold_arguments)
    if (gold.span == *pred.span && gold.role == pred.role) return true;
  return false;
}

ErrorTag classify_error(const ArgumentPrediction& pred,
                        const std::vector<Argument>& gold_arguments,
                        const EventInstance& instance,
                        const std::optional<ArgumentPrediction>& reference_pred) {
  if (reference_pred && reference_pred->role == pred.role &&
      reference_pred->text == pred.text) {
    return {ErrorCategory::both_wrong,
            "monolingual reference predicted the same '" + pred.text + "'"};
  }

  for (const auto& gold : gold_arguments) {
    if (gold.role == pred.role && pred.text != gold.text &&
        pred.text.find(gold.text) != std::string::npos) {
      return {ErrorCategory::over_generating,
              "prediction '" + pred.text + "' contains gold '" + gold.text + "'"};
    }
  }

  Script pred_script = dominant_script(pred.text);
  Script passage_script = dominant_script(instance.text);
  if (pred_script != Script::other && pred_script != passage_script) {
    return {ErrorCategory::wrong_language,
            std::string("prediction script ") + to_string(pred_script) +
                " vs passage " + to_string(passage_script)};
  }

  if (instance.text.find(pred.text) == std::string::npos) {
    return {ErrorCategory::not_in_passage,
            "'" + pred.text + "' does not occur in the passage"};
  }

  return {ErrorCategory::unresolved_other, "needs human judgment"};
}

double ErrorDistribution::fraction(ErrorCategory c) const {
  if (total == 0) return 0.0;
  auto it = counts.find(c);
  return it == counts.end()
             ? 0.0
             : static_cast<double>(it->second) / static_cast<double>(total);
}

ErrorDistribution error_report(const std::vector<ArgumentPrediction>& failed_preds,
                               const std::vector<ErrorTag>& tags) {
  if (failed_preds.size() != tags.size())
    throw std::invalid_argument("error_report: " +
                                std::to_string(failed_preds.size()) +
                                " predictions vs " + std::to_string(tags.size()) +
                                " tags");
  ErrorDistribution dist;
  dist.total = tags.size();
  for (const auto& tag : tags) dist.counts[tag.category]++;
  return dist;
}

std::string error_report_to_text(const ErrorDistribution& dist) {
  std::ostringstream out;
  out << "error distribution over " << dist.total << " failed predictions\n";
  out << "(label-disagreement and grammar-difference cases need human "
         "judgment and are folded into unresolved_other)\n";
  for (const auto& [category, count] : dist.counts) {
    char line[96];
    std::snprintf(line, sizeof(line), "  %-18s %6zu  %.4f\n", to_string(category),
                  count, dist.fraction(category));
    out << line;
  }
  return out.str();
}

}  // namespace argen
