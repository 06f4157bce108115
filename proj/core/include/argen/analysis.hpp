#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "argen/types.hpp"
#include "argen/unicode.hpp"

namespace argen {

enum class ErrorCategory {
  both_wrong,       // the monolingual reference made the same wrong call
  over_generating,  // prediction strictly contains a gold argument, same role
  wrong_language,   // prediction's dominant script differs from the passage's
  not_in_passage,   // prediction is not a substring of the passage
  unresolved_other  // everything needing human judgment
};

const char* to_string(ErrorCategory c);
std::optional<ErrorCategory> error_category_from_string(const std::string& s);

struct ErrorTag {
  ErrorCategory category = ErrorCategory::unresolved_other;
  std::string evidence;
};

/// True when the prediction exactly matches a gold (span, role) pair.
bool prediction_correct(const ArgumentPrediction& pred,
                        const std::vector<Argument>& gold_arguments);

/// Tags one failed prediction, first matching rule wins:
///   both_wrong > over_generating > wrong_language > not_in_passage > other.
/// Label-disagreement and grammar-difference failures require human judgment
/// and land in unresolved_other.
ErrorTag classify_error(
    const ArgumentPrediction& pred, const std::vector<Argument>& gold_arguments,
    const EventInstance& instance,
    const std::optional<ArgumentPrediction>& reference_pred = std::nullopt);

/// Category -> (count, fraction); counts always sum to the total.
struct ErrorDistribution {
  std::map<ErrorCategory, std::size_t> counts;
  std::size_t total = 0;

  double fraction(ErrorCategory c) const;
};

ErrorDistribution error_report(const std::vector<ArgumentPrediction>& failed_preds,
                               const std::vector<ErrorTag>& tags);

std::string error_report_to_text(const ErrorDistribution& dist);

}  // namespace argen
