#pragma once

#include <optional>
#include <string>
#include <vector>

#include "argen/checkpoint.hpp"
#include "argen/copy_model.hpp"
#include "argen/dataset.hpp"
#include "argen/decoding.hpp"
#include "argen/evaluator.hpp"

namespace argen {

/// Reserved tokens a training run must register: the ontology's special-token
/// inventory, the prompt separator, and (in special_tokens mode) one token
/// per event type.
std::vector<std::string> reserved_tokens_for(const EventOntology& ontology,
                                             EventTypeMode event_type_mode);

/// Builds (prompt, target) pairs for every instance of the split.
std::vector<TrainExample> build_training_examples(
    const DatasetSplit& split, const EventOntology& ontology,
    TemplateStyle style, std::optional<std::uint64_t> role_order_seed,
    const PromptConfig& prompt_config);

struct PredictOptions {
  DecodeConfig decode;
  TranslationTable translation_table;  // translated_tokens mode only
  std::size_t split_max_tokens = 0;    // 0 = no long-sentence splitting
  bool collect_traces = false;         // per-step distributions (greedy only)
};

struct PredictOutput {
  std::vector<InstancePredictions> predictions;
  std::size_t truncated_count = 0;
  std::vector<std::vector<StepDistribution>> traces;  // when collected
  std::vector<std::vector<int>> generated_ids;        // per instance
  std::vector<std::vector<int>> input_token_ids;      // per instance
  std::vector<std::string> generated_texts;
};

/// Runs the full generation pipeline over a split: template and prompt per
/// the checkpoint's configuration, constrained/beam decoding per options,
/// rule-based parsing, and offset resolution. With split_max_tokens > 0,
/// long sentences are split first and predictions merged back.
PredictOutput predict_split(const CopyModel& model, const Checkpoint& checkpoint,
                            const DatasetSplit& split,
                            const EventOntology& ontology,
                            const PredictOptions& options);

}  // namespace argen
