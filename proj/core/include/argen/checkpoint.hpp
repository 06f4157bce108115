#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "argen/copy_model.hpp"

namespace argen {

/// Single-file model container: versioned header, tokenizer tables,
/// parameter tensors, and the prompt/template configuration the model was
/// trained with.
struct Checkpoint {
  static constexpr int kFormatVersion = 1;

  TransformerConfig transformer;
  bool use_copy = true;
  TemplateStyle template_style = TemplateStyle::special_tokens;
  EventTypeMode event_type_mode = EventTypeMode::none;
  StartTokenMode start_token_mode = StartTokenMode::shared;
  std::optional<std::uint64_t> role_order_seed;

  BpeTokenizer tokenizer;
  std::vector<std::pair<std::string, ad::Matrix>> tensors;
};

Checkpoint make_checkpoint(const CopyModel& model, const BpeTokenizer& tokenizer,
                           const TrainConfig& train_config);

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

/// Rebuilds a runnable model from the stored tensors.
std::unique_ptr<CopyModel> model_from_checkpoint(const Checkpoint& checkpoint);

}  // namespace argen
