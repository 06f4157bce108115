#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "argen/backend.hpp"
#include "argen/ontology.hpp"
#include "argen/prompt.hpp"
#include "argen/tokenizer.hpp"

namespace argen {

/// Per-decoding-step probability pieces of the copy mixture.
struct StepDistribution {
  Eigen::VectorXd p_gen;
  Eigen::VectorXd p_copy;
  double w_copy = 0.0;
  Eigen::VectorXd p_mix;
};

struct TrainingLoss {
  double value = 0.0;                    // sum of per_step
  std::vector<double> per_step;          // -log p_mix[gold token]
  std::vector<std::size_t> floored_steps;  // steps where the 1e-12 floor fired
};

// ---- copy-mixture primitives ------------------------------------------------

/// sigmoid(weight . hidden + bias); throws on dimension mismatch.
double copy_gate(const Eigen::VectorXd& decoder_hidden,
                 const Eigen::VectorXd& weight, double bias);

/// p_copy[v] = sum of attention over input positions holding token v.
/// Attention must be normalized within 1e-6 and aligned with input_ids.
Eigen::VectorXd copy_distribution(const Eigen::VectorXd& attention,
                                  const std::vector<int>& input_ids,
                                  int vocab_size);

/// Elementwise convex combination w*p_copy + (1-w)*p_gen; validates that both
/// inputs are normalized within 1e-6 and 0 <= w <= 1.
Eigen::VectorXd mix_distributions(const Eigen::VectorXd& p_gen,
                                  const Eigen::VectorXd& p_copy, double w_copy);

/// Token-level negative log-likelihood of the gold sequence under the mixed
/// distributions, with a 1e-12 floor inside the log; floored steps are
/// reported, never silently dropped.
TrainingLoss nll_loss(const std::vector<StepDistribution>& steps,
                      const std::vector<int>& gold);

// ---- model -----------------------------------------------------------------

enum class StartTokenMode { shared, per_language };

const char* to_string(StartTokenMode m);
std::optional<StartTokenMode> start_token_mode_from_string(const std::string& s);

/// Reserved start token for per_language mode, e.g. "<start:zh>".
std::string language_start_token(const std::string& language);

/// Generative backend augmented with the copy gate. Owns the parameter store
/// shared by the backend and the gate.
class CopyModel {
 public:
  CopyModel(TransformerConfig config, bool use_copy);
  CopyModel(const CopyModel&) = delete;
  CopyModel& operator=(const CopyModel&) = delete;

  const ToyTransformer& backend() const { return *backend_; }
  ad::ParameterStore& params() { return store_; }
  const ad::ParameterStore& params() const { return store_; }
  const TransformerConfig& config() const { return backend_->config(); }
  bool use_copy() const { return use_copy_; }

  /// Teacher-forced loss graph over one example: sum over steps of
  /// -log p_mix[gold]. `floored` (optional) counts steps whose gold
  /// probability fell below the 1e-12 floor.
  ad::Var loss_graph(const std::vector<int>& input_ids,
                     const std::vector<int>& target_ids, int start_id,
                     std::size_t* floored = nullptr) const;

  /// Assembles the copy mixture for one inference step. With use_copy off
  /// the mixture degenerates to p_gen (w_copy = 0, p_copy := p_gen).
  /// `masked_logits`, when given, replaces the raw backend logits in the
  /// generation pathway (constrained decoding).
  StepDistribution step_distribution(
      const StepOutput& step, const std::vector<int>& input_ids,
      const Eigen::RowVectorXd* masked_logits = nullptr) const;

 private:
  ad::ParameterStore store_;
  std::unique_ptr<ToyTransformer> backend_;
  ad::Var gate_weight_, gate_bias_;
  bool use_copy_ = true;
};

// ---- training ----------------------------------------------------------------

struct TrainExample {
  ModelInput input;
  std::string target;
  std::string language;  // used only in per_language start-token mode
};

struct TrainConfig {
  int epochs = 60;
  int batch_size = 8;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
  bool use_copy = true;
  StartTokenMode start_token_mode = StartTokenMode::shared;
  std::size_t bpe_merges = 400;
  TransformerConfig transformer;  // vocab_size is filled from the tokenizer

  // Metadata frozen into the checkpoint.
  TemplateStyle template_style = TemplateStyle::special_tokens;
  EventTypeMode event_type_mode = EventTypeMode::none;
  std::optional<std::uint64_t> role_order_seed;

  // Tokenizer construction inputs: reserved tokens must cover every special
  // token appearing in prompts and targets. The extra corpus mirrors
  // multilingual pretraining: subword coverage of languages the task
  // training set never shows.
  std::vector<std::string> reserved_tokens;
  std::vector<std::string> extra_tokenizer_corpus;

  // When set, reuse this tokenizer instead of training one (e.g. to share a
  // vocabulary across ablation arms). Targets must tokenize without <UNK>.
  std::shared_ptr<const BpeTokenizer> preset_tokenizer;
};

struct TrainResult {
  BpeTokenizer tokenizer;
  std::vector<double> epoch_mean_nll;  // per-token mean NLL per epoch
  std::size_t floored_steps = 0;
  std::unique_ptr<CopyModel> model;
};

/// Trains backend + gate end to end; deterministic given config.seed.
TrainResult train(const std::vector<TrainExample>& dataset, TrainConfig config);

// ---- generation ----------------------------------------------------------------

struct DecodeConfig {
  int beam_width = 1;
  int max_len = 96;
  bool constrained = false;
};

struct GenerateResult {
  std::vector<int> token_ids;  // content tokens, start/EOS excluded
  std::string text;
  bool truncated = false;  // max_len reached before EOS
  double score = 0.0;      // length-normalized cumulative log p_mix
};

/// Greedy decoding (argmax of p_mix each step); the width-1 reference that
/// beam_search must match bitwise.
GenerateResult greedy_decode(const CopyModel& model, const BpeTokenizer& tokenizer,
                             const std::vector<int>& input_ids, int start_id,
                             int max_len,
                             const struct AllowedSet* constraint = nullptr,
                             std::vector<StepDistribution>* trace = nullptr);

/// Generates the output string for one model input; dispatches to greedy or
/// beam search per config and applies the input-token constraint when asked.
GenerateResult generate(const CopyModel& model, const BpeTokenizer& tokenizer,
                        const ModelInput& input, const DecodeConfig& config,
                        const std::string& language = "",
                        StartTokenMode start_mode = StartTokenMode::shared,
                        std::vector<StepDistribution>* trace = nullptr);

}  // namespace argen
