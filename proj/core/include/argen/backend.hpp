#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "argen/autograd.hpp"

namespace argen {

/// Immutable per-input state produced by a backend's encoder.
struct EncoderContext {
  std::vector<int> input_ids;
  virtual ~EncoderContext() = default;
};

/// Per-hypothesis incremental decoding state. clone() forks it when beam
/// search branches a hypothesis.
class DecoderState {
 public:
  virtual ~DecoderState() = default;
  virtual std::unique_ptr<DecoderState> clone() const = 0;
  virtual int length() const = 0;
};

/// Outputs of one decoder step.
struct StepOutput {
  Eigen::RowVectorXd logits;           // vocab
  Eigen::RowVectorXd cross_attention;  // input positions; nonneg, sums to 1
  Eigen::RowVectorXd hidden;           // decoder hidden state at this step
};

/// Generation contract any encoder-decoder backend can satisfy. decode_step
/// is deterministic given the context and the sequence of appended tokens.
class GenerativeBackend {
 public:
  virtual ~GenerativeBackend() = default;
  virtual int vocab_size() const = 0;
  virtual std::shared_ptr<const EncoderContext> encode(
      const std::vector<int>& input_ids) const = 0;
  virtual std::unique_ptr<DecoderState> new_decoder_state(
      const EncoderContext& ctx) const = 0;
  /// Appends `next_token` to the state and returns the outputs at the new
  /// last position.
  virtual StepOutput decode_step(const EncoderContext& ctx, DecoderState& state,
                                 int next_token) const = 0;
};

struct TransformerConfig {
  int vocab_size = 0;
  int d_model = 64;
  int num_heads = 4;
  int num_encoder_layers = 2;
  int num_decoder_layers = 2;
  int ffn_dim = 128;
  int max_source_positions = 256;
  int max_target_positions = 128;
  std::uint64_t init_seed = 0;
};

/// Desk-scale reference encoder-decoder transformer (pre-norm, learned
/// positions). Doubles as the trainable backend: the autograd path
/// (encode_train / decode_train) and the cached inference path
/// (encode / decode_step) share one parameter store and are tested to agree.
class ToyTransformer final : public GenerativeBackend {
 public:
  /// Registers all parameters into `store` (owned by the caller) with
  /// deterministic seeded init, or reuses them if already present.
  ToyTransformer(TransformerConfig config, ad::ParameterStore& store);

  const TransformerConfig& config() const { return config_; }

  // ---- training path (autograd) ----
  ad::Var encode_train(const std::vector<int>& input_ids) const;

  struct TrainDecode {
    ad::Var logits;           // T x vocab
    ad::Var cross_attention;  // T x S, mean over heads of the last layer
    ad::Var hidden;           // T x d_model
  };
  TrainDecode decode_train(const ad::Var& encoded,
                           const std::vector<int>& prefix_ids) const;

  // ---- inference path (plain values, KV-cached) ----
  int vocab_size() const override { return config_.vocab_size; }
  std::shared_ptr<const EncoderContext> encode(
      const std::vector<int>& input_ids) const override;
  std::unique_ptr<DecoderState> new_decoder_state(
      const EncoderContext& ctx) const override;
  StepOutput decode_step(const EncoderContext& ctx, DecoderState& state,
                         int next_token) const override;

 private:
  struct LnParams {
    ad::Var gain, bias;
  };
  struct AttnParams {
    std::vector<ad::Var> wq, wk, wv, wo;  // per head
    ad::Var bias_out;
  };
  struct FfnParams {
    ad::Var w1, b1, w2, b2;
  };
  struct EncoderLayer {
    LnParams ln1;
    AttnParams attn;
    LnParams ln2;
    FfnParams ffn;
  };
  struct DecoderLayer {
    LnParams ln1;
    AttnParams self_attn;
    LnParams ln2;
    AttnParams cross_attn;
    LnParams ln3;
    FfnParams ffn;
  };

  ad::Var attention_block(const ad::Var& queries_in, const ad::Var& keys_in,
                          const AttnParams& p, const ad::Matrix* mask,
                          ad::Var* mean_attention) const;
  ad::Var ffn_block(const ad::Var& x, const FfnParams& p) const;

  TransformerConfig config_;
  ad::ParameterStore& store_;
  int head_dim_ = 0;

  ad::Var tok_embed_, pos_src_, pos_tgt_;
  std::vector<EncoderLayer> enc_layers_;
  std::vector<DecoderLayer> dec_layers_;
  LnParams enc_final_, dec_final_;
  ad::Var out_w_, out_b_;
};

}  // namespace argen
