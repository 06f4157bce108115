#include "argen/backend.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace argen {

using ad::Matrix;
using ad::Var;

namespace {

constexpr double kMaskValue = -1e30;
constexpr double kLnEps = 1e-5;

std::vector<int> iota_ids(std::size_t n) {
  std::vector<int> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<int>(i);
  return ids;
}

// ---- plain-value helpers shared by the inference path ----

Eigen::RowVectorXd ln_row(const Eigen::RowVectorXd& x, const Matrix& gain,
                          const Matrix& bias) {
  double mu = x.mean();
  double var = (x.array() - mu).square().mean();
  Eigen::RowVectorXd xhat = (x.array() - mu) / std::sqrt(var + kLnEps);
  return (xhat.array() * gain.row(0).array()) + bias.row(0).array();
}

Matrix ln_rows(const Matrix& x, const Matrix& gain, const Matrix& bias) {
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out.row(i) = ln_row(x.row(i), gain, bias);
  return out;
}

Eigen::RowVectorXd softmax_row(Eigen::RowVectorXd x) {
  double mx = x.maxCoeff();
  x = (x.array() - mx).exp();
  return x / x.sum();
}

double gelu_scalar(double x) {
  return 0.5 * x * (1.0 + std::erf(x * 0.7071067811865475244));
}

}  // namespace

ToyTransformer::ToyTransformer(TransformerConfig config, ad::ParameterStore& store)
    : config_(config), store_(store) {
  if (config_.vocab_size <= 0)
    throw std::invalid_argument("transformer: vocab_size must be positive");
  if (config_.d_model % config_.num_heads != 0)
    throw std::invalid_argument("transformer: d_model must divide by num_heads");
  head_dim_ = config_.d_model / config_.num_heads;

  std::mt19937_64 rng(config_.init_seed);
  std::normal_distribution<double> gauss(0.0, 0.02);

  auto ensure = [&](const std::string& name, int rows, int cols,
                    char kind) -> Var {
    if (store_.has(name)) return store_.get(name);
    Matrix m(rows, cols);
    switch (kind) {
      case 'g':  // gaussian
        for (Eigen::Index i = 0; i < m.rows(); ++i)
          for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = gauss(rng);
        break;
      case 'z': m.setZero(); break;
      case 'o': m.setOnes(); break;
    }
    return store_.add(name, std::move(m));
  };

  const int d = config_.d_model;
  auto make_ln = [&](const std::string& p) {
    return LnParams{ensure(p + ".g", 1, d, 'o'), ensure(p + ".b", 1, d, 'z')};
  };
  auto make_attn = [&](const std::string& p) {
    AttnParams a;
    for (int h = 0; h < config_.num_heads; ++h) {
      std::string s = std::to_string(h);
      a.wq.push_back(ensure(p + ".wq" + s, d, head_dim_, 'g'));
      a.wk.push_back(ensure(p + ".wk" + s, d, head_dim_, 'g'));
      a.wv.push_back(ensure(p + ".wv" + s, d, head_dim_, 'g'));
      a.wo.push_back(ensure(p + ".wo" + s, head_dim_, d, 'g'));
    }
    a.bias_out = ensure(p + ".bo", 1, d, 'z');
    return a;
  };
  auto make_ffn = [&](const std::string& p) {
    return FfnParams{ensure(p + ".w1", d, config_.ffn_dim, 'g'),
                     ensure(p + ".b1", 1, config_.ffn_dim, 'z'),
                     ensure(p + ".w2", config_.ffn_dim, d, 'g'),
                     ensure(p + ".b2", 1, d, 'z')};
  };

  tok_embed_ = ensure("tok_embed", config_.vocab_size, d, 'g');
  pos_src_ = ensure("pos_src", config_.max_source_positions, d, 'g');
  pos_tgt_ = ensure("pos_tgt", config_.max_target_positions, d, 'g');

  for (int l = 0; l < config_.num_encoder_layers; ++l) {
    std::string p = "enc" + std::to_string(l);
    enc_layers_.push_back({make_ln(p + ".ln1"), make_attn(p + ".attn"),
                           make_ln(p + ".ln2"), make_ffn(p + ".ffn")});
  }
  enc_final_ = make_ln("enc.lnf");
  for (int l = 0; l < config_.num_decoder_layers; ++l) {
    std::string p = "dec" + std::to_string(l);
    dec_layers_.push_back({make_ln(p + ".ln1"), make_attn(p + ".self"),
                           make_ln(p + ".ln2"), make_attn(p + ".cross"),
                           make_ln(p + ".ln3"), make_ffn(p + ".ffn")});
  }
  dec_final_ = make_ln("dec.lnf");
  out_w_ = ensure("out.w", d, config_.vocab_size, 'g');
  out_b_ = ensure("out.b", 1, config_.vocab_size, 'z');
}

Var ToyTransformer::attention_block(const Var& queries_in, const Var& keys_in,
                                    const AttnParams& p, const Matrix* mask,
                                    Var* mean_attention) const {
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(head_dim_));
  Var out_sum;
  Var attn_sum;
  for (int h = 0; h < config_.num_heads; ++h) {
    Var q = ad::matmul(queries_in, p.wq[static_cast<std::size_t>(h)]);
    Var k = ad::matmul(keys_in, p.wk[static_cast<std::size_t>(h)]);
    Var v = ad::matmul(keys_in, p.wv[static_cast<std::size_t>(h)]);
    Var scores = ad::scale(ad::matmul(q, ad::transpose(k)), inv_sqrt_dh);
    if (mask) scores = ad::add(scores, Var::constant(*mask));
    Var probs = ad::softmax_rows(scores);
    if (mean_attention)
      attn_sum = attn_sum.defined() ? ad::add(attn_sum, probs) : probs;
    Var proj = ad::matmul(ad::matmul(probs, v), p.wo[static_cast<std::size_t>(h)]);
    out_sum = out_sum.defined() ? ad::add(out_sum, proj) : proj;
  }
  if (mean_attention)
    *mean_attention = ad::scale(attn_sum, 1.0 / config_.num_heads);
  return ad::add_rowvector(out_sum, p.bias_out);
}

Var ToyTransformer::ffn_block(const Var& x, const FfnParams& p) const {
  Var h = ad::gelu(ad::add_rowvector(ad::matmul(x, p.w1), p.b1));
  return ad::add_rowvector(ad::matmul(h, p.w2), p.b2);
}

Var ToyTransformer::encode_train(const std::vector<int>& input_ids) const {
  if (input_ids.empty()) throw std::invalid_argument("encode: empty input");
  if (static_cast<int>(input_ids.size()) > config_.max_source_positions)
    throw std::invalid_argument("encode: input longer than max_source_positions (" +
                                std::to_string(input_ids.size()) + ")");
  Var x = ad::add(ad::gather_rows(tok_embed_, input_ids),
                  ad::gather_rows(pos_src_, iota_ids(input_ids.size())));
  for (const auto& layer : enc_layers_) {
    Var h = ad::layer_norm_rows(x, layer.ln1.gain, layer.ln1.bias, kLnEps);
    x = ad::add(x, attention_block(h, h, layer.attn, nullptr, nullptr));
    h = ad::layer_norm_rows(x, layer.ln2.gain, layer.ln2.bias, kLnEps);
    x = ad::add(x, ffn_block(h, layer.ffn));
  }
  return ad::layer_norm_rows(x, enc_final_.gain, enc_final_.bias, kLnEps);
}

ToyTransformer::TrainDecode ToyTransformer::decode_train(
    const Var& encoded, const std::vector<int>& prefix_ids) const {
  if (prefix_ids.empty()) throw std::invalid_argument("decode: empty prefix");
  if (static_cast<int>(prefix_ids.size()) > config_.max_target_positions)
    throw std::invalid_argument("decode: prefix longer than max_target_positions (" +
                                std::to_string(prefix_ids.size()) + ")");
  const Eigen::Index t = static_cast<Eigen::Index>(prefix_ids.size());
  Matrix causal = Matrix::Zero(t, t);
  for (Eigen::Index i = 0; i < t; ++i)
    for (Eigen::Index j = i + 1; j < t; ++j) causal(i, j) = kMaskValue;

  Var x = ad::add(ad::gather_rows(tok_embed_, prefix_ids),
                  ad::gather_rows(pos_tgt_, iota_ids(prefix_ids.size())));
  Var cross_attention;
  for (std::size_t l = 0; l < dec_layers_.size(); ++l) {
    const auto& layer = dec_layers_[l];
    bool last = l + 1 == dec_layers_.size();
    Var h = ad::layer_norm_rows(x, layer.ln1.gain, layer.ln1.bias, kLnEps);
    x = ad::add(x, attention_block(h, h, layer.self_attn, &causal, nullptr));
    h = ad::layer_norm_rows(x, layer.ln2.gain, layer.ln2.bias, kLnEps);
    x = ad::add(x, attention_block(h, encoded, layer.cross_attn, nullptr,
                                   last ? &cross_attention : nullptr));
    h = ad::layer_norm_rows(x, layer.ln3.gain, layer.ln3.bias, kLnEps);
    x = ad::add(x, ffn_block(h, layer.ffn));
  }
  Var hidden = ad::layer_norm_rows(x, dec_final_.gain, dec_final_.bias, kLnEps);
  Var logits = ad::add_rowvector(ad::matmul(hidden, out_w_), out_b_);
  return {logits, cross_attention, hidden};
}

// ---- inference path --------------------------------------------------------

namespace {

struct ToyEncoderContext final : EncoderContext {
  Matrix encoded;  // S x d
  // per decoder layer, per head: S x head_dim
  std::vector<std::vector<Matrix>> cross_k, cross_v;
};

struct ToyDecoderState final : DecoderState {
  // per decoder layer, per head: t x head_dim, grown one row per step
  std::vector<std::vector<Matrix>> k_self, v_self;
  int len = 0;

  std::unique_ptr<DecoderState> clone() const override {
    return std::make_unique<ToyDecoderState>(*this);
  }
  int length() const override { return len; }
};

}  // namespace

std::shared_ptr<const EncoderContext> ToyTransformer::encode(
    const std::vector<int>& input_ids) const {
  if (input_ids.empty()) throw std::invalid_argument("encode: empty input");
  if (static_cast<int>(input_ids.size()) > config_.max_source_positions)
    throw std::invalid_argument("encode: input longer than max_source_positions");
  const std::size_t n = input_ids.size();
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(head_dim_));

  Matrix x(n, config_.d_model);
  for (std::size_t i = 0; i < n; ++i)
    x.row(static_cast<Eigen::Index>(i)) =
        tok_embed_.value().row(input_ids[i]) +
        pos_src_.value().row(static_cast<Eigen::Index>(i));

  for (const auto& layer : enc_layers_) {
    Matrix h = ln_rows(x, layer.ln1.gain.value(), layer.ln1.bias.value());
    Matrix acc = Matrix::Zero(x.rows(), x.cols());
    for (int hd = 0; hd < config_.num_heads; ++hd) {
      const auto idx = static_cast<std::size_t>(hd);
      Matrix q = h * layer.attn.wq[idx].value();
      Matrix k = h * layer.attn.wk[idx].value();
      Matrix v = h * layer.attn.wv[idx].value();
      Matrix scores = q * k.transpose() * inv_sqrt_dh;
      Matrix probs(scores.rows(), scores.cols());
      for (Eigen::Index i = 0; i < scores.rows(); ++i)
        probs.row(i) = softmax_row(scores.row(i));
      acc += probs * v * layer.attn.wo[idx].value();
    }
    acc.rowwise() += layer.attn.bias_out.value().row(0);
    x += acc;
    h = ln_rows(x, layer.ln2.gain.value(), layer.ln2.bias.value());
    Matrix f = (h * layer.ffn.w1.value()).rowwise() + layer.ffn.b1.value().row(0);
    f = f.unaryExpr(&gelu_scalar);
    x += ((f * layer.ffn.w2.value()).rowwise() + layer.ffn.b2.value().row(0)).eval();
  }
  Matrix encoded = ln_rows(x, enc_final_.gain.value(), enc_final_.bias.value());

  auto ctx = std::make_shared<ToyEncoderContext>();
  ctx->input_ids = input_ids;
  for (const auto& layer : dec_layers_) {
    std::vector<Matrix> ks, vs;
    for (int hd = 0; hd < config_.num_heads; ++hd) {
      const auto idx = static_cast<std::size_t>(hd);
      ks.push_back(encoded * layer.cross_attn.wk[idx].value());
      vs.push_back(encoded * layer.cross_attn.wv[idx].value());
    }
    ctx->cross_k.push_back(std::move(ks));
    ctx->cross_v.push_back(std::move(vs));
  }
  ctx->encoded = std::move(encoded);
  return ctx;
}

std::unique_ptr<DecoderState> ToyTransformer::new_decoder_state(
    const EncoderContext&) const {
  auto state = std::make_unique<ToyDecoderState>();
  state->k_self.resize(dec_layers_.size());
  state->v_self.resize(dec_layers_.size());
  for (std::size_t l = 0; l < dec_layers_.size(); ++l) {
    state->k_self[l].assign(static_cast<std::size_t>(config_.num_heads),
                            Matrix(0, head_dim_));
    state->v_self[l].assign(static_cast<std::size_t>(config_.num_heads),
                            Matrix(0, head_dim_));
  }
  return state;
}

StepOutput ToyTransformer::decode_step(const EncoderContext& ctx_base,
                                       DecoderState& state_base,
                                       int next_token) const {
  const auto& ctx = dynamic_cast<const ToyEncoderContext&>(ctx_base);
  auto& state = dynamic_cast<ToyDecoderState&>(state_base);
  if (state.len >= config_.max_target_positions)
    throw std::runtime_error("decode_step: exceeded max_target_positions");
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(head_dim_));

  Eigen::RowVectorXd x = tok_embed_.value().row(next_token) +
                         pos_tgt_.value().row(state.len);
  Eigen::RowVectorXd cross_mean =
      Eigen::RowVectorXd::Zero(ctx.encoded.rows());

  for (std::size_t l = 0; l < dec_layers_.size(); ++l) {
    const auto& layer = dec_layers_[l];
    bool last = l + 1 == dec_layers_.size();

    Eigen::RowVectorXd h = ln_row(x, layer.ln1.gain.value(), layer.ln1.bias.value());
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(config_.d_model);
    for (int hd = 0; hd < config_.num_heads; ++hd) {
      const auto idx = static_cast<std::size_t>(hd);
      Eigen::RowVectorXd q = h * layer.self_attn.wq[idx].value();
      Eigen::RowVectorXd k = h * layer.self_attn.wk[idx].value();
      Eigen::RowVectorXd v = h * layer.self_attn.wv[idx].value();
      Matrix& kc = state.k_self[l][idx];
      Matrix& vc = state.v_self[l][idx];
      kc.conservativeResize(kc.rows() + 1, Eigen::NoChange);
      kc.row(kc.rows() - 1) = k;
      vc.conservativeResize(vc.rows() + 1, Eigen::NoChange);
      vc.row(vc.rows() - 1) = v;
      Eigen::RowVectorXd probs = softmax_row(q * kc.transpose() * inv_sqrt_dh);
      acc += probs * vc * layer.self_attn.wo[idx].value();
    }
    x += acc + layer.self_attn.bias_out.value().row(0);

    h = ln_row(x, layer.ln2.gain.value(), layer.ln2.bias.value());
    acc.setZero();
    for (int hd = 0; hd < config_.num_heads; ++hd) {
      const auto idx = static_cast<std::size_t>(hd);
      Eigen::RowVectorXd q = h * layer.cross_attn.wq[idx].value();
      Eigen::RowVectorXd probs =
          softmax_row(q * ctx.cross_k[l][idx].transpose() * inv_sqrt_dh);
      acc += probs * ctx.cross_v[l][idx] * layer.cross_attn.wo[idx].value();
      if (last) cross_mean += probs / config_.num_heads;
    }
    x += acc + layer.cross_attn.bias_out.value().row(0);

    h = ln_row(x, layer.ln3.gain.value(), layer.ln3.bias.value());
    Eigen::RowVectorXd f =
        (h * layer.ffn.w1.value() + layer.ffn.b1.value().row(0))
            .unaryExpr(&gelu_scalar);
    x += f * layer.ffn.w2.value() + layer.ffn.b2.value().row(0);
  }

  StepOutput out;
  out.hidden = ln_row(x, dec_final_.gain.value(), dec_final_.bias.value());
  out.logits = out.hidden * out_w_.value() + out_b_.value().row(0);
  out.cross_attention = cross_mean;
  state.len += 1;
  return out;
}

}  // namespace argen
