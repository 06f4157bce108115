#include "argen/copy_model.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "argen/decoding.hpp"

namespace argen {

using ad::Matrix;
using ad::Var;

namespace {

constexpr double kProbTolerance = 1e-6;
constexpr double kLogFloor = 1e-12;

void check_normalized(const Eigen::VectorXd& p, const char* what) {
  if (std::abs(p.sum() - 1.0) > kProbTolerance)
    throw std::invalid_argument(std::string(what) + ": not normalized (sum=" +
                                std::to_string(p.sum()) + ")");
}

Eigen::VectorXd softmax_vector(const Eigen::RowVectorXd& logits) {
  Eigen::VectorXd p = logits.transpose();
  double mx = p.maxCoeff();
  p = (p.array() - mx).exp();
  return p / p.sum();
}

}  // namespace

double copy_gate(const Eigen::VectorXd& decoder_hidden,
                 const Eigen::VectorXd& weight, double bias) {
  if (decoder_hidden.size() != weight.size())
    throw std::invalid_argument("copy_gate: hidden dim " +
                                std::to_string(decoder_hidden.size()) +
                                " vs weight dim " + std::to_string(weight.size()));
  double z = decoder_hidden.dot(weight) + bias;
  return 1.0 / (1.0 + std::exp(-z));
}

Eigen::VectorXd copy_distribution(const Eigen::VectorXd& attention,
                                  const std::vector<int>& input_ids,
                                  int vocab_size) {
  if (attention.size() != static_cast<Eigen::Index>(input_ids.size()))
    throw std::invalid_argument("copy_distribution: attention length " +
                                std::to_string(attention.size()) + " vs " +
                                std::to_string(input_ids.size()) + " input ids");
  check_normalized(attention, "copy_distribution: attention");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(vocab_size);
  for (std::size_t j = 0; j < input_ids.size(); ++j) {
    int v = input_ids[j];
    if (v < 0 || v >= vocab_size)
      throw std::out_of_range("copy_distribution: token id " + std::to_string(v));
    p(v) += attention(static_cast<Eigen::Index>(j));
  }
  return p;
}

Eigen::VectorXd mix_distributions(const Eigen::VectorXd& p_gen,
                                  const Eigen::VectorXd& p_copy, double w_copy) {
  if (p_gen.size() != p_copy.size())
    throw std::invalid_argument("mix_distributions: size mismatch");
  check_normalized(p_gen, "mix_distributions: p_gen");
  check_normalized(p_copy, "mix_distributions: p_copy");
  if (w_copy < 0.0 || w_copy > 1.0)
    throw std::invalid_argument("mix_distributions: w_copy out of [0,1]");
  return w_copy * p_copy + (1.0 - w_copy) * p_gen;
}

TrainingLoss nll_loss(const std::vector<StepDistribution>& steps,
                      const std::vector<int>& gold) {
  if (steps.size() != gold.size())
    throw std::invalid_argument("nll_loss: " + std::to_string(steps.size()) +
                                " steps vs " + std::to_string(gold.size()) +
                                " gold tokens");
  TrainingLoss loss;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    int g = gold[i];
    if (g < 0 || g >= steps[i].p_mix.size())
      throw std::out_of_range("nll_loss: gold token " + std::to_string(g) +
                              " outside vocabulary");
    double p = steps[i].p_mix(g);
    if (p < kLogFloor) {
      loss.floored_steps.push_back(i);
      p = kLogFloor;
    }
    loss.per_step.push_back(-std::log(p));
    loss.value += loss.per_step.back();
  }
  return loss;
}

const char* to_string(StartTokenMode m) {
  return m == StartTokenMode::shared ? "shared" : "per_language";
}

std::optional<StartTokenMode> start_token_mode_from_string(const std::string& s) {
  if (s == "shared") return StartTokenMode::shared;
  if (s == "per_language") return StartTokenMode::per_language;
  return std::nullopt;
}

std::string language_start_token(const std::string& language) {
  return "<start:" + language + ">";
}

// ---- CopyModel --------------------------------------------------------------

CopyModel::CopyModel(TransformerConfig config, bool use_copy)
    : use_copy_(use_copy) {
  backend_ = std::make_unique<ToyTransformer>(config, store_);
  if (!store_.has("copy_gate.w")) {
    std::mt19937_64 rng(config.init_seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss(0.0, 0.02);
    Matrix w(config.d_model, 1);
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, 0) = gauss(rng);
    gate_weight_ = store_.add("copy_gate.w", std::move(w));
    gate_bias_ = store_.add("copy_gate.b", Matrix::Zero(1, 1));
  } else {
    gate_weight_ = store_.get("copy_gate.w");
    gate_bias_ = store_.get("copy_gate.b");
  }
}

Var CopyModel::loss_graph(const std::vector<int>& input_ids,
                          const std::vector<int>& target_ids, int start_id,
                          std::size_t* floored) const {
  if (target_ids.empty()) throw std::invalid_argument("loss_graph: empty target");
  std::vector<int> prefix;
  prefix.reserve(target_ids.size());
  prefix.push_back(start_id);
  prefix.insert(prefix.end(), target_ids.begin(), target_ids.end() - 1);

  Var encoded = backend_->encode_train(input_ids);
  auto dec = backend_->decode_train(encoded, prefix);
  Var p_gen = ad::softmax_rows(dec.logits);

  Var p_mix;
  if (use_copy_) {
    Var gate_lin = ad::add_rowvector(ad::matmul(dec.hidden, gate_weight_), gate_bias_);
    Var w = ad::sigmoid(gate_lin);  // T x 1
    Var p_copy = ad::scatter_cols(dec.cross_attention, input_ids,
                                  backend_->config().vocab_size);
    Var ones = Var::constant(Matrix::Ones(w.value().rows(), 1));
    p_mix = ad::add(ad::rowwise_scale(p_copy, w),
                    ad::rowwise_scale(p_gen, ad::sub(ones, w)));
  } else {
    p_mix = p_gen;
  }

  Var picked = ad::gather_cols_per_row(p_mix, target_ids);
  if (floored) {
    for (Eigen::Index i = 0; i < picked.value().rows(); ++i)
      if (picked.value()(i, 0) < kLogFloor) ++*floored;
  }
  return ad::scale(ad::sum_all(ad::log_elem(ad::add_scalar(picked, kLogFloor))),
                   -1.0);
}

StepDistribution CopyModel::step_distribution(
    const StepOutput& step, const std::vector<int>& input_ids,
    const Eigen::RowVectorXd* masked_logits) const {
  StepDistribution sd;
  sd.p_gen = softmax_vector(masked_logits ? *masked_logits : step.logits);
  if (use_copy_) {
    sd.w_copy = copy_gate(step.hidden.transpose(), gate_weight_.value().col(0),
                          gate_bias_.value()(0, 0));
    sd.p_copy = copy_distribution(step.cross_attention.transpose(), input_ids,
                                  backend_->config().vocab_size);
    sd.p_mix = mix_distributions(sd.p_gen, sd.p_copy, sd.w_copy);
  } else {
    sd.w_copy = 0.0;
    sd.p_copy = sd.p_gen;
    sd.p_mix = sd.p_gen;
  }
#ifndef NDEBUG
  assert(std::abs(sd.p_gen.sum() - 1.0) < kProbTolerance);
  assert(std::abs(sd.p_copy.sum() - 1.0) < kProbTolerance);
  assert(std::abs(sd.p_mix.sum() - 1.0) < kProbTolerance);
#endif
  return sd;
}

// ---- training ----------------------------------------------------------------

namespace {

void seeded_shuffle(std::vector<std::size_t>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
}

}  // namespace

TrainResult train(const std::vector<TrainExample>& dataset, TrainConfig config) {
  if (dataset.empty()) throw std::runtime_error("train: empty dataset");

  std::vector<std::string> corpus;
  corpus.reserve(dataset.size() * 2 + config.extra_tokenizer_corpus.size());
  for (const auto& ex : dataset) {
    corpus.push_back(ex.input.text);
    corpus.push_back(ex.target);
  }
  for (const auto& line : config.extra_tokenizer_corpus) corpus.push_back(line);

  std::vector<std::string> reserved = config.reserved_tokens;
  if (config.start_token_mode == StartTokenMode::per_language) {
    std::set<std::string> languages;
    for (const auto& ex : dataset) languages.insert(ex.language);
    for (const auto& lang : languages)
      reserved.push_back(language_start_token(lang));
  }

  TrainResult result;
  if (config.preset_tokenizer)
    result.tokenizer = *config.preset_tokenizer;
  else
    result.tokenizer = BpeTokenizer::train(corpus, config.bpe_merges, reserved);
  const auto& tokenizer = result.tokenizer;

  TransformerConfig tcfg = config.transformer;
  tcfg.vocab_size = tokenizer.vocab_size();
  tcfg.init_seed = config.seed;
  result.model = std::make_unique<CopyModel>(tcfg, config.use_copy);
  CopyModel& model = *result.model;

  struct Encoded {
    std::vector<int> input_ids;
    std::vector<int> target_ids;
    int start_id;
  };
  std::vector<Encoded> encoded;
  encoded.reserve(dataset.size());
  for (const auto& ex : dataset) {
    Encoded e;
    e.input_ids = tokenizer.encode(ex.input.text);
    e.target_ids = tokenizer.encode(ex.target);
    for (int id : e.target_ids)
      if (id == tokenizer.unk_id())
        throw std::runtime_error("train: target contains unregistered tokens: '" +
                                 ex.target + "'");
    e.target_ids.push_back(tokenizer.eos_id());
    if (static_cast<int>(e.input_ids.size()) > tcfg.max_source_positions)
      throw std::runtime_error("train: input exceeds max_source_positions");
    if (static_cast<int>(e.target_ids.size()) > tcfg.max_target_positions)
      throw std::runtime_error("train: target exceeds max_target_positions");
    e.start_id = tokenizer.pad_id();
    if (config.start_token_mode == StartTokenMode::per_language) {
      e.start_id = tokenizer.id_of(language_start_token(ex.language));
      if (e.start_id < 0)
        throw std::runtime_error("train: start token for language '" +
                                 ex.language + "' missing from the tokenizer");
    }
    encoded.push_back(std::move(e));
  }

  ad::AdamOptimizer optimizer(model.params(), config.learning_rate);
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(encoded.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const std::size_t batch_size =
      std::max<std::size_t>(1, static_cast<std::size_t>(config.batch_size));
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    seeded_shuffle(order, rng);
    double epoch_nll = 0.0;
    std::size_t epoch_tokens = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
      std::size_t end = std::min(order.size(), begin + batch_size);
      std::size_t batch_tokens = 0;
      for (std::size_t k = begin; k < end; ++k)
        batch_tokens += encoded[order[k]].target_ids.size();
      optimizer.zero_grad();
      for (std::size_t k = begin; k < end; ++k) {
        const Encoded& e = encoded[order[k]];
        Var loss = model.loss_graph(e.input_ids, e.target_ids, e.start_id,
                                    &result.floored_steps);
        epoch_nll += loss.value()(0, 0);
        ad::scale(loss, 1.0 / static_cast<double>(batch_tokens)).backward();
      }
      optimizer.step();
      epoch_tokens += batch_tokens;
    }
    result.epoch_mean_nll.push_back(epoch_nll / static_cast<double>(epoch_tokens));
  }
  return result;
}

// ---- generation ----------------------------------------------------------------

GenerateResult greedy_decode(const CopyModel& model, const BpeTokenizer& tokenizer,
                             const std::vector<int>& input_ids, int start_id,
                             int max_len, const AllowedSet* constraint,
                             std::vector<StepDistribution>* trace) {
  auto ctx = model.backend().encode(input_ids);
  auto state = model.backend().new_decoder_state(*ctx);

  GenerateResult result;
  result.truncated = true;
  double cumulative = 0.0;
  bool eos_emitted = false;
  int token = start_id;
  for (int step = 0; step < max_len; ++step) {
    StepOutput out = model.backend().decode_step(*ctx, *state, token);
    Eigen::RowVectorXd masked;
    if (constraint) masked = constrained_step(out.logits, *constraint);
    StepDistribution sd =
        model.step_distribution(out, input_ids, constraint ? &masked : nullptr);
    if (trace) trace->push_back(sd);
    Eigen::Index next = 0;
    sd.p_mix.maxCoeff(&next);
    cumulative += std::log(std::max(sd.p_mix(next), 1e-300));
    if (static_cast<int>(next) == tokenizer.eos_id()) {
      result.truncated = false;
      eos_emitted = true;
      break;
    }
    result.token_ids.push_back(static_cast<int>(next));
    token = static_cast<int>(next);
  }
  std::size_t length = result.token_ids.size() + (eos_emitted ? 1 : 0);
  result.score = cumulative / static_cast<double>(std::max<std::size_t>(1, length));
  result.text = tokenizer.decode(result.token_ids);
  return result;
}

GenerateResult generate(const CopyModel& model, const BpeTokenizer& tokenizer,
                        const ModelInput& input, const DecodeConfig& config,
                        const std::string& language, StartTokenMode start_mode,
                        std::vector<StepDistribution>* trace) {
  if (config.beam_width < 1)
    throw std::invalid_argument("generate: beam width must be >= 1");
  if (config.max_len < 1)
    throw std::invalid_argument("generate: max_len must be >= 1");

  std::vector<int> input_ids = tokenizer.encode(input.text);
  int start_id = tokenizer.pad_id();
  if (start_mode == StartTokenMode::per_language) {
    int lang_id = tokenizer.id_of(language_start_token(language));
    if (lang_id >= 0) start_id = lang_id;  // unseen language: padding start
  }

  std::optional<AllowedSet> allowed;
  if (config.constrained) {
    std::set<int> specials;
    for (const auto& tok : tokenizer.reserved_tokens())
      specials.insert(tokenizer.id_of(tok));
    allowed = allowed_token_set(input_ids, specials, tokenizer.eos_id(),
                                tokenizer.vocab_size());
  }

  if (config.beam_width == 1) {
    return greedy_decode(model, tokenizer, input_ids, start_id, config.max_len,
                         allowed ? &*allowed : nullptr, trace);
  }
  BeamResult beam =
      beam_search(model, input_ids, start_id, tokenizer.eos_id(),
                  config.beam_width, config.max_len, allowed ? &*allowed : nullptr);
  GenerateResult result;
  result.token_ids = beam.token_ids;
  result.truncated = beam.truncated;
  result.score = beam.normalized_score;
  result.text = tokenizer.decode(result.token_ids);
  return result;
}

}  // namespace argen
