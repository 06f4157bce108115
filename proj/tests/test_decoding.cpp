#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "argen/decoding.hpp"

using namespace argen;

namespace {

TransformerConfig tiny_config(int vocab, std::uint64_t seed = 21) {
  TransformerConfig cfg;
  cfg.vocab_size = vocab;
  cfg.d_model = 16;
  cfg.num_heads = 2;
  cfg.num_encoder_layers = 1;
  cfg.num_decoder_layers = 1;
  cfg.ffn_dim = 32;
  cfg.max_source_positions = 48;
  cfg.max_target_positions = 48;
  cfg.init_seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("allowed_token_set is the exact union") {
  std::set<int> specials{4, 5, 6, 7, 9};  // 9 = EOS
  AllowedSet set = allowed_token_set({1, 2, 2, 1}, specials, 9, 12);
  CHECK(set.count() == 7);
  for (int id : {1, 2, 4, 5, 6, 7, 9}) CHECK(set.allows(id));
  for (int id : {0, 3, 8, 10, 11}) CHECK_FALSE(set.allows(id));

  // input already inside the specials: union collapses to the specials
  AllowedSet absorbed = allowed_token_set({4, 5}, specials, 9, 12);
  CHECK(absorbed.count() == specials.size());

  CHECK_THROWS(allowed_token_set({}, specials, 9, 12));
  CHECK_THROWS(allowed_token_set({1}, {}, 9, 12));
  CHECK_THROWS(allowed_token_set({1}, {4, 5}, 9, 12));  // EOS missing
}

TEST_CASE("constrained_step masks only disallowed entries") {
  AllowedSet set = allowed_token_set({1, 2}, {3, 4}, 4, 6);
  Eigen::RowVectorXd logits(6);
  logits << 10.0, 1.0, 2.0, 3.0, 4.0, 99.0;

  Eigen::RowVectorXd masked = constrained_step(logits, set);
  // all mass was on ids 0 and 5; the argmax moves into the allowed set
  Eigen::Index argmax;
  masked.maxCoeff(&argmax);
  CHECK(set.allows(static_cast<int>(argmax)));
  CHECK(masked(1) == 1.0);
  CHECK(masked(4) == 4.0);
  CHECK(std::isinf(masked(0)));
  CHECK(std::isinf(masked(5)));

  // allowed = full vocabulary: identity
  AllowedSet full = allowed_token_set({0, 1, 2, 5}, {3, 4}, 4, 6);
  CHECK((constrained_step(logits, full) - logits).cwiseAbs().maxCoeff() == 0.0);

  // two allowed tokens with equal logits split mass evenly after softmax
  Eigen::RowVectorXd equal(6);
  equal << 0.0, 2.0, 2.0, -50.0, -50.0, 0.0;
  Eigen::RowVectorXd m = constrained_step(equal, set);
  Eigen::VectorXd p = m.transpose();
  double mx = p.maxCoeff();
  p = (p.array() - mx).exp();
  p /= p.sum();
  CHECK(p(1) == doctest::Approx(p(2)));
}

TEST_CASE("beam width 1 equals greedy decoding bitwise") {
  for (std::uint64_t seed : {21ULL, 22ULL, 23ULL}) {
    CopyModel model(tiny_config(14, seed), true);
    // vocabulary must cover the model's id range so decode() stays in bounds
    BpeTokenizer tok =
        BpeTokenizer::train({"a b c d e f g h i j k l m n o p"}, 0, {"</s>"});
    REQUIRE(tok.vocab_size() >= 14);
    std::vector<int> input{3, 5, 7, 9};
    const int start = 0;
    const int max_len = 12;

    GenerateResult greedy;
    {
      // greedy_decode needs a tokenizer for text and EOS; build a minimal one
      // whose vocabulary is irrelevant for the id comparison
      greedy = greedy_decode(model, tok, input, start, max_len);
    }
    BeamResult beam = beam_search(model, input, start, tok.eos_id(), 1, max_len);
    CHECK(beam.token_ids == greedy.token_ids);
    CHECK(beam.truncated == greedy.truncated);
  }
}

TEST_CASE("constrained beam emits only allowed tokens") {
  CopyModel model(tiny_config(14), true);
  std::vector<int> input{3, 5, 7, 9};
  std::set<int> specials{1, 2, 13};
  AllowedSet allowed = allowed_token_set(input, specials, 13, 14);

  for (int width : {1, 3}) {
    BeamResult res =
        beam_search(model, input, 0, 13, width, 16, &allowed);
    for (int id : res.token_ids) CHECK(allowed.allows(id));
    for (const auto& hyp : res.finished) {
      CHECK(hyp.log_prob <= 0.0);
      for (int id : hyp.token_ids) CHECK(allowed.allows(id));
    }
  }
}

TEST_CASE("constraint removes out-of-input tokens the overfit model emits") {
  // a model overfit to emit a token that is absent from the probe input:
  // unconstrained decoding reproduces it, constrained decoding cannot
  TrainConfig cfg;
  cfg.epochs = 120;
  cfg.batch_size = 1;
  cfg.learning_rate = 3e-3;
  cfg.seed = 4;
  cfg.bpe_merges = 0;  // character-level, "zz" stays decomposable
  cfg.reserved_tokens = {"<SEP>", "</s>"};
  std::vector<TrainExample> dataset{
      {{"aa bb <SEP> cc", 0}, "zz", "en"},
  };
  TrainResult trained = train(dataset, cfg);
  const BpeTokenizer& tok = trained.tokenizer;

  std::vector<int> input = tok.encode("aa bb <SEP> cc");
  std::set<int> specials;
  for (const auto& t : tok.reserved_tokens()) specials.insert(tok.id_of(t));
  AllowedSet allowed =
      allowed_token_set(input, specials, tok.eos_id(), tok.vocab_size());

  BeamResult raw =
      beam_search(*trained.model, input, tok.pad_id(), tok.eos_id(), 2, 8);
  bool out_of_input = false;
  for (int id : raw.token_ids) out_of_input = out_of_input || !allowed.allows(id);
  CHECK(out_of_input);  // the overfit model does hallucinate "z"

  BeamResult constrained =
      beam_search(*trained.model, input, tok.pad_id(), tok.eos_id(), 2, 8, &allowed);
  for (int id : constrained.token_ids) CHECK(allowed.allows(id));
}

TEST_CASE("beam scores are non-positive and truncation is flagged") {
  CopyModel model(tiny_config(14), false);
  std::vector<int> input{3, 5};
  BeamResult res = beam_search(model, input, 0, 13, 2, 3);
  CHECK(res.normalized_score <= 0.0);
  // either some hypothesis finished with EOS, or the result says truncated
  CHECK(res.truncated == res.finished.empty());
  if (res.truncated) CHECK(res.token_ids.size() == 3);
}

TEST_CASE("beam rejects invalid configuration") {
  CopyModel model(tiny_config(14), true);
  CHECK_THROWS(beam_search(model, {1, 2}, 0, 13, 0, 5));
  CHECK_THROWS(beam_search(model, {1, 2}, 0, 13, 2, 0));
}
