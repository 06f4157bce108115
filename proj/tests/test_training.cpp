#include <doctest.h>

#include <cmath>

#include "argen/checkpoint.hpp"
#include "argen/codec.hpp"
#include "argen/copy_model.hpp"
#include "argen/decoding.hpp"
#include "argen/ontology.hpp"
#include "argen/pipeline.hpp"
#include "argen/prompt.hpp"
#include "argen/synthetic.hpp"
#include "test_util.hpp"

using namespace argen;

namespace {

struct Fixture {
  EventOntology ontology;
  std::vector<TrainExample> dataset;
  std::vector<std::string> reserved;
};

// Tiny extraction task over a handful of hand-written instances.
Fixture overfit_fixture() {
  test::TempDir dir;
  Fixture fx;
  fx.ontology =
      load_ontology(dir.write("ont.tsv", "Hunt:Kill\tAgent,Victim\n"));
  auto inventory = special_token_inventory(fx.ontology);
  fx.reserved.assign(inventory.begin(), inventory.end());
  fx.reserved.push_back(kSepToken);

  EventTemplate tmpl =
      get_template(fx.ontology, "Hunt:Kill", TemplateStyle::special_tokens);
  auto add = [&](const std::string& text, const std::string& trigger,
                 const std::string& agent, const std::string& victim) {
    EventInstance inst;
    inst.text = text;
    inst.language = "en";
    inst.event_type = "Hunt:Kill";
    std::size_t tp = text.find(trigger);
    inst.trigger = {{tp, tp + trigger.size()}, trigger};
    std::size_t ap = text.find(agent);
    inst.arguments.push_back({{ap, ap + agent.size()}, agent, "Agent"});
    std::size_t vp = text.find(victim);
    inst.arguments.push_back({{vp, vp + victim.size()}, victim, "Victim"});
    TrainExample ex;
    ex.input = build_input(inst, tmpl, PromptConfig{});
    ex.target = encode_target(inst, tmpl);
    ex.language = "en";
    fx.dataset.push_back(std::move(ex));
  };
  add("the fox killed the hen", "killed", "fox", "hen");
  add("a wolf killed the lamb", "killed", "wolf", "lamb");
  add("the cat killed a mouse", "killed", "cat", "mouse");
  return fx;
}

TrainConfig overfit_config() {
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 1;
  cfg.learning_rate = 3e-3;
  cfg.seed = 13;
  cfg.bpe_merges = 80;
  cfg.transformer.d_model = 32;
  cfg.transformer.num_heads = 4;
  cfg.transformer.num_encoder_layers = 1;
  cfg.transformer.num_decoder_layers = 1;
  cfg.transformer.ffn_dim = 64;
  return cfg;
}

}  // namespace

TEST_CASE("single-instance overfit reaches tiny loss and regenerates verbatim") {
  Fixture fx = overfit_fixture();
  std::vector<TrainExample> one{fx.dataset.front()};

  TrainConfig cfg = overfit_config();
  cfg.reserved_tokens = fx.reserved;
  TrainResult result = train(one, cfg);

  REQUIRE(result.epoch_mean_nll.size() == 200);
  CHECK(result.epoch_mean_nll.back() < 0.01);

  DecodeConfig decode;
  decode.max_len = 32;
  GenerateResult out =
      generate(*result.model, result.tokenizer, one[0].input, decode);
  CHECK(out.text == one[0].target);
  CHECK_FALSE(out.truncated);
}

TEST_CASE("fifty synthetic instances, sixty epochs: loss under 0.05") {
  SyntheticConfig scfg;
  scfg.num_event_types = 2;
  scfg.roles_per_type = 2;
  scfg.vocab_size_per_language = 30;
  scfg.num_train_instances = 50;
  scfg.num_test_instances = 5;
  scfg.seed = 91;
  SyntheticCorpus corpus = generate_corpus(scfg);

  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.batch_size = 8;
  cfg.learning_rate = 1e-3;
  cfg.seed = 9;
  cfg.bpe_merges = 1200;
  cfg.reserved_tokens = reserved_tokens_for(corpus.ontology, EventTypeMode::none);
  cfg.extra_tokenizer_corpus = corpus.tokenizer_corpus;

  auto examples = build_training_examples(
      corpus.train, corpus.ontology, TemplateStyle::special_tokens, {},
      PromptConfig{});
  TrainResult result = train(examples, cfg);
  REQUIRE(result.epoch_mean_nll.size() == 60);
  CHECK(result.epoch_mean_nll.back() < 0.05);
}

TEST_CASE("loss decreases monotonically-ish while overfitting") {
  Fixture fx = overfit_fixture();
  std::vector<TrainExample> one{fx.dataset.front()};
  TrainConfig cfg = overfit_config();
  cfg.epochs = 60;
  cfg.reserved_tokens = fx.reserved;
  TrainResult result = train(one, cfg);
  // smoke: final much smaller than initial, and the curve trends down
  CHECK(result.epoch_mean_nll.back() < 0.2 * result.epoch_mean_nll.front());
}

TEST_CASE("identical seeds give bitwise-identical loss curves") {
  Fixture fx = overfit_fixture();
  TrainConfig cfg = overfit_config();
  cfg.epochs = 6;
  cfg.reserved_tokens = fx.reserved;
  TrainResult a = train(fx.dataset, cfg);
  TrainResult b = train(fx.dataset, cfg);
  REQUIRE(a.epoch_mean_nll.size() == b.epoch_mean_nll.size());
  for (std::size_t i = 0; i < a.epoch_mean_nll.size(); ++i)
    CHECK(a.epoch_mean_nll[i] == b.epoch_mean_nll[i]);

  cfg.seed = 14;
  TrainResult c = train(fx.dataset, cfg);
  CHECK(c.epoch_mean_nll.back() != a.epoch_mean_nll.back());
}

TEST_CASE("train rejects empty datasets and unregistered target tokens") {
  TrainConfig cfg = overfit_config();
  CHECK_THROWS(train({}, cfg));

  // with a preset tokenizer, a target token outside its vocabulary is an error
  Fixture fx = overfit_fixture();
  TrainConfig preset_cfg = overfit_config();
  preset_cfg.epochs = 1;
  preset_cfg.reserved_tokens = fx.reserved;
  std::vector<std::string> corpus;
  for (const auto& ex : fx.dataset) {
    corpus.push_back(ex.input.text);
    corpus.push_back(ex.target);
  }
  preset_cfg.preset_tokenizer = std::make_shared<BpeTokenizer>(
      BpeTokenizer::train(corpus, 80, fx.reserved));

  std::vector<TrainExample> bad{fx.dataset.front()};
  bad[0].target += " \xe6\x88\x98";  // codepoint the tokenizer never saw
  CHECK_THROWS(train(bad, preset_cfg));
}

TEST_CASE("copy-disabled model degenerates to the backend distribution") {
  Fixture fx = overfit_fixture();
  TrainConfig cfg = overfit_config();
  cfg.epochs = 1;
  cfg.use_copy = false;
  cfg.reserved_tokens = fx.reserved;
  TrainResult result = train(fx.dataset, cfg);
  CHECK_FALSE(result.model->use_copy());

  std::vector<int> ids = result.tokenizer.encode(fx.dataset[0].input.text);
  auto ctx = result.model->backend().encode(ids);
  auto state = result.model->backend().new_decoder_state(*ctx);
  StepOutput step = result.model->backend().decode_step(*ctx, *state,
                                                        result.tokenizer.pad_id());
  StepDistribution sd = result.model->step_distribution(step, ids);
  CHECK(sd.w_copy == 0.0);
  CHECK((sd.p_mix - sd.p_gen).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forcing the copy gate high keeps generation inside the input") {
  // untrained model, gate bias pushed to +20: w_copy ~ 1, so every content
  // token must come from the input token set
  TransformerConfig tcfg;
  tcfg.vocab_size = 0;  // filled below
  BpeTokenizer tok = BpeTokenizer::train(
      {"aa bb cc dd ee ff gg hh"}, 30, {"</s>", "<SEP>"});
  tcfg.vocab_size = tok.vocab_size();
  tcfg.d_model = 16;
  tcfg.num_heads = 2;
  tcfg.num_encoder_layers = 1;
  tcfg.num_decoder_layers = 1;
  tcfg.ffn_dim = 32;
  tcfg.init_seed = 3;
  CopyModel model(tcfg, true);
  model.params().get("copy_gate.b").mutable_value()(0, 0) = 20.0;

  std::vector<int> input = tok.encode("aa bb cc <SEP> dd");
  GenerateResult out = greedy_decode(model, tok, input, tok.pad_id(), 12);
  std::set<int> input_set(input.begin(), input.end());
  for (int id : out.token_ids) CHECK(input_set.count(id) == 1);
}

TEST_CASE("template specials stay disjoint from the learned subword vocabulary") {
  Fixture fx = overfit_fixture();
  TrainConfig cfg = overfit_config();
  cfg.epochs = 1;
  cfg.bpe_merges = 500;
  cfg.reserved_tokens = fx.reserved;
  TrainResult result = train(fx.dataset, cfg);
  auto inventory = special_token_inventory(fx.ontology);
  const BpeTokenizer& tok = result.tokenizer;
  for (int id = 0; id < tok.vocab_size(); ++id) {
    if (tok.is_reserved(id)) continue;
    CHECK(inventory.count(tok.token_of(id)) == 0);
  }
  // every inventory token is registered and atomic
  for (const auto& special : inventory) {
    int id = tok.id_of(special);
    REQUIRE(id >= 0);
    CHECK(tok.is_reserved(id));
  }
}

TEST_CASE("per-language start tokens are registered and used") {
  Fixture fx = overfit_fixture();
  TrainConfig cfg = overfit_config();
  cfg.epochs = 1;
  cfg.start_token_mode = StartTokenMode::per_language;
  cfg.reserved_tokens = fx.reserved;
  TrainResult result = train(fx.dataset, cfg);
  CHECK(result.tokenizer.id_of(language_start_token("en")) >= 0);

  // generation accepts the mode: registered language uses its start token,
  // an unseen language falls back to the padding start
  DecodeConfig decode;
  decode.max_len = 8;
  GenerateResult seen =
      generate(*result.model, result.tokenizer, fx.dataset[0].input, decode,
               "en", StartTokenMode::per_language);
  GenerateResult unseen =
      generate(*result.model, result.tokenizer, fx.dataset[0].input, decode,
               "xx", StartTokenMode::per_language);
  GenerateResult shared =
      generate(*result.model, result.tokenizer, fx.dataset[0].input, decode,
               "xx", StartTokenMode::shared);
  CHECK(unseen.token_ids == shared.token_ids);  // fallback is the shared start
  CHECK(seen.token_ids.size() <= 8);
}
