#include <doctest.h>

#include <fstream>

#include "argen/checkpoint.hpp"
#include "test_util.hpp"

using namespace argen;

namespace {

TrainConfig tiny_train_config() {
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 2;
  cfg.learning_rate = 1e-3;
  cfg.seed = 5;
  cfg.bpe_merges = 40;
  cfg.transformer.d_model = 16;
  cfg.transformer.num_heads = 2;
  cfg.transformer.num_encoder_layers = 1;
  cfg.transformer.num_decoder_layers = 1;
  cfg.transformer.ffn_dim = 32;
  cfg.reserved_tokens = {"<SEP>", "<A>", "</A>", "[None]", "[and]", "</s>"};
  cfg.template_style = TemplateStyle::special_tokens;
  cfg.event_type_mode = EventTypeMode::none;
  cfg.role_order_seed = 11;
  return cfg;
}

std::vector<TrainExample> tiny_dataset() {
  return {
      {{"the fox ran <SEP> ran <SEP> <A> [None] </A>", 0}, "<A> fox </A>", "en"},
      {{"a dog slept <SEP> slept <SEP> <A> [None] </A>", 0}, "<A> dog </A>", "en"},
  };
}

}  // namespace

TEST_CASE("checkpoint save/load round-trips tensors and metadata") {
  TrainResult trained = train(tiny_dataset(), tiny_train_config());
  Checkpoint ck = make_checkpoint(*trained.model, trained.tokenizer,
                                  tiny_train_config());

  test::TempDir dir;
  std::string path = dir.file("model.ckpt");
  save_checkpoint(ck, path);
  Checkpoint loaded = load_checkpoint(path);

  CHECK(loaded.use_copy == ck.use_copy);
  CHECK(loaded.template_style == ck.template_style);
  CHECK(loaded.event_type_mode == ck.event_type_mode);
  CHECK(loaded.start_token_mode == ck.start_token_mode);
  REQUIRE(loaded.role_order_seed.has_value());
  CHECK(*loaded.role_order_seed == 11);
  CHECK(loaded.transformer.vocab_size == ck.transformer.vocab_size);
  CHECK(loaded.tokenizer.vocab() == ck.tokenizer.vocab());
  CHECK(loaded.tokenizer.merges() == ck.tokenizer.merges());

  REQUIRE(loaded.tensors.size() == ck.tensors.size());
  for (std::size_t i = 0; i < ck.tensors.size(); ++i) {
    CHECK(loaded.tensors[i].first == ck.tensors[i].first);
    CHECK((loaded.tensors[i].second - ck.tensors[i].second).cwiseAbs().maxCoeff() ==
          0.0);
  }
}

TEST_CASE("model_from_checkpoint reproduces generation bitwise") {
  TrainResult trained = train(tiny_dataset(), tiny_train_config());
  Checkpoint ck = make_checkpoint(*trained.model, trained.tokenizer,
                                  tiny_train_config());
  test::TempDir dir;
  save_checkpoint(ck, dir.file("model.ckpt"));
  Checkpoint loaded = load_checkpoint(dir.file("model.ckpt"));
  auto model = model_from_checkpoint(loaded);

  ModelInput input{"the fox ran <SEP> ran <SEP> <A> [None] </A>", 0};
  DecodeConfig config;
  config.max_len = 16;
  GenerateResult original =
      generate(*trained.model, trained.tokenizer, input, config);
  GenerateResult restored = generate(*model, loaded.tokenizer, input, config);
  CHECK(original.token_ids == restored.token_ids);
  CHECK(original.text == restored.text);
}

TEST_CASE("checkpoint loader rejects corrupt files") {
  test::TempDir dir;
  CHECK_THROWS(load_checkpoint(dir.file("missing.ckpt")));

  std::string bad = dir.file("bad.ckpt");
  {
    std::ofstream out(bad, std::ios::binary);
    out << "definitely not a checkpoint";
  }
  CHECK_THROWS(load_checkpoint(bad));

  // truncated: header only, tensors missing
  TrainResult trained = train(tiny_dataset(), tiny_train_config());
  Checkpoint ck = make_checkpoint(*trained.model, trained.tokenizer,
                                  tiny_train_config());
  std::string full = dir.file("full.ckpt");
  save_checkpoint(ck, full);
  std::ifstream in(full, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  std::string truncated_path = dir.file("trunc.ckpt");
  {
    std::ofstream out(truncated_path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS(load_checkpoint(truncated_path));
}
