#include <benchmark/benchmark.h>

#include "argen/copy_model.hpp"
#include "argen/decoding.hpp"

using namespace argen;

namespace {

TransformerConfig bench_config(int vocab) {
  TransformerConfig cfg;
  cfg.vocab_size = vocab;
  cfg.init_seed = 7;
  return cfg;  // library defaults: d64, 4 heads, 2+2 layers
}

std::vector<int> ramp(int n, int vocab) {
  std::vector<int> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = (i * 7 + 3) % vocab;
  return ids;
}

}  // namespace

static void BM_EncoderForward(benchmark::State& state) {
  CopyModel model(bench_config(600), true);
  auto input = ramp(static_cast<int>(state.range(0)), 600);
  for (auto _ : state) benchmark::DoNotOptimize(model.backend().encode(input));
}
BENCHMARK(BM_EncoderForward)->Arg(32)->Arg(64);

static void BM_DecodeStep(benchmark::State& state) {
  CopyModel model(bench_config(600), true);
  auto input = ramp(48, 600);
  auto ctx = model.backend().encode(input);
  auto base = model.backend().new_decoder_state(*ctx);
  for (int t = 0; t < 20; ++t) model.backend().decode_step(*ctx, *base, t % 600);
  for (auto _ : state) {
    auto s = base->clone();
    benchmark::DoNotOptimize(model.backend().decode_step(*ctx, *s, 5));
  }
}
BENCHMARK(BM_DecodeStep);

static void BM_TrainingStep(benchmark::State& state) {
  CopyModel model(bench_config(600), true);
  ad::AdamOptimizer opt(model.params(), 1e-4);
  auto input = ramp(48, 600);
  auto target = ramp(24, 600);
  for (auto _ : state) {
    opt.zero_grad();
    ad::Var loss = model.loss_graph(input, target, 0);
    loss.backward();
    opt.step();
    benchmark::DoNotOptimize(loss.value()(0, 0));
  }
}
BENCHMARK(BM_TrainingStep);

static void BM_GreedyGeneration(benchmark::State& state) {
  BpeTokenizer tok = BpeTokenizer::train(
      {"a b c d e f g h i j k l m n o p q r s t u v w x y z"}, 170, {"</s>"});
  CopyModel model(bench_config(tok.vocab_size()), true);
  auto input = ramp(48, tok.vocab_size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        greedy_decode(model, tok, input, tok.pad_id(), 24));
  }
}
BENCHMARK(BM_GreedyGeneration);

static void BM_BeamSearch(benchmark::State& state) {
  CopyModel model(bench_config(200), true);
  auto input = ramp(48, 200);
  for (auto _ : state) {
    benchmark::DoNotOptimize(beam_search(model, input, 0, 2,
                                         static_cast<int>(state.range(0)), 24));
  }
}
BENCHMARK(BM_BeamSearch)->Arg(1)->Arg(4);
