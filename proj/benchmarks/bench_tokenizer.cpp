#include <benchmark/benchmark.h>

#include "argen/pipeline.hpp"
#include "argen/synthetic.hpp"
#include "argen/tokenizer.hpp"

using namespace argen;

namespace {

struct TokenizerFixture {
  BpeTokenizer tokenizer;
  std::vector<std::string> prompts;
};

TokenizerFixture& fixture() {
  static TokenizerFixture f = [] {
    SyntheticConfig cfg;
    cfg.num_train_instances = 150;
    cfg.num_test_instances = 10;
    cfg.seed = 5;
    SyntheticCorpus corpus = generate_corpus(cfg);

    std::vector<std::string> lines = corpus.tokenizer_corpus;
    TokenizerFixture out;
    PromptConfig prompt_config;
    for (const auto& inst : corpus.train.instances) {
      EventTemplate tmpl = get_template(corpus.ontology, inst.event_type,
                                        TemplateStyle::special_tokens);
      out.prompts.push_back(build_input(inst, tmpl, prompt_config).text);
      lines.push_back(out.prompts.back());
    }
    out.tokenizer = BpeTokenizer::train(
        lines, 1200,
        reserved_tokens_for(corpus.ontology, EventTypeMode::none));
    return out;
  }();
  return f;
}

}  // namespace

static void BM_BpeTrain(benchmark::State& state) {
  SyntheticConfig cfg;
  cfg.num_train_instances = 100;
  cfg.num_test_instances = 5;
  cfg.seed = 6;
  SyntheticCorpus corpus = generate_corpus(cfg);
  auto reserved = reserved_tokens_for(corpus.ontology, EventTypeMode::none);
  for (auto _ : state) {
    benchmark::DoNotOptimize(BpeTokenizer::train(
        corpus.tokenizer_corpus, static_cast<std::size_t>(state.range(0)),
        reserved));
  }
}
BENCHMARK(BM_BpeTrain)->Arg(200)->Arg(800);

static void BM_TokenizerEncode(benchmark::State& state) {
  auto& f = fixture();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.tokenizer.encode(f.prompts[i++ % f.prompts.size()]));
  }
}
BENCHMARK(BM_TokenizerEncode);

static void BM_TokenizerDecode(benchmark::State& state) {
  auto& f = fixture();
  std::vector<std::vector<int>> encoded;
  for (const auto& p : f.prompts) encoded.push_back(f.tokenizer.encode(p));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.tokenizer.decode(encoded[i++ % encoded.size()]));
  }
}
BENCHMARK(BM_TokenizerDecode);
