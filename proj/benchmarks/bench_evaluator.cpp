#include <benchmark/benchmark.h>

#include "argen/codec.hpp"
#include "argen/evaluator.hpp"
#include "argen/synthetic.hpp"

using namespace argen;

static void BM_Score(benchmark::State& state) {
  SyntheticConfig cfg;
  cfg.num_train_instances = static_cast<std::size_t>(state.range(0));
  cfg.num_test_instances = 10;
  cfg.seed = 8;
  SyntheticCorpus corpus = generate_corpus(cfg);

  // gold-as-prediction: the all-correct case
  std::vector<InstancePredictions> preds;
  for (const auto& inst : corpus.train.instances) {
    InstancePredictions rec;
    rec.doc_id = inst.doc_id;
    rec.sent_id = inst.sent_id;
    rec.event_type = inst.event_type;
    for (const auto& arg : inst.arguments)
      rec.predictions.push_back({arg.role, arg.text, arg.span, Resolution::exact});
    preds.push_back(std::move(rec));
  }
  for (auto _ : state) benchmark::DoNotOptimize(score(preds, corpus.train));
}
BENCHMARK(BM_Score)->Arg(200)->Arg(1000);
