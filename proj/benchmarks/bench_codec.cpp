#include <benchmark/benchmark.h>

#include <random>

#include "argen/codec.hpp"
#include "argen/synthetic.hpp"

using namespace argen;

namespace {

SyntheticCorpus& corpus() {
  static SyntheticCorpus c = [] {
    SyntheticConfig cfg;
    cfg.num_train_instances = 200;
    cfg.num_test_instances = 10;
    cfg.seed = 3;
    return generate_corpus(cfg);
  }();
  return c;
}

}  // namespace

static void BM_EncodeTarget(benchmark::State& state) {
  const auto& c = corpus();
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& inst = c.train.instances[i++ % c.train.instances.size()];
    EventTemplate tmpl =
        get_template(c.ontology, inst.event_type, TemplateStyle::special_tokens);
    benchmark::DoNotOptimize(encode_target(inst, tmpl));
  }
}
BENCHMARK(BM_EncodeTarget);

static void BM_DecodeTarget(benchmark::State& state) {
  const auto& c = corpus();
  std::vector<std::pair<std::string, EventTemplate>> targets;
  for (const auto& inst : c.train.instances) {
    EventTemplate tmpl =
        get_template(c.ontology, inst.event_type, TemplateStyle::special_tokens);
    targets.emplace_back(encode_target(inst, tmpl), tmpl);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [text, tmpl] = targets[i++ % targets.size()];
    benchmark::DoNotOptimize(decode_target(text, tmpl));
  }
}
BENCHMARK(BM_DecodeTarget);

static void BM_ResolveOffsets(benchmark::State& state) {
  const auto& c = corpus();
  std::vector<std::pair<RoleAssignments, const EventInstance*>> work;
  for (const auto& inst : c.train.instances) {
    EventTemplate tmpl =
        get_template(c.ontology, inst.event_type, TemplateStyle::special_tokens);
    work.emplace_back(gold_assignments(inst, tmpl), &inst);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [assignments, inst] = work[i++ % work.size()];
    benchmark::DoNotOptimize(resolve_offsets(assignments, *inst));
  }
}
BENCHMARK(BM_ResolveOffsets);
