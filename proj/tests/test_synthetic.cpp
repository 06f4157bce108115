#include <doctest.h>

#include <chrono>
#include <set>

#include "argen/codec.hpp"
#include "argen/synthetic.hpp"
#include "test_util.hpp"

using namespace argen;

namespace {

SyntheticConfig small_config() {
  SyntheticConfig cfg;
  cfg.num_event_types = 3;
  cfg.roles_per_type = 3;
  cfg.vocab_size_per_language = 40;
  cfg.num_train_instances = 60;
  cfg.num_test_instances = 25;
  cfg.seed = 17;
  return cfg;
}

std::set<std::string> argument_tokens(const DatasetSplit& split) {
  std::set<std::string> out;
  for (const auto& inst : split.instances)
    for (const auto& arg : inst.arguments) out.insert(arg.text);
  return out;
}

}  // namespace

TEST_CASE("generate_corpus is deterministic under a fixed seed") {
  SyntheticCorpus a = generate_corpus(small_config());
  SyntheticCorpus b = generate_corpus(small_config());
  REQUIRE(a.train.instances.size() == b.train.instances.size());
  for (std::size_t i = 0; i < a.train.instances.size(); ++i) {
    CHECK(a.train.instances[i].text == b.train.instances[i].text);
    CHECK(a.train.instances[i].event_type == b.train.instances[i].event_type);
  }
  CHECK(a.test_cross.instances.front().text == b.test_cross.instances.front().text);
}

TEST_CASE("argument vocabularies of the two languages are disjoint") {
  SyntheticCorpus corpus = generate_corpus(small_config());
  std::set<std::string> a = argument_tokens(corpus.train);
  std::set<std::string> a2 = argument_tokens(corpus.test_same);
  std::set<std::string> b = argument_tokens(corpus.test_cross);
  a.insert(a2.begin(), a2.end());
  for (const auto& w : b) CHECK(a.count(w) == 0);
  CHECK(!a.empty());
  CHECK(!b.empty());
}

TEST_CASE("instances satisfy the dataset invariants") {
  SyntheticCorpus corpus = generate_corpus(small_config());
  for (const DatasetSplit* split :
       {&corpus.train, &corpus.test_same, &corpus.test_cross}) {
    CHECK(split->counts == split->recompute_counts());
    for (const auto& inst : split->instances) {
      CHECK(corpus.ontology.has_event_type(inst.event_type));
      CHECK(inst.arguments.size() >= 1);
      CHECK(inst.arguments.size() <= 4);
      CHECK(inst.text.substr(inst.trigger.span.start,
                             inst.trigger.span.end - inst.trigger.span.start) ==
            inst.trigger.text);
      const auto& roles = corpus.ontology.roles_of(inst.event_type);
      for (const auto& arg : inst.arguments) {
        CHECK(std::find(roles.begin(), roles.end(), arg.role) != roles.end());
        CHECK(inst.text.substr(arg.span.start, arg.span.end - arg.span.start) ==
              arg.text);
      }
    }
  }
}

TEST_CASE("gold targets round-trip through the codec") {
  SyntheticCorpus corpus = generate_corpus(small_config());
  for (const auto& inst : corpus.train.instances) {
    EventTemplate tmpl = get_template(corpus.ontology, inst.event_type,
                                      TemplateStyle::special_tokens);
    RoleAssignments decoded = decode_target(encode_target(inst, tmpl), tmpl);
    CHECK(decoded == gold_assignments(inst, tmpl));
  }
}

TEST_CASE("every gold argument resolves to a unique exact offset") {
  SyntheticCorpus corpus = generate_corpus(small_config());
  for (const DatasetSplit* split : {&corpus.train, &corpus.test_cross}) {
    for (const auto& inst : split->instances) {
      EventTemplate tmpl = get_template(corpus.ontology, inst.event_type,
                                        TemplateStyle::special_tokens);
      auto preds = resolve_offsets(gold_assignments(inst, tmpl), inst);
      for (const auto& pred : preds) {
        CHECK(pred.resolution == Resolution::exact);
        REQUIRE(pred.span.has_value());
        bool found = false;
        for (const auto& arg : inst.arguments)
          found = found || (arg.span == *pred.span && arg.role == pred.role);
        CHECK(found);
      }
    }
  }
}

TEST_CASE("desk-scale generation stays under five seconds") {
  SyntheticConfig cfg = small_config();
  cfg.num_train_instances = 500;
  cfg.num_test_instances = 200;
  auto begin = std::chrono::steady_clock::now();
  SyntheticCorpus corpus = generate_corpus(cfg);
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - begin)
                     .count();
  CHECK(corpus.train.instances.size() == 500);
  CHECK(elapsed < 5000);
}

TEST_CASE("tiny vocabularies are rejected") {
  SyntheticConfig cfg = small_config();
  cfg.vocab_size_per_language = 2;
  CHECK_THROWS(generate_corpus(cfg));
}

TEST_CASE("ontology file writer emits loadable lines") {
  SyntheticCorpus corpus = generate_corpus(small_config());
  test::TempDir dir;
  write_ontology_file(corpus.ontology, dir.file("ont.tsv"));
  EventOntology reloaded = load_ontology(dir.file("ont.tsv"));
  CHECK(reloaded.entries().size() == corpus.ontology.entries().size());
  for (const auto& entry : corpus.ontology.entries())
    CHECK(reloaded.roles_of(entry.event_type) == entry.roles);
}
