#include "argen/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

namespace argen {

namespace {

class WordSampler {
 public:
  explicit WordSampler(std::mt19937_64& rng) : rng_(rng) {}

  // Distinct lowercase word, globally unique across all draws.
  std::string fresh() {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      std::size_t len = 4 + rng_() % 4;
      std::string w;
      for (std::size_t i = 0; i < len; ++i)
        w.push_back(static_cast<char>('a' + rng_() % 26));
      if (used_.insert(w).second) return w;
    }
    throw std::runtime_error("synthetic: exhausted distinct word space");
  }

 private:
  std::mt19937_64& rng_;
  std::set<std::string> used_;
};

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    ++pos;
  }
  return count;
}

struct SkeletonVocab {
  std::vector<std::string> fillers;
  std::vector<std::string> triggers;  // one per event type
  std::vector<std::string> markers;   // one per role
};

EventInstance make_instance(const EventOntology& ontology,
                            const SkeletonVocab& skeleton,
                            const std::vector<std::string>& arg_vocab,
                            const std::string& language, const std::string& doc_id,
                            std::size_t index, std::mt19937_64& rng) {
  const auto& entries = ontology.entries();
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::size_t event_idx = rng() % entries.size();
    const auto& entry = entries[event_idx];

    // words + per-token argument role ("" = none), trigger index
    std::vector<std::string> words;
    std::vector<std::string> word_role;
    auto push = [&](const std::string& w, const std::string& role = "") {
      words.push_back(w);
      word_role.push_back(role);
    };

    push(skeleton.fillers[rng() % skeleton.fillers.size()]);
    push(skeleton.fillers[rng() % skeleton.fillers.size()]);
    std::size_t trigger_word = words.size();
    push(skeleton.triggers[event_idx]);

    std::set<std::string> taken;
    auto sample_arg = [&]() {
      for (int k = 0; k < 50; ++k) {
        const std::string& w = arg_vocab[rng() % arg_vocab.size()];
        if (taken.insert(w).second) return w;
      }
      throw std::runtime_error(
          "synthetic: vocabulary too small for distinct arguments");
    };

    std::size_t total_args = 0;
    std::vector<bool> role_present(entry.roles.size(), false);
    for (std::size_t j = 0; j < entry.roles.size(); ++j)
      role_present[j] = rng() % 100 < 75;
    if (std::none_of(role_present.begin(), role_present.end(),
                     [](bool b) { return b; }))
      role_present[0] = true;

    for (std::size_t j = 0; j < entry.roles.size(); ++j) {
      push(skeleton.markers[j]);
      if (!role_present[j]) continue;
      push(sample_arg(), entry.roles[j]);
      ++total_args;
      // occasionally a second argument for the first role ([and] case)
      if (j == 0 && entry.roles.size() <= 3 && rng() % 100 < 15) {
        push(sample_arg(), entry.roles[j]);
        ++total_args;
      }
    }
    push(".");

    EventInstance inst;
    inst.doc_id = doc_id;
    inst.sent_id = "s" + std::to_string(index);
    inst.language = language;
    inst.event_type = entry.event_type;
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) {
        inst.text += " ";
        ++cursor;
      }
      Span span{cursor, cursor + words[i].size()};
      inst.text += words[i];
      cursor = span.end;
      inst.tokens.push_back({words[i], span});
      if (i == trigger_word) inst.trigger = {span, words[i]};
      if (!word_role[i].empty())
        inst.arguments.push_back({span, words[i], word_role[i]});
    }

    // Every argument (and the trigger) must resolve to a unique offset.
    bool unique = count_occurrences(inst.text, inst.trigger.text) == 1;
    for (const auto& arg : inst.arguments)
      unique = unique && count_occurrences(inst.text, arg.text) == 1;
    if (!unique || total_args == 0 || total_args > 4) continue;
    return inst;
  }
  throw std::runtime_error("synthetic: could not assemble a unique-offset passage");
}

}  // namespace

SyntheticCorpus generate_corpus(const SyntheticConfig& config) {
  if (config.num_event_types == 0 || config.roles_per_type == 0)
    throw std::invalid_argument("synthetic: need at least one event type and role");
  if (config.vocab_size_per_language < 8)
    throw std::invalid_argument(
        "synthetic: vocab_size_per_language too small for disjoint argument "
        "vocabularies");

  std::mt19937_64 rng(config.seed);
  WordSampler sampler(rng);

  SkeletonVocab skeleton;
  for (int i = 0; i < 10; ++i) skeleton.fillers.push_back(sampler.fresh());
  for (std::size_t k = 0; k < config.num_event_types; ++k)
    skeleton.triggers.push_back(sampler.fresh());
  for (std::size_t j = 0; j < config.roles_per_type; ++j)
    skeleton.markers.push_back(sampler.fresh());

  std::vector<std::string> vocab_a, vocab_b;
  for (std::size_t i = 0; i < config.vocab_size_per_language; ++i)
    vocab_a.push_back(sampler.fresh());
  for (std::size_t i = 0; i < config.vocab_size_per_language; ++i)
    vocab_b.push_back(sampler.fresh());

  static const char* kRoleNames[] = {"alpha", "beta",    "gamma",
                                     "delta", "epsilon", "zeta"};
  std::vector<EventOntology::Entry> entries;
  for (std::size_t k = 0; k < config.num_event_types; ++k) {
    EventOntology::Entry entry;
    entry.event_type = "evt" + std::to_string(k);
    for (std::size_t j = 0; j < config.roles_per_type; ++j)
      entry.roles.push_back(j < 6 ? kRoleNames[j] : "role" + std::to_string(j));
    entries.push_back(std::move(entry));
  }

  SyntheticCorpus corpus;
  corpus.ontology = EventOntology(std::move(entries), "synthetic");

  auto fill_split = [&](DatasetSplit& split, const std::vector<std::string>& vocab,
                        const std::string& language, const std::string& doc_id,
                        std::size_t count) {
    split.language = language;
    for (std::size_t i = 0; i < count; ++i)
      split.instances.push_back(make_instance(corpus.ontology, skeleton, vocab,
                                              language, doc_id, i, rng));
    split.counts = split.recompute_counts();
  };
  fill_split(corpus.train, vocab_a, config.language_a, "train", config.num_train_instances);
  fill_split(corpus.test_same, vocab_a, config.language_a, "test_same",
             config.num_test_instances);
  fill_split(corpus.test_cross, vocab_b, config.language_b, "test_cross",
             config.num_test_instances);

  // Subword coverage for both languages plus the shared skeleton.
  auto coverage = [&](const std::vector<std::string>& words) {
    for (const auto& w : words)
      corpus.tokenizer_corpus.push_back(w + " " + w + " " + w);
  };
  coverage(skeleton.fillers);
  coverage(skeleton.triggers);
  coverage(skeleton.markers);
  coverage(vocab_a);
  coverage(vocab_b);
  return corpus;
}

void write_ontology_file(const EventOntology& ontology, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("ontology: cannot write '" + path + "'");
  for (const auto& entry : ontology.entries()) {
    out << entry.event_type << "\t";
    for (std::size_t i = 0; i < entry.roles.size(); ++i) {
      if (i) out << ",";
      out << entry.roles[i];
    }
    out << "\n";
  }
}

}  // namespace argen
