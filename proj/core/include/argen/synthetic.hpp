#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "argen/dataset.hpp"
#include "argen/ontology.hpp"

namespace argen {

/// Controlled two-language corpus for exercising zero-shot transfer: the two
/// languages share sentence skeletons (fillers, triggers, role markers) but
/// draw argument words from disjoint vocabularies, so a model can only
/// succeed on language B by copying from the input.
struct SyntheticConfig {
  std::size_t num_event_types = 3;
  std::size_t roles_per_type = 3;
  std::size_t vocab_size_per_language = 150;
  std::size_t num_train_instances = 600;
  std::size_t num_test_instances = 200;
  std::string language_a = "synA";
  std::string language_b = "synB";
  std::uint64_t seed = 0;
};

struct SyntheticCorpus {
  EventOntology ontology;
  DatasetSplit train;       // language A
  DatasetSplit test_same;   // language A, fresh instances
  DatasetSplit test_cross;  // language B
  /// Subword-coverage lines for both languages (the stand-in for
  /// multilingual pretraining of the tokenizer).
  std::vector<std::string> tokenizer_corpus;
};

SyntheticCorpus generate_corpus(const SyntheticConfig& config);

/// Writes ontology lines (EventType<TAB>Role1,Role2,...) for the corpus.
void write_ontology_file(const EventOntology& ontology, const std::string& path);

}  // namespace argen
