#pragma once

#include <string>
#include <vector>

#include "argen/ontology.hpp"
#include "argen/types.hpp"

namespace argen {

/// One loaded instance file. Records without an event contribute to the
/// sentence count only; counts are validated against recomputation.
struct DatasetSplit {
  std::vector<EventInstance> instances;        // records carrying an event
  std::vector<EventInstance> plain_sentences;  // records without one
  std::string language;

  struct Counts {
    std::size_t sentences = 0;  // distinct (doc_id, sent_id) keys
    std::size_t events = 0;
    std::size_t arguments = 0;
    bool operator==(const Counts&) const = default;
  };
  Counts counts;

  Counts recompute_counts() const;
};

/// Instance file: one JSON object per line with fields
///   {doc_id, sent_id, language, text, tokens[], trigger{start,end,text},
///    event_type, arguments[{start,end,text,role}]}
/// Offsets index the raw text. A null/absent event_type marks a sentence
/// without events. When an ontology is given, roles are validated against it.
DatasetSplit load_jsonl(const std::string& path,
                        const EventOntology* ontology = nullptr);

void write_jsonl(const DatasetSplit& split, const std::string& path);

/// How each portion of a split sentence maps back into the original: offset
/// deltas per portion, plus gold arguments that fell outside the trigger's
/// portion (unreachable for the model, kept for scoring transparency).
struct PortionMap {
  struct Entry {
    std::size_t char_delta = 0;
    std::size_t token_delta = 0;
  };
  std::vector<Entry> entries;
  std::size_t trigger_portion = 0;
  std::vector<Argument> dropped_arguments;  // original-sentence coordinates
};

/// Splits one instance into portions of fewer than max_tokens tokens each.
/// Split points fall after the last punctuation token before the limit when
/// one exists and are moved off the trigger span. Portions tile the original
/// text exactly; the trigger's portion carries the event.
std::pair<std::vector<EventInstance>, PortionMap> split_long_sentence(
    const EventInstance& instance, std::size_t max_tokens = 80);

/// Shifts portion-level predictions back into original-sentence coordinates.
std::vector<ArgumentPrediction> merge_portion_predictions(
    const std::vector<std::pair<std::size_t, std::vector<ArgumentPrediction>>>&
        portion_predictions,
    const PortionMap& map);

/// Prediction file line: {doc_id, sent_id, event_type,
///   predictions[{role, text, start|null, end|null, resolution}]}
struct InstancePredictions {
  std::string doc_id;
  std::string sent_id;
  std::string event_type;
  std::vector<ArgumentPrediction> predictions;

  std::string key() const { return doc_id + "|" + sent_id; }
};

void write_predictions(const std::vector<InstancePredictions>& predictions,
                       const std::string& path);
std::vector<InstancePredictions> load_predictions(const std::string& path);

}  // namespace argen
