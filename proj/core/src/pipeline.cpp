#include "argen/pipeline.hpp"

#include <stdexcept>

#include "argen/codec.hpp"

namespace argen {

std::vector<std::string> reserved_tokens_for(const EventOntology& ontology,
                                             EventTypeMode event_type_mode) {
  auto inventory = special_token_inventory(ontology);
  std::vector<std::string> reserved(inventory.begin(), inventory.end());
  reserved.push_back(kSepToken);
  if (event_type_mode == EventTypeMode::special_tokens)
    for (const auto& entry : ontology.entries())
      reserved.push_back(event_type_special_token(entry.event_type));
  return reserved;
}

std::vector<TrainExample> build_training_examples(
    const DatasetSplit& split, const EventOntology& ontology,
    TemplateStyle style, std::optional<std::uint64_t> role_order_seed,
    const PromptConfig& prompt_config) {
  std::vector<TrainExample> examples;
  examples.reserve(split.instances.size());
  for (const auto& inst : split.instances) {
    EventTemplate tmpl =
        get_template(ontology, inst.event_type, style, role_order_seed);
    TrainExample ex;
    ex.input = build_input(inst, tmpl, prompt_config);
    ex.target = encode_target(inst, tmpl);
    ex.language = inst.language;
    examples.push_back(std::move(ex));
  }
  return examples;
}

namespace {

struct InstanceResult {
  std::vector<ArgumentPrediction> predictions;
  bool truncated = false;
  std::vector<int> ids;
  std::vector<int> input_ids;
  std::string text;
};

InstanceResult predict_instance(const CopyModel& model,
                                const Checkpoint& checkpoint,
                                const EventInstance& inst,
                                const EventOntology& ontology,
                                const PromptConfig& prompt_config,
                                const PredictOptions& options,
                                std::vector<StepDistribution>* trace) {
  EventTemplate tmpl = get_template(ontology, inst.event_type,
                                    checkpoint.template_style,
                                    checkpoint.role_order_seed);
  ModelInput input = build_input(inst, tmpl, prompt_config);
  GenerateResult gen =
      generate(model, checkpoint.tokenizer, input, options.decode,
               inst.language, checkpoint.start_token_mode, trace);
  InstanceResult result;
  result.input_ids = checkpoint.tokenizer.encode(input.text);
  result.truncated = gen.truncated;
  result.ids = gen.token_ids;
  result.text = gen.text;
  result.predictions = resolve_offsets(decode_target(gen.text, tmpl), inst);
  return result;
}

}  // namespace

PredictOutput predict_split(const CopyModel& model, const Checkpoint& checkpoint,
                            const DatasetSplit& split,
                            const EventOntology& ontology,
                            const PredictOptions& options) {
  PromptConfig prompt_config;
  prompt_config.event_type_mode = checkpoint.event_type_mode;
  prompt_config.translation_table = options.translation_table;

  PredictOutput out;
  for (const auto& inst : split.instances) {
    std::vector<StepDistribution> trace;
    std::vector<StepDistribution>* trace_ptr =
        options.collect_traces && options.decode.beam_width == 1 ? &trace
                                                                 : nullptr;
    InstancePredictions record;
    record.doc_id = inst.doc_id;
    record.sent_id = inst.sent_id;
    record.event_type = inst.event_type;

    InstanceResult result;
    if (options.split_max_tokens > 0 &&
        inst.tokens.size() >= options.split_max_tokens) {
      auto [portions, map] = split_long_sentence(inst, options.split_max_tokens);
      result = predict_instance(model, checkpoint,
                                portions[map.trigger_portion], ontology,
                                prompt_config, options, trace_ptr);
      result.predictions = merge_portion_predictions(
          {{map.trigger_portion, result.predictions}}, map);
    } else {
      result = predict_instance(model, checkpoint, inst, ontology,
                                prompt_config, options, trace_ptr);
    }

    record.predictions = std::move(result.predictions);
    if (result.truncated) ++out.truncated_count;
    out.predictions.push_back(std::move(record));
    out.generated_ids.push_back(std::move(result.ids));
    out.input_token_ids.push_back(std::move(result.input_ids));
    out.generated_texts.push_back(std::move(result.text));
    if (trace_ptr) out.traces.push_back(std::move(trace));
  }
  return out;
}

}  // namespace argen
