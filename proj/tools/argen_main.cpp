// argen: generation-based cross-lingual event argument extraction toolkit.
//
// Subcommands: train, predict, evaluate, analyze, ablate, synth.
// Exit codes: 0 success, 1 validation failure, 2 runtime failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "argen/analysis.hpp"
#include "argen/checkpoint.hpp"
#include "argen/codec.hpp"
#include "argen/pipeline.hpp"
#include "argen/synthetic.hpp"

namespace {

using namespace argen;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Removes freshly created output files unless the command commits them.
class OutputGuard {
 public:
  ~OutputGuard() {
    if (committed_) return;
    for (const auto& path : paths_) {
      std::error_code ec;
      std::filesystem::remove(path, ec);
    }
  }
  std::string track(const std::string& path) {
    paths_.push_back(path);
    return path;
  }
  void commit() { committed_ = true; }

 private:
  std::vector<std::string> paths_;
  bool committed_ = false;
};

template <typename Enum>
Enum parse_enum(std::optional<Enum> (*parser)(const std::string&),
                const std::string& value, const char* what) {
  auto parsed = parser(value);
  if (!parsed)
    throw ValidationError(std::string("invalid ") + what + " '" + value + "'");
  return *parsed;
}

void check_backend_flag(const std::string& backend) {
  if (backend == "toy") return;
  if (backend == "external")
    throw ValidationError(
        "external backends attach through the GenerativeBackend library "
        "interface; this CLI drives the built-in toy backend");
  throw ValidationError("--backend must be 'toy' or 'external'");
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

// ---- shared option blocks ---------------------------------------------------

struct ModelFlags {
  int epochs = 60;
  int batch_size = 8;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
  std::size_t bpe_merges = 400;
  int d_model = 64;
  int num_heads = 4;
  int enc_layers = 2;
  int dec_layers = 2;
  int ffn_dim = 128;
  int max_source_len = 256;
  int max_target_len = 128;

  void attach(CLI::App* cmd) {
    cmd->add_option("--epochs", epochs, "training epochs");
    cmd->add_option("--batch-size", batch_size, "examples per optimizer step");
    cmd->add_option("--lr", learning_rate, "learning rate");
    cmd->add_option("--seed", seed, "seed for init, shuffling and role orders");
    cmd->add_option("--bpe-merges", bpe_merges, "subword merge count");
    cmd->add_option("--d-model", d_model, "model width");
    cmd->add_option("--heads", num_heads, "attention heads");
    cmd->add_option("--enc-layers", enc_layers, "encoder layers");
    cmd->add_option("--dec-layers", dec_layers, "decoder layers");
    cmd->add_option("--ffn-dim", ffn_dim, "feed-forward width");
    cmd->add_option("--max-source-len", max_source_len, "max input tokens");
    cmd->add_option("--max-target-len", max_target_len, "max target tokens");
  }

  TransformerConfig transformer() const {
    TransformerConfig cfg;
    cfg.d_model = d_model;
    cfg.num_heads = num_heads;
    cfg.num_encoder_layers = enc_layers;
    cfg.num_decoder_layers = dec_layers;
    cfg.ffn_dim = ffn_dim;
    cfg.max_source_positions = max_source_len;
    cfg.max_target_positions = max_target_len;
    return cfg;
  }
};

TrainConfig assemble_train_config(const ModelFlags& flags,
                                  const std::string& template_style,
                                  const std::string& event_type_mode,
                                  const std::string& start_token_mode,
                                  bool use_copy, long long role_order_seed,
                                  const EventOntology& ontology,
                                  const std::string& tokenizer_corpus_path) {
  TrainConfig cfg;
  cfg.epochs = flags.epochs;
  cfg.batch_size = flags.batch_size;
  cfg.learning_rate = flags.learning_rate;
  cfg.seed = flags.seed;
  cfg.bpe_merges = flags.bpe_merges;
  cfg.transformer = flags.transformer();
  cfg.use_copy = use_copy;
  cfg.template_style = parse_enum(template_style_from_string, template_style,
                                  "template style");
  cfg.event_type_mode = parse_enum(event_type_mode_from_string, event_type_mode,
                                   "event type mode");
  cfg.start_token_mode = parse_enum(start_token_mode_from_string,
                                    start_token_mode, "start token mode");
  if (role_order_seed >= 0)
    cfg.role_order_seed = static_cast<std::uint64_t>(role_order_seed);
  cfg.reserved_tokens = reserved_tokens_for(ontology, cfg.event_type_mode);
  if (!tokenizer_corpus_path.empty())
    cfg.extra_tokenizer_corpus = read_lines(tokenizer_corpus_path);
  return cfg;
}

void write_loss_log(const std::string& path, const TrainResult& result) {
  std::ostringstream out;
  for (std::size_t i = 0; i < result.epoch_mean_nll.size(); ++i)
    out << "epoch " << (i + 1) << " mean_nll " << result.epoch_mean_nll[i]
        << "\n";
  out << "floored_steps " << result.floored_steps << "\n";
  write_text_file(path, out.str());
}

// ---- train -------------------------------------------------------------------

struct TrainArgs {
  std::string train_path, ontology_path, out_path;
  std::string tokenizer_corpus_path, translation_table_path;
  std::string backend = "toy";
  std::string template_style = "special_tokens";
  std::string event_type_mode = "none";
  std::string start_token_mode = "shared";
  std::string copy_mode = "on";
  long long role_order_seed = -1;
  ModelFlags flags;
};

int run_train(const TrainArgs& args) {
  check_backend_flag(args.backend);
  if (args.copy_mode != "on" && args.copy_mode != "off")
    throw ValidationError("--copy must be 'on' or 'off'");
  EventTypeMode mode = parse_enum(event_type_mode_from_string,
                                  args.event_type_mode, "event type mode");
  if (mode == EventTypeMode::translated_tokens &&
      args.translation_table_path.empty())
    throw ValidationError(
        "--event-type-mode translated_tokens requires --translation-table");

  EventOntology ontology = load_ontology(args.ontology_path);
  DatasetSplit split = load_jsonl(args.train_path, &ontology);
  if (split.instances.empty())
    throw ValidationError("training file has no event instances");

  PromptConfig prompt_config;
  prompt_config.event_type_mode = mode;
  if (!args.translation_table_path.empty())
    prompt_config.translation_table =
        load_translation_table(args.translation_table_path);

  TrainConfig cfg = assemble_train_config(
      args.flags, args.template_style, args.event_type_mode,
      args.start_token_mode, args.copy_mode == "on", args.role_order_seed,
      ontology, args.tokenizer_corpus_path);

  auto examples = build_training_examples(split, ontology, cfg.template_style,
                                          cfg.role_order_seed, prompt_config);
  TrainResult result = train(examples, cfg);

  OutputGuard guard;
  save_checkpoint(make_checkpoint(*result.model, result.tokenizer, cfg),
                  guard.track(args.out_path));
  write_loss_log(guard.track(args.out_path + ".log"), result);
  guard.commit();

  std::printf("trained on %zu instances, %d epochs, final mean NLL %.6f\n",
              examples.size(), cfg.epochs,
              result.epoch_mean_nll.empty() ? 0.0 : result.epoch_mean_nll.back());
  std::printf("checkpoint: %s\nloss log: %s.log\n", args.out_path.c_str(),
              args.out_path.c_str());
  return 0;
}

// ---- predict ------------------------------------------------------------------

struct PredictArgs {
  std::string checkpoint_path, input_path, ontology_path, out_path;
  std::string translation_table_path;
  std::string backend = "toy";
  std::string template_style;  // optional cross-check
  bool override_template_style = false;
  int beam = 1;
  int max_len = 96;
  bool constrained = false;
  std::size_t split_max_tokens = 0;
};

int run_predict(const PredictArgs& args) {
  check_backend_flag(args.backend);
  Checkpoint ck = load_checkpoint(args.checkpoint_path);
  if (!args.template_style.empty()) {
    TemplateStyle requested = parse_enum(template_style_from_string,
                                         args.template_style, "template style");
    if (requested != ck.template_style && !args.override_template_style)
      throw ValidationError(
          std::string("checkpoint was trained with template style '") +
          to_string(ck.template_style) +
          "'; pass --override-template-style to decode anyway");
    if (args.override_template_style) ck.template_style = requested;
  }
  if (ck.event_type_mode == EventTypeMode::translated_tokens &&
      args.translation_table_path.empty())
    throw ValidationError(
        "checkpoint uses translated_tokens prompts; --translation-table required");

  EventOntology ontology = load_ontology(args.ontology_path);
  DatasetSplit split = load_jsonl(args.input_path, &ontology);

  auto model = model_from_checkpoint(ck);
  PredictOptions options;
  options.decode.beam_width = args.beam;
  options.decode.max_len = args.max_len;
  options.decode.constrained = args.constrained;
  options.split_max_tokens = args.split_max_tokens;
  if (!args.translation_table_path.empty())
    options.translation_table =
        load_translation_table(args.translation_table_path);

  PredictOutput out = predict_split(*model, ck, split, ontology, options);

  OutputGuard guard;
  write_predictions(out.predictions, guard.track(args.out_path));
  guard.commit();
  std::printf("wrote %zu prediction records to %s (truncated generations: %zu)\n",
              out.predictions.size(), args.out_path.c_str(),
              out.truncated_count);
  return 0;
}

// ---- evaluate -------------------------------------------------------------------

struct EvaluateArgs {
  std::string preds_path, gold_path, ontology_path, out_path, json_path;
  std::string source_language, target_language;
};

int run_evaluate(const EvaluateArgs& args) {
  std::optional<EventOntology> ontology;
  if (!args.ontology_path.empty()) ontology = load_ontology(args.ontology_path);
  DatasetSplit golds =
      load_jsonl(args.gold_path, ontology ? &*ontology : nullptr);
  auto preds = load_predictions(args.preds_path);

  ScoreReport report = score(preds, golds);
  report.source_language = args.source_language;
  report.target_language =
      args.target_language.empty() ? golds.language : args.target_language;

  OutputGuard guard;
  if (!args.out_path.empty())
    write_text_file(guard.track(args.out_path), report_to_text(report));
  std::string json_path = args.json_path;
  if (json_path.empty() && !args.out_path.empty())
    json_path = args.out_path + ".json";
  if (!json_path.empty())
    write_text_file(guard.track(json_path), report_to_json_string(report));
  guard.commit();

  std::printf("P %.4f R %.4f F1 %.4f (gold %zu, pred %zu, correct %zu)\n",
              report.precision, report.recall, report.f1, report.num_gold,
              report.num_pred, report.num_correct);
  return 0;
}

// ---- analyze -------------------------------------------------------------------

struct AnalyzeArgs {
  std::string preds_path, gold_path, ontology_path, out_path;
  std::string reference_preds_path;
};

int run_analyze(const AnalyzeArgs& args) {
  std::optional<EventOntology> ontology;
  if (!args.ontology_path.empty()) ontology = load_ontology(args.ontology_path);
  DatasetSplit golds =
      load_jsonl(args.gold_path, ontology ? &*ontology : nullptr);
  auto preds = load_predictions(args.preds_path);

  std::map<std::string, const EventInstance*> instances;
  for (const auto& inst : golds.instances)
    instances[inst.key() + "|" + inst.event_type] = &inst;

  std::map<std::string, std::vector<const ArgumentPrediction*>> references;
  std::vector<InstancePredictions> reference_records;
  if (!args.reference_preds_path.empty()) {
    reference_records = load_predictions(args.reference_preds_path);
    for (const auto& rec : reference_records)
      for (const auto& p : rec.predictions)
        references[rec.key() + "|" + rec.event_type].push_back(&p);
  }

  std::vector<ArgumentPrediction> failed;
  std::vector<ErrorTag> tags;
  for (const auto& rec : preds) {
    auto it = instances.find(rec.key() + "|" + rec.event_type);
    if (it == instances.end())
      throw std::runtime_error("prediction references unknown instance " +
                               rec.key());
    const EventInstance& inst = *it->second;
    for (const auto& pred : rec.predictions) {
      if (prediction_correct(pred, inst.arguments)) continue;
      std::optional<ArgumentPrediction> reference;
      auto rit = references.find(rec.key() + "|" + rec.event_type);
      if (rit != references.end()) {
        for (const auto* ref : rit->second) {
          if (ref->role == pred.role) {
            reference = *ref;
            break;
          }
        }
      }
      failed.push_back(pred);
      tags.push_back(classify_error(pred, inst.arguments, inst, reference));
    }
  }

  ErrorDistribution dist = error_report(failed, tags);
  std::string text = error_report_to_text(dist);

  OutputGuard guard;
  if (!args.out_path.empty()) write_text_file(guard.track(args.out_path), text);
  guard.commit();
  std::fputs(text.c_str(), stdout);
  return 0;
}

// ---- synth ---------------------------------------------------------------------

struct SynthArgs {
  std::string out_dir;
  SyntheticConfig config;
};

int run_synth(const SynthArgs& args) {
  SyntheticCorpus corpus = generate_corpus(args.config);
  std::filesystem::create_directories(args.out_dir);
  auto path = [&](const char* name) {
    return (std::filesystem::path(args.out_dir) / name).string();
  };

  OutputGuard guard;
  write_jsonl(corpus.train, guard.track(path("train.jsonl")));
  write_jsonl(corpus.test_same, guard.track(path("test_same.jsonl")));
  write_jsonl(corpus.test_cross, guard.track(path("test_cross.jsonl")));
  write_ontology_file(corpus.ontology, guard.track(path("ontology.tsv")));
  std::ostringstream cov;
  for (const auto& line : corpus.tokenizer_corpus) cov << line << "\n";
  write_text_file(guard.track(path("tokenizer_corpus.txt")), cov.str());
  guard.commit();

  std::printf(
      "synthetic corpus in %s: train %zu / test_same %zu / test_cross %zu "
      "instances\n",
      args.out_dir.c_str(), corpus.train.instances.size(),
      corpus.test_same.instances.size(), corpus.test_cross.instances.size());
  return 0;
}

// ---- ablate --------------------------------------------------------------------

struct AblateArgs {
  std::string axis;
  std::string backend = "toy";
  std::string train_path, ontology_path, out_dir;
  std::vector<std::string> test_specs;  // label=path
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::string translation_table_path, tokenizer_corpus_path;
  std::string template_style = "special_tokens";
  int beam = 1;
  int max_len = 96;
  ModelFlags flags;
};

struct AblationArm {
  std::string name;
  TrainConfig config;
  bool constrained_decode = false;
};

int run_ablate(const AblateArgs& args) {
  check_backend_flag(args.backend);
  static const std::set<std::string> axes = {
      "copy", "constrained", "event-type-mode", "role-order", "template-style"};
  if (!axes.count(args.axis))
    throw ValidationError("unknown --axis '" + args.axis + "'");
  if (args.test_specs.empty())
    throw ValidationError("at least one --test label=path is required");

  EventOntology ontology = load_ontology(args.ontology_path);
  DatasetSplit train_split = load_jsonl(args.train_path, &ontology);
  if (train_split.instances.empty())
    throw ValidationError("training file has no event instances");

  std::vector<std::pair<std::string, DatasetSplit>> tests;
  for (const auto& spec : args.test_specs) {
    std::size_t eq = spec.find('=');
    if (eq == std::string::npos)
      throw ValidationError("--test expects label=path, got '" + spec + "'");
    tests.emplace_back(spec.substr(0, eq),
                       load_jsonl(spec.substr(eq + 1), &ontology));
  }

  TrainConfig base = assemble_train_config(
      args.flags, args.template_style, "none", "shared", true,
      /*role_order_seed=*/-1, ontology, args.tokenizer_corpus_path);

  // Axis arms. The constrained axis trains one model and decodes both ways;
  // every other axis retrains per arm.
  std::vector<AblationArm> arms;
  if (args.axis == "copy") {
    AblationArm on{"copy_on", base, false};
    AblationArm off{"copy_off", base, false};
    off.config.use_copy = false;
    arms = {on, off};
  } else if (args.axis == "constrained") {
    arms = {{"beam", base, false}, {"constrained", base, true}};
  } else if (args.axis == "event-type-mode") {
    for (const char* mode : {"none", "english_tokens", "special_tokens"}) {
      AblationArm arm{std::string("event_type_") + mode, base, false};
      arm.config.event_type_mode =
          *event_type_mode_from_string(mode);
      arm.config.reserved_tokens =
          reserved_tokens_for(ontology, arm.config.event_type_mode);
      arms.push_back(std::move(arm));
    }
    if (!args.translation_table_path.empty()) {
      AblationArm arm{"event_type_translated_tokens", base, false};
      arm.config.event_type_mode = EventTypeMode::translated_tokens;
      arms.push_back(std::move(arm));
    }
  } else if (args.axis == "role-order") {
    arms.push_back({"order_canonical", base, false});
    for (std::uint64_t s : {101ULL, 202ULL, 303ULL}) {
      AblationArm arm{"order_seed" + std::to_string(s), base, false};
      arm.config.role_order_seed = s;
      arms.push_back(std::move(arm));
    }
  } else {  // template-style
    AblationArm special{"style_special_tokens", base, false};
    special.config.template_style = TemplateStyle::special_tokens;
    AblationArm english{"style_english_tokens", base, false};
    english.config.template_style = TemplateStyle::english_tokens;
    arms = {special, english};
  }

  TranslationTable table;
  if (!args.translation_table_path.empty())
    table = load_translation_table(args.translation_table_path);

  std::filesystem::create_directories(args.out_dir);
  OutputGuard guard;

  // arm -> test label -> per-seed reports, averaged once at the end
  std::map<std::string, std::map<std::string, std::vector<ScoreReport>>> runs;
  bool shares_model = args.axis == "constrained";

  for (std::uint64_t seed : args.seeds) {
    std::map<std::string, TrainResult> trained;  // per training-distinct arm
    for (const auto& arm : arms) {
      std::string train_key = shares_model ? "shared" : arm.name;
      if (!trained.count(train_key)) {
        TrainConfig cfg = arm.config;
        cfg.seed = seed;
        PromptConfig prompt_config;
        prompt_config.event_type_mode = cfg.event_type_mode;
        prompt_config.translation_table = table;
        auto examples =
            build_training_examples(train_split, ontology, cfg.template_style,
                                    cfg.role_order_seed, prompt_config);
        trained.emplace(train_key, train(examples, cfg));
      }
      TrainResult& result = trained.at(train_key);
      TrainConfig cfg = arm.config;
      cfg.seed = seed;
      Checkpoint ck = make_checkpoint(*result.model, result.tokenizer, cfg);

      for (const auto& [label, split] : tests) {
        PredictOptions options;
        options.decode.beam_width = args.beam;
        options.decode.max_len = args.max_len;
        options.decode.constrained = arm.constrained_decode;
        options.translation_table = table;
        PredictOutput out =
            predict_split(*result.model, ck, split, ontology, options);
        ScoreReport report = score(out.predictions, split);
        report.source_language = train_split.language;
        report.target_language = split.language;
        runs[arm.name][label].push_back(std::move(report));
      }
    }
  }

  std::map<std::string, std::map<std::string, ScoreReport>> grid;
  for (auto& [arm_name, by_label] : runs)
    for (auto& [label, reports] : by_label)
      grid[arm_name][label] = aggregate_seeds(reports);

  std::ostringstream text;
  text << "ablation axis: " << args.axis << " (seeds:";
  for (auto s : args.seeds) text << " " << s;
  text << ")\n";
  text << "F1, " << train_split.language << " => target\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%-28s", "arm");
  text << line;
  for (const auto& [label, split] : tests) {
    std::snprintf(line, sizeof(line), " %14s",
                  (train_split.language + "=>" + split.language + ":" + label)
                      .substr(0, 14)
                      .c_str());
    text << line;
  }
  text << "\n";
  for (const auto& arm : arms) {
    std::snprintf(line, sizeof(line), "%-28s", arm.name.c_str());
    text << line;
    for (const auto& [label, split] : tests) {
      std::snprintf(line, sizeof(line), " %14.4f", grid[arm.name][label].f1);
      text << line;
    }
    text << "\n";
  }

  std::string table_path =
      (std::filesystem::path(args.out_dir) / ("ablation_" + args.axis + ".txt"))
          .string();
  write_text_file(guard.track(table_path), text.str());

  nlohmann::json grid_json;
  grid_json["axis"] = args.axis;
  grid_json["seeds"] = args.seeds;
  grid_json["source_language"] = train_split.language;
  for (const auto& arm : arms) {
    for (const auto& [label, split] : tests) {
      const ScoreReport& cell = grid[arm.name][label];
      grid_json["arms"][arm.name][label] = {
          {"target_language", split.language},
          {"precision", cell.precision},
          {"recall", cell.recall},
          {"f1", cell.f1},
          {"num_gold", cell.num_gold},
          {"num_pred", cell.num_pred},
          {"num_correct", cell.num_correct}};
    }
  }
  std::string json_path =
      (std::filesystem::path(args.out_dir) / ("ablation_" + args.axis + ".json"))
          .string();
  write_text_file(guard.track(json_path), grid_json.dump(2));
  guard.commit();
  std::fputs(text.str().c_str(), stdout);
  std::printf("table: %s\n", table_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generation-based cross-lingual event argument extraction"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--train", train_args.train_path, "training instances")
      ->required()
      ->envname("ARGEN_TRAIN");
  train_cmd->add_option("--ontology", train_args.ontology_path, "ontology file")
      ->required()
      ->envname("ARGEN_ONTOLOGY");
  train_cmd->add_option("--out", train_args.out_path, "checkpoint path")
      ->required()
      ->envname("ARGEN_OUT");
  train_cmd->add_option("--tokenizer-corpus", train_args.tokenizer_corpus_path,
                        "extra tokenizer coverage lines")
      ->envname("ARGEN_TOKENIZER_CORPUS");
  train_cmd->add_option("--translation-table", train_args.translation_table_path,
                        "EventType<TAB>language<TAB>token lines")
      ->envname("ARGEN_TRANSLATION_TABLE");
  train_cmd->add_option("--template-style", train_args.template_style,
                        "special_tokens | english_tokens");
  train_cmd->add_option("--event-type-mode", train_args.event_type_mode,
                        "none | english_tokens | translated_tokens | special_tokens");
  train_cmd->add_option("--start-token-mode", train_args.start_token_mode,
                        "shared | per_language");
  train_cmd->add_option("--copy", train_args.copy_mode, "copy mechanism on|off");
  train_cmd->add_option("--backend", train_args.backend, "toy | external");
  train_cmd->add_option("--role-order-seed", train_args.role_order_seed,
                        "permute template roles with this seed");
  train_args.flags.attach(train_cmd);

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "generate predictions");
  predict_cmd->add_option("--checkpoint", predict_args.checkpoint_path, "model")
      ->required()
      ->envname("ARGEN_CHECKPOINT");
  predict_cmd->add_option("--input", predict_args.input_path, "instances")
      ->required()
      ->envname("ARGEN_INPUT");
  predict_cmd->add_option("--ontology", predict_args.ontology_path, "ontology")
      ->required()
      ->envname("ARGEN_ONTOLOGY");
  predict_cmd->add_option("--out", predict_args.out_path, "prediction file")
      ->required()
      ->envname("ARGEN_OUT");
  predict_cmd->add_option("--translation-table",
                          predict_args.translation_table_path, "translations")
      ->envname("ARGEN_TRANSLATION_TABLE");
  predict_cmd->add_option("--template-style", predict_args.template_style,
                          "cross-checked against the checkpoint");
  predict_cmd->add_flag("--override-template-style",
                        predict_args.override_template_style,
                        "decode with a mismatched template style");
  predict_cmd->add_option("--beam", predict_args.beam, "beam width (1 = greedy)");
  predict_cmd->add_option("--max-len", predict_args.max_len, "generation cap");
  predict_cmd->add_flag("--constrained", predict_args.constrained,
                        "restrict generation to input tokens + specials");
  predict_cmd->add_option("--split-max-tokens", predict_args.split_max_tokens,
                          "split sentences at this token count (0 = off)");
  predict_cmd->add_option("--backend", predict_args.backend, "toy | external");

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "score predictions");
  eval_cmd->add_option("--preds", eval_args.preds_path, "prediction file")
      ->required()
      ->envname("ARGEN_PREDS");
  eval_cmd->add_option("--gold", eval_args.gold_path, "gold instances")
      ->required()
      ->envname("ARGEN_GOLD");
  eval_cmd->add_option("--ontology", eval_args.ontology_path, "ontology")
      ->envname("ARGEN_ONTOLOGY");
  eval_cmd->add_option("--out", eval_args.out_path, "text report path")
      ->envname("ARGEN_OUT");
  eval_cmd->add_option("--json", eval_args.json_path, "json report path");
  eval_cmd->add_option("--source-language", eval_args.source_language,
                       "label for source => target reporting");
  eval_cmd->add_option("--target-language", eval_args.target_language,
                       "defaults to the gold split's language");

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "tag failed predictions");
  analyze_cmd->add_option("--preds", analyze_args.preds_path, "prediction file")
      ->required()
      ->envname("ARGEN_PREDS");
  analyze_cmd->add_option("--gold", analyze_args.gold_path, "gold instances")
      ->required()
      ->envname("ARGEN_GOLD");
  analyze_cmd->add_option("--ontology", analyze_args.ontology_path, "ontology")
      ->envname("ARGEN_ONTOLOGY");
  analyze_cmd->add_option("--out", analyze_args.out_path, "report path")
      ->envname("ARGEN_OUT");
  analyze_cmd
      ->add_option("--reference-preds", analyze_args.reference_preds_path,
                   "monolingual reference predictions for both_wrong")
      ->envname("ARGEN_REFERENCE_PREDS");

  AblateArgs ablate_args;
  auto* ablate_cmd = app.add_subcommand("ablate", "sweep one configuration axis");
  ablate_cmd->add_option("--axis", ablate_args.axis,
                         "copy | constrained | event-type-mode | role-order | "
                         "template-style")
      ->required();
  ablate_cmd->add_option("--train", ablate_args.train_path, "training instances")
      ->required()
      ->envname("ARGEN_TRAIN");
  ablate_cmd->add_option("--ontology", ablate_args.ontology_path, "ontology")
      ->required()
      ->envname("ARGEN_ONTOLOGY");
  ablate_cmd->add_option("--test", ablate_args.test_specs,
                         "label=path, repeatable")
      ->required();
  ablate_cmd->add_option("--out-dir", ablate_args.out_dir, "output directory")
      ->required()
      ->envname("ARGEN_OUT_DIR");
  ablate_cmd->add_option("--seeds", ablate_args.seeds, "seeds to average over")
      ->delimiter(',');
  ablate_cmd->add_option("--translation-table",
                         ablate_args.translation_table_path, "translations")
      ->envname("ARGEN_TRANSLATION_TABLE");
  ablate_cmd->add_option("--tokenizer-corpus", ablate_args.tokenizer_corpus_path,
                         "extra tokenizer coverage lines")
      ->envname("ARGEN_TOKENIZER_CORPUS");
  ablate_cmd->add_option("--template-style", ablate_args.template_style,
                         "base template style");
  ablate_cmd->add_option("--beam", ablate_args.beam, "beam width");
  ablate_cmd->add_option("--max-len", ablate_args.max_len, "generation cap");
  ablate_cmd->add_option("--backend", ablate_args.backend, "toy | external");
  ablate_args.flags.attach(ablate_cmd);

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
  synth_cmd->add_option("--out-dir", synth_args.out_dir, "output directory")
      ->required()
      ->envname("ARGEN_OUT_DIR");
  synth_cmd->add_option("--num-event-types", synth_args.config.num_event_types,
                        "event types");
  synth_cmd->add_option("--roles-per-type", synth_args.config.roles_per_type,
                        "roles per event type");
  synth_cmd->add_option("--vocab-size", synth_args.config.vocab_size_per_language,
                        "argument words per language");
  synth_cmd->add_option("--train-size", synth_args.config.num_train_instances,
                        "training instances");
  synth_cmd->add_option("--test-size", synth_args.config.num_test_instances,
                        "instances per test split");
  synth_cmd->add_option("--seed", synth_args.config.seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train_cmd) return run_train(train_args);
    if (*predict_cmd) return run_predict(predict_args);
    if (*eval_cmd) return run_evaluate(eval_args);
    if (*analyze_cmd) return run_analyze(analyze_args);
    if (*ablate_cmd) return run_ablate(ablate_args);
    if (*synth_cmd) return run_synth(synth_args);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "argen: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "argen: %s\n", e.what());
    return 2;
  }
  return 0;
}
