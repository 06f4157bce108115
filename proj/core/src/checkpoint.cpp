#include "argen/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace argen {

namespace {

constexpr char kMagic[8] = {'A', 'R', 'G', 'E', 'N', 'C', 'K', 'P'};

using nlohmann::json;

json transformer_to_json(const TransformerConfig& c) {
  return json{{"vocab_size", c.vocab_size},
              {"d_model", c.d_model},
              {"num_heads", c.num_heads},
              {"num_encoder_layers", c.num_encoder_layers},
              {"num_decoder_layers", c.num_decoder_layers},
              {"ffn_dim", c.ffn_dim},
              {"max_source_positions", c.max_source_positions},
              {"max_target_positions", c.max_target_positions},
              {"init_seed", c.init_seed}};
}

TransformerConfig transformer_from_json(const json& j) {
  TransformerConfig c;
  c.vocab_size = j.at("vocab_size").get<int>();
  c.d_model = j.at("d_model").get<int>();
  c.num_heads = j.at("num_heads").get<int>();
  c.num_encoder_layers = j.at("num_encoder_layers").get<int>();
  c.num_decoder_layers = j.at("num_decoder_layers").get<int>();
  c.ffn_dim = j.at("ffn_dim").get<int>();
  c.max_source_positions = j.at("max_source_positions").get<int>();
  c.max_target_positions = j.at("max_target_positions").get<int>();
  c.init_seed = j.at("init_seed").get<std::uint64_t>();
  return c;
}

template <typename T>
void write_raw(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return value;
}

}  // namespace

Checkpoint make_checkpoint(const CopyModel& model, const BpeTokenizer& tokenizer,
                           const TrainConfig& train_config) {
  Checkpoint ck;
  ck.transformer = model.config();
  ck.use_copy = model.use_copy();
  ck.template_style = train_config.template_style;
  ck.event_type_mode = train_config.event_type_mode;
  ck.start_token_mode = train_config.start_token_mode;
  ck.role_order_seed = train_config.role_order_seed;
  ck.tokenizer = tokenizer;
  for (const auto& [name, var] : model.params().all())
    ck.tensors.emplace_back(name, var.value());
  return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot write '" + path + "'");

  json meta;
  meta["format_version"] = Checkpoint::kFormatVersion;
  meta["transformer"] = transformer_to_json(ck.transformer);
  meta["use_copy"] = ck.use_copy;
  meta["template_style"] = to_string(ck.template_style);
  meta["event_type_mode"] = to_string(ck.event_type_mode);
  meta["start_token_mode"] = to_string(ck.start_token_mode);
  if (ck.role_order_seed) meta["role_order_seed"] = *ck.role_order_seed;
  meta["tokenizer"] = {{"vocab", ck.tokenizer.vocab()},
                       {"merges", ck.tokenizer.merges()},
                       {"reserved", ck.tokenizer.reserved_tokens()}};
  json index = json::array();
  for (const auto& [name, tensor] : ck.tensors)
    index.push_back({{"name", name},
                     {"rows", tensor.rows()},
                     {"cols", tensor.cols()}});
  meta["tensors"] = index;

  std::string meta_str = meta.dump();
  out.write(kMagic, sizeof(kMagic));
  write_raw<std::uint32_t>(out, Checkpoint::kFormatVersion);
  write_raw<std::uint64_t>(out, meta_str.size());
  out.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));
  for (const auto& [name, tensor] : ck.tensors)
    out.write(reinterpret_cast<const char*>(tensor.data()),
              static_cast<std::streamsize>(sizeof(double) *
                                           static_cast<std::size_t>(tensor.size())));
  if (!out) throw std::runtime_error("checkpoint: write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open '" + path + "'");

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("checkpoint: bad magic in '" + path + "'");
  auto version = read_raw<std::uint32_t>(in);
  if (version != Checkpoint::kFormatVersion)
    throw std::runtime_error("checkpoint: unsupported format version " +
                             std::to_string(version));
  auto meta_len = read_raw<std::uint64_t>(in);
  std::string meta_str(meta_len, '\0');
  in.read(meta_str.data(), static_cast<std::streamsize>(meta_len));
  if (!in) throw std::runtime_error("checkpoint: truncated metadata");
  json meta = json::parse(meta_str);

  Checkpoint ck;
  ck.transformer = transformer_from_json(meta.at("transformer"));
  ck.use_copy = meta.at("use_copy").get<bool>();
  auto style = template_style_from_string(meta.at("template_style").get<std::string>());
  auto mode = event_type_mode_from_string(meta.at("event_type_mode").get<std::string>());
  auto start = start_token_mode_from_string(meta.at("start_token_mode").get<std::string>());
  if (!style || !mode || !start)
    throw std::runtime_error("checkpoint: unrecognized enum in metadata");
  ck.template_style = *style;
  ck.event_type_mode = *mode;
  ck.start_token_mode = *start;
  if (meta.contains("role_order_seed"))
    ck.role_order_seed = meta.at("role_order_seed").get<std::uint64_t>();

  const auto& tk = meta.at("tokenizer");
  ck.tokenizer = BpeTokenizer::from_tables(
      tk.at("vocab").get<std::vector<std::string>>(),
      tk.at("merges").get<std::vector<std::pair<int, int>>>(),
      tk.at("reserved").get<std::vector<std::string>>());

  for (const auto& entry : meta.at("tensors")) {
    Eigen::Index rows = entry.at("rows").get<Eigen::Index>();
    Eigen::Index cols = entry.at("cols").get<Eigen::Index>();
    ad::Matrix tensor(rows, cols);
    in.read(reinterpret_cast<char*>(tensor.data()),
            static_cast<std::streamsize>(sizeof(double) *
                                         static_cast<std::size_t>(tensor.size())));
    if (!in) throw std::runtime_error("checkpoint: truncated tensor data");
    ck.tensors.emplace_back(entry.at("name").get<std::string>(), std::move(tensor));
  }
  return ck;
}

std::unique_ptr<CopyModel> model_from_checkpoint(const Checkpoint& ck) {
  auto model = std::make_unique<CopyModel>(ck.transformer, ck.use_copy);
  for (const auto& [name, tensor] : ck.tensors) {
    if (!model->params().has(name))
      throw std::runtime_error("checkpoint: unexpected tensor '" + name + "'");
    ad::Var var = model->params().get(name);
    if (var.value().rows() != tensor.rows() || var.value().cols() != tensor.cols())
      throw std::runtime_error("checkpoint: shape mismatch for '" + name + "'");
    var.mutable_value() = tensor;
  }
  return model;
}

}  // namespace argen
