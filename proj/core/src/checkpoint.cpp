#include "affectlens/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "affectlens/adamw.hpp"
#include "affectlens/error.hpp"

namespace affectlens {

namespace {

constexpr char kMagic[8] = {'A', 'F', 'L', 'C', 'K', 'P', 'T', '1'};
constexpr const char* kFormat = "affectlens.ckpt.v1";

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b, 4);
}

std::uint32_t get_u32(std::istream& is) {
  char b[4];
  is.read(b, 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  }
  return v;
}

void write_doubles_le(std::ostream& os, const std::vector<double>& values) {
  std::string buf;
  buf.resize(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int k = 0; k < 8; ++k) {
      buf[i * 8 + static_cast<std::size_t>(k)] =
          static_cast<char>((bits >> (8 * k)) & 0xFF);
    }
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void read_doubles_le(std::istream& is, std::vector<double>& values) {
  std::string buf;
  buf.resize(values.size() * 8);
  is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) {
      bits |= static_cast<std::uint64_t>(
                  static_cast<unsigned char>(buf[i * 8 + static_cast<std::size_t>(k)]))
              << (8 * k);
    }
    values[i] = std::bit_cast<double>(bits);
  }
}

nlohmann::json config_to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon},
          {"weight_decay", c.weight_decay},
          {"batch_size", c.batch_size},
          {"seed", c.seed}};
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.weight_decay = j.at("weight_decay").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

const Tensor* Checkpoint::find_array(const std::string& name) const {
  for (const auto& [n, t] : arrays) {
    if (n == name) return &t;
  }
  return nullptr;
}

std::uint64_t Checkpoint::dim(const std::string& name) const {
  for (const auto& [n, v] : dims) {
    if (n == name) return v;
  }
  throw Error("E_CHECKPOINT", "checkpoint is missing dimension: " + name);
}

void save_checkpoint(const std::string& path, EmotionModel& model,
                     const TrainConfig& config, const std::string& taxonomy,
                     const AdamW* optimizer) {
  std::vector<std::pair<std::string, const Tensor*>> arrays;
  const auto slots = model.param_slots();
  for (const auto& s : slots) arrays.emplace_back(s.name, s.value);
  if (optimizer && optimizer->step_count() > 0) {
    const auto& m = optimizer->first_moments();
    const auto& v = optimizer->second_moments();
    for (std::size_t i = 0; i < slots.size(); ++i) {
      arrays.emplace_back("adamw.m." + slots[i].name, &m[i]);
      arrays.emplace_back("adamw.v." + slots[i].name, &v[i]);
    }
  }

  nlohmann::json manifest;
  manifest["format"] = kFormat;
  manifest["model"] = to_string(model.kind());
  manifest["taxonomy"] = taxonomy;
  manifest["seed"] = config.seed;
  manifest["config"] = config_to_json(config);
  manifest["optimizer_steps"] = optimizer ? optimizer->step_count() : 0;
  nlohmann::json dims = nlohmann::json::object();
  for (const auto& [name, value] : model.dims()) dims[name] = value;
  manifest["dims"] = dims;
  nlohmann::json dir = nlohmann::json::array();
  for (const auto& [name, tensor] : arrays) {
    dir.push_back({{"name", name}, {"shape", tensor->shape}});
  }
  manifest["arrays"] = dir;

  const std::string manifest_bytes = manifest.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("E_IO", "cannot write checkpoint: " + path);
  out.write(kMagic, 8);
  put_u32(out, static_cast<std::uint32_t>(manifest_bytes.size()));
  out.write(manifest_bytes.data(),
            static_cast<std::streamsize>(manifest_bytes.size()));
  for (const auto& [name, tensor] : arrays) write_doubles_le(out, tensor->data);
  if (!out) throw Error("E_IO", "short write to checkpoint: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("E_IO", "cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) {
    throw Error("E_CHECKPOINT", "not a checkpoint file: " + path);
  }
  const std::uint32_t len = get_u32(in);
  std::string manifest_bytes(len, '\0');
  in.read(manifest_bytes.data(), len);
  if (!in) throw Error("E_CHECKPOINT", "truncated checkpoint manifest: " + path);

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(manifest_bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("E_CHECKPOINT", path + ": bad manifest: " + e.what());
  }

  Checkpoint ckpt;
  ckpt.format = manifest.at("format").get<std::string>();
  if (ckpt.format != kFormat) {
    throw Error("E_CHECKPOINT", "unsupported checkpoint format: " + ckpt.format);
  }
  const auto kind = model_kind_from_string(manifest.at("model").get<std::string>());
  if (!kind) throw Error("E_CHECKPOINT", "unknown model kind in checkpoint");
  ckpt.kind = *kind;
  ckpt.taxonomy = manifest.at("taxonomy").get<std::string>();
  ckpt.config = config_from_json(manifest.at("config"));
  ckpt.optimizer_steps = manifest.at("optimizer_steps").get<std::uint64_t>();
  for (const auto& [name, value] : manifest.at("dims").items()) {
    ckpt.dims.emplace_back(name, value.get<std::uint64_t>());
  }
  for (const auto& entry : manifest.at("arrays")) {
    const auto name = entry.at("name").get<std::string>();
    const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
    Tensor t(shape);
    read_doubles_le(in, t.data);
    if (!in) throw Error("E_CHECKPOINT", "truncated checkpoint arrays: " + path);
    ckpt.arrays.emplace_back(name, std::move(t));
  }
  return ckpt;
}

std::unique_ptr<EmotionModel> model_from_checkpoint(
    const Checkpoint& ckpt, const EmbeddingTable* embeddings) {
  std::unique_ptr<EmotionModel> model;
  switch (ckpt.kind) {
    case ModelKind::head:
      model = std::make_unique<HeadModel>(ckpt.dim("sentence_dim"),
                                          ckpt.dim("lexicon_dim"),
                                          ckpt.dim("label_count"));
      break;
    case ModelKind::cnn:
      if (!embeddings) {
        throw Error("E_CHECKPOINT", "cnn checkpoint needs an embedding table");
      }
      if (embeddings->dim() != ckpt.dim("embedding_dim")) {
        throw Error("E_DIMENSION", "embedding table dim does not match checkpoint");
      }
      model = std::make_unique<CnnModel>(embeddings, ckpt.dim("filters"),
                                         ckpt.dim("lexicon_dim"),
                                         ckpt.dim("label_count"));
      break;
    case ModelKind::lstm:
      if (!embeddings) {
        throw Error("E_CHECKPOINT", "lstm checkpoint needs an embedding table");
      }
      if (embeddings->dim() != ckpt.dim("embedding_dim")) {
        throw Error("E_DIMENSION", "embedding table dim does not match checkpoint");
      }
      model = std::make_unique<LstmModel>(embeddings, ckpt.dim("hidden_dim"),
                                          ckpt.dim("lexicon_dim"),
                                          ckpt.dim("label_count"));
      break;
  }
  for (auto& slot : model->param_slots()) {
    const Tensor* stored = ckpt.find_array(slot.name);
    if (!stored) {
      throw Error("E_CHECKPOINT", "checkpoint is missing array: " + slot.name);
    }
    if (!stored->same_shape(*slot.value)) {
      throw Error("E_CHECKPOINT", "shape mismatch for array: " + slot.name);
    }
    *slot.value = *stored;
  }
  return model;
}

}  // namespace affectlens
