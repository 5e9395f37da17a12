#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "affectlens/emotion_models.hpp"
#include "affectlens/tensor.hpp"

namespace affectlens {

class AdamW;

// On-disk layout (documented in docs/checkpoint_format.md):
//   bytes 0..7   magic "AFLCKPT1"
//   bytes 8..11  u32 little-endian manifest length N
//   N bytes      manifest JSON (model kind, dims, taxonomy, config, seed,
//                array directory in order)
//   then         each array's doubles, little-endian, in directory order
struct Checkpoint {
  std::string format;
  ModelKind kind = ModelKind::head;
  std::string taxonomy;
  TrainConfig config;
  std::vector<std::pair<std::string, std::uint64_t>> dims;
  std::vector<std::pair<std::string, Tensor>> arrays;
  std::uint64_t optimizer_steps = 0;

  const Tensor* find_array(const std::string& name) const;
  std::uint64_t dim(const std::string& name) const;  // throws when absent
};

void save_checkpoint(const std::string& path, EmotionModel& model,
                     const TrainConfig& config, const std::string& taxonomy,
                     const AdamW* optimizer);

Checkpoint read_checkpoint(const std::string& path);

// Rebuilds the model and loads its parameters. Sequence models need the
// same embedding table they were trained with.
std::unique_ptr<EmotionModel> model_from_checkpoint(
    const Checkpoint& ckpt, const EmbeddingTable* embeddings);

}  // namespace affectlens
