#include <algorithm>
#include <cmath>
#include <numeric>

#include "affectlens/adamw.hpp"
#include "affectlens/checkpoint.hpp"
#include "affectlens/emotion_models.hpp"
#include "affectlens/error.hpp"
#include "model_common.hpp"

namespace affectlens {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::head: return "head";
    case ModelKind::cnn: return "cnn";
    case ModelKind::lstm: return "lstm";
  }
  return "";
}

std::optional<ModelKind> model_kind_from_string(std::string_view name) {
  if (name == "head") return ModelKind::head;
  if (name == "cnn") return ModelKind::cnn;
  if (name == "lstm") return ModelKind::lstm;
  return std::nullopt;
}

TrainConfig default_train_config(ModelKind kind) {
  TrainConfig config;
  config.learning_rate = kind == ModelKind::head ? 2e-5 : 1e-3;
  return config;
}

void EmotionModel::init_params(Rng& rng) {
  for (auto& slot : param_slots()) {
    const double bound = std::sqrt(1.0 / static_cast<double>(slot.fan_in));
    for (double& v : slot.value->data) v = rng.uniform(-bound, bound);
  }
}

double bce_loss(const std::vector<double>& probs,
                const std::vector<std::uint8_t>& bits) {
  if (probs.size() != bits.size()) {
    throw Error("E_DIMENSION", "score/label length mismatch");
  }
  if (probs.empty()) throw Error("E_EMPTY", "no labels");
  double sum = 0.0;
  for (std::size_t l = 0; l < probs.size(); ++l) {
    const double p = std::clamp(probs[l], detail::kProbFloor,
                                1.0 - detail::kProbFloor);
    sum += bits[l] ? -std::log(p) : -std::log(1.0 - p);
  }
  return sum / static_cast<double>(probs.size());
}

std::vector<double> head_probabilities(const std::vector<double>& activations) {
  std::vector<double> probs(activations.size());
  for (std::size_t l = 0; l < activations.size(); ++l) {
    probs[l] = 0.5 * (activations[l] + 1.0);
  }
  return probs;
}

std::vector<std::uint8_t> predict_bits(ModelKind kind,
                                       const std::vector<double>& activations) {
  const double threshold =
      kind == ModelKind::head ? kHeadThreshold : kSigmoidThreshold;
  std::vector<std::uint8_t> bits(activations.size(), 0);
  for (std::size_t l = 0; l < activations.size(); ++l) {
    bits[l] = activations[l] > threshold ? 1 : 0;
  }
  return bits;
}

LabelVector predict(const EmotionModel& model, const TrainItem& item,
                    const EmotionTaxonomy& taxonomy) {
  if (taxonomy.size() != model.label_count()) {
    throw Error("E_DIMENSION", "taxonomy size does not match model outputs");
  }
  return {taxonomy.name, predict_bits(model.kind(), model.activations(item))};
}

TrainResult train(EmotionModel& model, const std::vector<TrainItem>& data,
                  const TrainConfig& config, const std::string& checkpoint_path,
                  const std::string& taxonomy) {
  if (data.empty()) throw Error("E_EMPTY", "training dataset is empty");
  for (const auto& item : data) {
    if (item.bits.size() != model.label_count()) {
      throw Error("E_DIMENSION",
                  "item " + item.id + ": label vector length does not match model");
    }
  }

  Rng rng(config.seed);
  model.init_params(rng);

  AdamW optimizer(AdamWConfig{config.learning_rate, config.beta1, config.beta2,
                              config.epsilon, config.weight_decay});
  const std::size_t batch_size = std::max<std::size_t>(1, config.batch_size);

  TrainResult result;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      std::vector<const TrainItem*> batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) batch.push_back(&data[order[i]]);
      model.zero_grads();
      epoch_loss += model.batch_loss(batch, /*with_grad=*/true);
      optimizer.step(model.param_slots());
      ++batches;
    }
    result.epoch_losses.push_back(epoch_loss / static_cast<double>(batches));
  }

  if (!checkpoint_path.empty()) {
    save_checkpoint(checkpoint_path, model, config, taxonomy, &optimizer);
  }
  return result;
}

}  // namespace affectlens
