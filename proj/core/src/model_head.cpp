#include <cmath>

#include "affectlens/emotion_models.hpp"
#include "affectlens/error.hpp"
#include "model_common.hpp"

namespace affectlens {

HeadModel::HeadModel(std::size_t sentence_dim, std::size_t lexicon_dim,
                     std::size_t label_count)
    : sentence_dim_(sentence_dim),
      lexicon_dim_(lexicon_dim),
      labels_(label_count),
      weight_({label_count, sentence_dim + lexicon_dim}),
      bias_({label_count}),
      weight_g_({label_count, sentence_dim + lexicon_dim}),
      bias_g_({label_count}) {
  if (label_count == 0 || sentence_dim + lexicon_dim == 0) {
    throw Error("E_DIMENSION", "head model needs positive input and label dims");
  }
}

std::vector<ParamSlot> HeadModel::param_slots() {
  const std::size_t fan_in = input_dim();
  return {
      {"head.weight", &weight_, &weight_g_, fan_in},
      {"head.bias", &bias_, &bias_g_, fan_in},
  };
}

void HeadModel::zero_grads() {
  weight_g_.zero();
  bias_g_.zero();
}

std::vector<double> HeadModel::activations(const TrainItem& item) const {
  if (item.sentence.size() != sentence_dim_ ||
      item.lexicon.size() != lexicon_dim_) {
    throw Error("E_DIMENSION", "head input dims do not match model");
  }
  std::vector<double> acts(labels_, 0.0);
  for (std::size_t l = 0; l < labels_; ++l) {
    double acc = bias_[l];
    const double* row = weight_.data.data() + l * input_dim();
    for (std::size_t k = 0; k < sentence_dim_; ++k) acc += row[k] * item.sentence[k];
    for (std::size_t k = 0; k < lexicon_dim_; ++k) {
      acc += row[sentence_dim_ + k] * item.lexicon[k];
    }
    acts[l] = std::tanh(acc);
  }
  return acts;
}

double HeadModel::batch_loss(const std::vector<const TrainItem*>& batch,
                             bool with_grad) {
  if (batch.empty()) throw Error("E_EMPTY", "empty batch");
  const double scale =
      1.0 / (static_cast<double>(labels_) * static_cast<double>(batch.size()));
  double loss = 0.0;
  for (const TrainItem* item : batch) {
    const std::vector<double> acts = activations(*item);
    const std::vector<double> probs = head_probabilities(acts);
    loss += bce_loss(probs, item->bits) / static_cast<double>(batch.size());
    if (!with_grad) continue;
    // (tanh(u)+1)/2 == sigmoid(2u), so dL/du = 2*(p-y)*scale.
    for (std::size_t l = 0; l < labels_; ++l) {
      if (probs[l] <= detail::kProbFloor || probs[l] >= 1.0 - detail::kProbFloor) {
        continue;
      }
      const double du =
          2.0 * scale * (probs[l] - static_cast<double>(item->bits[l]));
      double* wrow_g = weight_g_.data.data() + l * input_dim();
      for (std::size_t k = 0; k < sentence_dim_; ++k) {
        wrow_g[k] += du * item->sentence[k];
      }
      for (std::size_t k = 0; k < lexicon_dim_; ++k) {
        wrow_g[sentence_dim_ + k] += du * item->lexicon[k];
      }
      bias_g_[l] += du;
    }
  }
  return loss;
}

std::vector<std::pair<std::string, std::uint64_t>> HeadModel::dims() const {
  return {{"sentence_dim", sentence_dim_},
          {"lexicon_dim", lexicon_dim_},
          {"label_count", labels_}};
}

}  // namespace affectlens
