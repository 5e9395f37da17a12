#include <algorithm>

#include "affectlens/emotion_models.hpp"
#include "affectlens/error.hpp"
#include "model_common.hpp"

namespace affectlens {

namespace {
constexpr std::size_t kPadLength = 6;  // largest kernel width
}

struct CnnModel::ForwardCache {
  std::vector<std::vector<double>> embedded;  // T x d, zero-padded
  // Per branch: pre-relu conv values (positions x filters) and argmax row.
  std::vector<double> conv[kBranches];
  std::vector<std::size_t> argmax[kBranches];
  detail::DenseStage stage;
};

CnnModel::CnnModel(const EmbeddingTable* embeddings, std::size_t filters,
                   std::size_t lexicon_dim, std::size_t label_count)
    : embeddings_(embeddings),
      filters_(filters),
      lexicon_dim_(lexicon_dim),
      labels_(label_count) {
  if (!embeddings_ || embeddings_->dim() == 0) {
    throw Error("E_DIMENSION", "cnn model needs a loaded embedding table");
  }
  if (filters_ == 0 || labels_ == 0) {
    throw Error("E_DIMENSION", "cnn model needs positive filter and label counts");
  }
  const std::size_t d = embeddings_->dim();
  for (std::size_t b = 0; b < kBranches; ++b) {
    const std::size_t width = kMinWidth + b;
    kernels_[b] = Tensor({filters_, width, d});
    kernel_biases_[b] = Tensor({filters_});
    kernels_g_[b] = Tensor({filters_, width, d});
    kernel_biases_g_[b] = Tensor({filters_});
  }
  hidden_w_ = Tensor({kHiddenUnits, merged_dim() + lexicon_dim_});
  hidden_b_ = Tensor({kHiddenUnits});
  output_w_ = Tensor({labels_, kHiddenUnits});
  output_b_ = Tensor({labels_});
  hidden_w_g_ = Tensor({kHiddenUnits, merged_dim() + lexicon_dim_});
  hidden_b_g_ = Tensor({kHiddenUnits});
  output_w_g_ = Tensor({labels_, kHiddenUnits});
  output_b_g_ = Tensor({labels_});
}

std::vector<ParamSlot> CnnModel::param_slots() {
  const std::size_t d = embeddings_->dim();
  std::vector<ParamSlot> slots;
  for (std::size_t b = 0; b < kBranches; ++b) {
    const std::size_t width = kMinWidth + b;
    const std::string stem = "cnn.conv" + std::to_string(width);
    slots.push_back({stem + ".weight", &kernels_[b], &kernels_g_[b], width * d});
    slots.push_back(
        {stem + ".bias", &kernel_biases_[b], &kernel_biases_g_[b], width * d});
  }
  const std::size_t merged = merged_dim() + lexicon_dim_;
  slots.push_back({"cnn.hidden.weight", &hidden_w_, &hidden_w_g_, merged});
  slots.push_back({"cnn.hidden.bias", &hidden_b_, &hidden_b_g_, merged});
  slots.push_back({"cnn.output.weight", &output_w_, &output_w_g_, kHiddenUnits});
  slots.push_back({"cnn.output.bias", &output_b_, &output_b_g_, kHiddenUnits});
  return slots;
}

void CnnModel::zero_grads() {
  for (std::size_t b = 0; b < kBranches; ++b) {
    kernels_g_[b].zero();
    kernel_biases_g_[b].zero();
  }
  hidden_w_g_.zero();
  hidden_b_g_.zero();
  output_w_g_.zero();
  output_b_g_.zero();
}

void CnnModel::forward(const TrainItem& item, ForwardCache* cache,
                       std::vector<double>& probs) const {
  if (item.lexicon.size() != lexicon_dim_) {
    throw Error("E_DIMENSION", "lexicon feature dim does not match model");
  }
  const std::size_t d = embeddings_->dim();
  const std::size_t seq = std::max(item.tokens.size(), kPadLength);

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.embedded.assign(seq, std::vector<double>(d, 0.0));
  for (std::size_t t = 0; t < item.tokens.size(); ++t) {
    c.embedded[t] = embeddings_->lookup(item.tokens[t]);
  }

  c.stage.input.assign(merged_dim() + lexicon_dim_, 0.0);
  for (std::size_t b = 0; b < kBranches; ++b) {
    const std::size_t width = kMinWidth + b;
    const std::size_t positions = seq - width + 1;
    c.conv[b].assign(positions * filters_, 0.0);
    c.argmax[b].assign(filters_, 0);
    for (std::size_t t = 0; t < positions; ++t) {
      for (std::size_t f = 0; f < filters_; ++f) {
        double acc = kernel_biases_[b][f];
        const double* kernel = kernels_[b].data.data() + f * width * d;
        for (std::size_t i = 0; i < width; ++i) {
          const double* x = c.embedded[t + i].data();
          const double* krow = kernel + i * d;
          for (std::size_t j = 0; j < d; ++j) acc += krow[j] * x[j];
        }
        c.conv[b][t * filters_ + f] = acc;
      }
    }
    for (std::size_t f = 0; f < filters_; ++f) {
      double best = 0.0;  // relu floor: all-negative convs pool to zero
      std::size_t best_t = 0;
      bool found = false;
      for (std::size_t t = 0; t < positions; ++t) {
        const double v = c.conv[b][t * filters_ + f];
        const double relu = v > 0.0 ? v : 0.0;
        if (!found || relu > best) {
          best = relu;
          best_t = t;
          found = true;
        }
      }
      c.argmax[b][f] = best_t;
      c.stage.input[b * filters_ + f] = best;
    }
  }
  std::copy(item.lexicon.begin(), item.lexicon.end(),
            c.stage.input.begin() + static_cast<std::ptrdiff_t>(merged_dim()));

  detail::dense_forward(hidden_w_, hidden_b_, output_w_, output_b_, c.stage);
  probs = c.stage.p;
}

std::vector<double> CnnModel::activations(const TrainItem& item) const {
  std::vector<double> probs;
  forward(item, nullptr, probs);
  return probs;
}

double CnnModel::batch_loss(const std::vector<const TrainItem*>& batch,
                            bool with_grad) {
  if (batch.empty()) throw Error("E_EMPTY", "empty batch");
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  const double scale = inv_batch / static_cast<double>(labels_);
  const std::size_t d = embeddings_->dim();
  double loss = 0.0;
  ForwardCache cache;
  for (const TrainItem* item : batch) {
    std::vector<double> probs;
    forward(*item, &cache, probs);
    loss += bce_loss(probs, item->bits) * inv_batch;
    if (!with_grad) continue;

    const std::vector<double> du =
        detail::bce_sigmoid_grad(probs, item->bits, scale);
    std::vector<double> d_input;
    detail::dense_backward(hidden_w_, output_w_, cache.stage, du, hidden_w_g_,
                           hidden_b_g_, output_w_g_, output_b_g_, d_input);

    for (std::size_t b = 0; b < kBranches; ++b) {
      const std::size_t width = kMinWidth + b;
      for (std::size_t f = 0; f < filters_; ++f) {
        const double dpool = d_input[b * filters_ + f];
        if (dpool == 0.0) continue;
        const std::size_t t = cache.argmax[b][f];
        if (cache.conv[b][t * filters_ + f] <= 0.0) continue;  // relu gate
        double* kernel_g = kernels_g_[b].data.data() + f * width * d;
        for (std::size_t i = 0; i < width; ++i) {
          const double* x = cache.embedded[t + i].data();
          double* krow_g = kernel_g + i * d;
          for (std::size_t j = 0; j < d; ++j) krow_g[j] += dpool * x[j];
        }
        kernel_biases_g_[b][f] += dpool;
      }
    }
  }
  return loss;
}

std::vector<std::pair<std::string, std::uint64_t>> CnnModel::dims() const {
  return {{"embedding_dim", embeddings_->dim()},
          {"filters", filters_},
          {"lexicon_dim", lexicon_dim_},
          {"label_count", labels_}};
}

}  // namespace affectlens
