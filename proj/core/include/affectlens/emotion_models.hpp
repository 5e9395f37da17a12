#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "affectlens/embedding_store.hpp"
#include "affectlens/rng.hpp"
#include "affectlens/taxonomy.hpp"
#include "affectlens/tensor.hpp"

namespace affectlens {

enum class ModelKind { head, cnn, lstm };

std::string to_string(ModelKind kind);
std::optional<ModelKind> model_kind_from_string(std::string_view name);

// Label present iff tanh activation strictly exceeds this (head model).
inline constexpr double kHeadThreshold = 0.33;
// Sigmoid models threshold their probabilities at 0.5, strictly.
inline constexpr double kSigmoidThreshold = 0.5;

struct TrainConfig {
  std::size_t epochs = 5;
  double learning_rate = 2e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
};

// Paper defaults: lr 2e-5 for the head; the sequence models use 1e-3.
TrainConfig default_train_config(ModelKind kind);

struct ParamSlot {
  std::string name;
  Tensor* value;
  Tensor* grad;
  std::size_t fan_in;  // drives the uniform(+-sqrt(1/fan_in)) init
};

struct TrainItem {
  std::string id;
  std::vector<std::string> tokens;   // sequence-model input
  std::vector<double> sentence;      // head input
  std::vector<double> lexicon;
  std::vector<std::uint8_t> bits;
};

class EmotionModel {
 public:
  virtual ~EmotionModel() = default;

  virtual ModelKind kind() const = 0;
  virtual std::size_t label_count() const = 0;
  virtual std::vector<ParamSlot> param_slots() = 0;
  virtual void zero_grads() = 0;

  // Sigmoid probabilities (cnn/lstm) or raw tanh values (head).
  virtual std::vector<double> activations(const TrainItem& item) const = 0;

  // Mean multi-label BCE over the batch; accumulates parameter gradients
  // of that mean when with_grad is set.
  virtual double batch_loss(const std::vector<const TrainItem*>& batch,
                            bool with_grad) = 0;

  // Reconstruction info for checkpoints: name -> dimension.
  virtual std::vector<std::pair<std::string, std::uint64_t>> dims() const = 0;

  void init_params(Rng& rng);
};

// tanh over one fully connected layer on concat(sentence, lexicon).
class HeadModel final : public EmotionModel {
 public:
  HeadModel(std::size_t sentence_dim, std::size_t lexicon_dim,
            std::size_t label_count);

  std::size_t input_dim() const { return sentence_dim_ + lexicon_dim_; }
  std::size_t sentence_dim() const { return sentence_dim_; }
  std::size_t lexicon_dim() const { return lexicon_dim_; }

  ModelKind kind() const override { return ModelKind::head; }
  std::size_t label_count() const override { return labels_; }
  std::vector<ParamSlot> param_slots() override;
  void zero_grads() override;
  std::vector<double> activations(const TrainItem& item) const override;
  double batch_loss(const std::vector<const TrainItem*>& batch,
                    bool with_grad) override;
  std::vector<std::pair<std::string, std::uint64_t>> dims() const override;

 private:
  std::size_t sentence_dim_, lexicon_dim_, labels_;
  Tensor weight_, bias_;        // (L, E+P), (L)
  Tensor weight_g_, bias_g_;
};

// Five parallel 1-D convolutions (widths 2..6, F filters each) over word
// embeddings, ReLU, max-pool over time, merged and concatenated with the
// lexicon features, then a 128-unit ReLU hidden layer and sigmoid outputs.
class CnnModel final : public EmotionModel {
 public:
  static constexpr std::size_t kMinWidth = 2;
  static constexpr std::size_t kMaxWidth = 6;
  static constexpr std::size_t kBranches = 5;
  static constexpr std::size_t kHiddenUnits = 128;

  CnnModel(const EmbeddingTable* embeddings, std::size_t filters,
           std::size_t lexicon_dim, std::size_t label_count);

  std::size_t filters() const { return filters_; }
  std::size_t merged_dim() const { return kBranches * filters_; }

  ModelKind kind() const override { return ModelKind::cnn; }
  std::size_t label_count() const override { return labels_; }
  std::vector<ParamSlot> param_slots() override;
  void zero_grads() override;
  std::vector<double> activations(const TrainItem& item) const override;
  double batch_loss(const std::vector<const TrainItem*>& batch,
                    bool with_grad) override;
  std::vector<std::pair<std::string, std::uint64_t>> dims() const override;

 private:
  struct ForwardCache;
  void forward(const TrainItem& item, ForwardCache* cache,
               std::vector<double>& probs) const;

  const EmbeddingTable* embeddings_;
  std::size_t filters_, lexicon_dim_, labels_;
  Tensor kernels_[kBranches];   // (F, width, d)
  Tensor kernel_biases_[kBranches];
  Tensor hidden_w_, hidden_b_;  // (128, 5F+P), (128)
  Tensor output_w_, output_b_;  // (L, 128), (L)
  Tensor kernels_g_[kBranches], kernel_biases_g_[kBranches];
  Tensor hidden_w_g_, hidden_b_g_, output_w_g_, output_b_g_;
};

// Single unidirectional LSTM layer; the last hidden state, concatenated
// with the lexicon features, feeds the same 128-unit head as the CNN.
class LstmModel final : public EmotionModel {
 public:
  static constexpr std::size_t kHiddenUnits = 128;

  LstmModel(const EmbeddingTable* embeddings, std::size_t hidden_dim,
            std::size_t lexicon_dim, std::size_t label_count);

  std::size_t hidden_dim() const { return hidden_dim_; }

  ModelKind kind() const override { return ModelKind::lstm; }
  std::size_t label_count() const override { return labels_; }
  std::vector<ParamSlot> param_slots() override;
  void zero_grads() override;
  std::vector<double> activations(const TrainItem& item) const override;
  double batch_loss(const std::vector<const TrainItem*>& batch,
                    bool with_grad) override;
  std::vector<std::pair<std::string, std::uint64_t>> dims() const override;

 private:
  struct ForwardCache;
  void forward(const TrainItem& item, ForwardCache* cache,
               std::vector<double>& probs) const;

  const EmbeddingTable* embeddings_;
  std::size_t hidden_dim_, lexicon_dim_, labels_;
  // Gate rows stacked input/forget/cell/output.
  Tensor wx_, wh_, b_;          // (4H, d), (4H, H), (4H)
  Tensor hidden_w_, hidden_b_;  // (128, H+P), (128)
  Tensor output_w_, output_b_;  // (L, 128), (L)
  Tensor wx_g_, wh_g_, b_g_, hidden_w_g_, hidden_b_g_, output_w_g_, output_b_g_;
};

// Mean over labels of -[y ln p + (1-y) ln(1-p)], p clamped to
// [1e-12, 1-1e-12]. Head activations map through (a+1)/2 first.
double bce_loss(const std::vector<double>& probs,
                const std::vector<std::uint8_t>& bits);

std::vector<double> head_probabilities(const std::vector<double>& activations);

// Strict-inequality thresholding per model kind.
std::vector<std::uint8_t> predict_bits(ModelKind kind,
                                       const std::vector<double>& activations);

LabelVector predict(const EmotionModel& model, const TrainItem& item,
                    const EmotionTaxonomy& taxonomy);

struct TrainResult {
  std::vector<double> epoch_losses;  // mean of batch losses per epoch
};

// Seeded init + epochs x shuffled mini-batches of AdamW. Writes a
// checkpoint when a path is given. Bit-reproducible from config.seed.
TrainResult train(EmotionModel& model, const std::vector<TrainItem>& data,
                  const TrainConfig& config,
                  const std::string& checkpoint_path = "",
                  const std::string& taxonomy = "");

}  // namespace affectlens
