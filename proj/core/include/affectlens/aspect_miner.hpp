#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "affectlens/embedding_store.hpp"
#include "affectlens/tensor.hpp"
#include "affectlens/timeparse.hpp"

namespace affectlens {

struct AspectConfig {
  std::size_t aspect_count = 14;
  std::size_t negative_samples = 20;
  double ortho_weight = 0.1;
  std::size_t epochs = 15;
  double learning_rate = 1e-3;
  std::size_t batch_size = 50;
  std::uint64_t seed = 0;
  std::size_t kmeans_iterations = 20;
};

// Attention-based aspect autoencoder. Word embeddings are tied to the
// (frozen) vocabulary matrix; only T, M, W and b train.
struct AspectModel {
  std::size_t aspect_count = 0;
  std::size_t dim = 0;
  Tensor aspects;    // T: K x d, reconstruction dictionary
  Tensor attention;  // M: d x d, bilinear attention
  Tensor weight;     // W: K x d, aspect-probability layer
  Tensor bias;       // b: K
  std::vector<std::string> vocab;  // corpus (and table) words, frozen order
  Tensor word_vectors;             // V x d
  std::unordered_map<std::string, std::size_t> vocab_index;

  // Call after filling vocab by hand (train_abae maintains it itself).
  void rebuild_vocab_index();
};

struct SentenceEncoding {
  std::vector<double> attention;  // one weight per in-vocabulary token
  std::vector<double> vector;     // z, convex combination of word vectors
};

// a_i proportional to exp(e_i' M ybar) with ybar the mean word vector;
// z = sum a_i e_i. Returns nullopt when no token is in vocabulary.
std::optional<SentenceEncoding> attention_encode(
    const std::vector<std::string>& tokens, const AspectModel& model);

struct Reconstruction {
  std::vector<double> probs;  // p = softmax(W z + b), sums to 1
  std::vector<double> recon;  // r = T' p
};

Reconstruction reconstruct(const std::vector<double>& z, const AspectModel& model);

// sum_s sum_j max(0, 1 - r_s.z_s + r_s.n_j)  +  lambda * ||Tn Tn' - I||_F^2
// with Tn the row-normalized aspect matrix.
double abae_loss(const std::vector<SentenceEncoding>& batch,
                 const std::vector<std::vector<std::vector<double>>>& negatives,
                 const AspectModel& model, double ortho_weight);

// ||Tn Tn' - I||_F^2 alone.
double ortho_penalty(const Tensor& aspects);

// A fixed mini-batch: sentences as vocabulary row indices plus the drawn
// negative vectors (mean word vectors of other sentences).
struct AbaeBatch {
  std::vector<std::vector<std::size_t>> sentences;
  std::vector<std::vector<std::vector<double>>> negatives;
};

// Same objective as abae_loss, recomputed from the word indices, with
// analytic gradients for T, M, W, b accumulated into the given tensors
// (any may be null for a loss-only evaluation).
double abae_loss_and_grad(const AbaeBatch& batch, const AspectModel& model,
                          double ortho_weight, Tensor* aspects_g,
                          Tensor* attention_g, Tensor* weight_g,
                          Tensor* bias_g);

struct AbaeTrainLog {
  std::vector<double> epoch_losses;
  std::vector<double> epoch_penalties;  // ortho penalty after each epoch
  double initial_penalty = 0.0;
  std::size_t sentences_used = 0;
  std::size_t sentences_skipped = 0;
};

// K-means(++) centroids over the vocabulary seed T; mini-batch AdamW on the
// max-margin objective. Deterministic per config.seed.
AspectModel train_abae(const std::vector<std::vector<std::string>>& corpus,
                       const EmbeddingTable& embeddings,
                       const AspectConfig& config,
                       AbaeTrainLog* log = nullptr);

// n vocabulary words closest (cosine) to aspect k, descending, ties by
// lexicographic order.
std::vector<std::pair<std::string, double>> top_terms(const AspectModel& model,
                                                      std::size_t aspect,
                                                      std::size_t n);

// Editable term -> subcategory names map (JSON object of arrays).
struct SubcategoryMap {
  std::unordered_map<std::string, std::vector<std::string>> term_to_subcats;
  static SubcategoryMap load(const std::string& path);
};

struct AspectSentence {
  std::string id;
  EpochSeconds created_at = 0;
  std::vector<std::string> tokens;
};

struct SubcatSeries {
  std::vector<EpochSeconds> window_starts;
  std::vector<std::string> subcategories;  // sorted; "other" when unmapped
  std::vector<std::vector<std::size_t>> counts;  // [window][subcategory]
};

// Assigns every sentence its argmax aspect, maps the aspect's top terms
// through the subcategory map (many-to-many), and aggregates counts per
// trend window.
SubcatSeries assign_subcategories(const AspectModel& model,
                                  const SubcategoryMap& map,
                                  const std::vector<AspectSentence>& sentences,
                                  EpochSeconds origin,
                                  EpochSeconds window_seconds = 7 * 86400,
                                  std::size_t terms_per_aspect = 10);

void write_subcats_csv(std::ostream& os, const SubcatSeries& series,
                       std::uint64_t seed);

}  // namespace affectlens
