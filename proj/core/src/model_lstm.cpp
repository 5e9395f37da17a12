#include <algorithm>
#include <cmath>

#include "affectlens/emotion_models.hpp"
#include "affectlens/error.hpp"
#include "model_common.hpp"

namespace affectlens {

struct LstmModel::ForwardCache {
  // One entry per time step.
  std::vector<std::vector<double>> x;           // inputs (d)
  std::vector<std::vector<double>> gate_i, gate_f, gate_g, gate_o;  // (H)
  std::vector<std::vector<double>> c, h, tanh_c;                    // (H)
  detail::DenseStage stage;
};

LstmModel::LstmModel(const EmbeddingTable* embeddings, std::size_t hidden_dim,
                     std::size_t lexicon_dim, std::size_t label_count)
    : embeddings_(embeddings),
      hidden_dim_(hidden_dim),
      lexicon_dim_(lexicon_dim),
      labels_(label_count) {
  if (!embeddings_ || embeddings_->dim() == 0) {
    throw Error("E_DIMENSION", "lstm model needs a loaded embedding table");
  }
  if (hidden_dim_ == 0 || labels_ == 0) {
    throw Error("E_DIMENSION", "lstm model needs positive hidden and label dims");
  }
  const std::size_t d = embeddings_->dim();
  wx_ = Tensor({4 * hidden_dim_, d});
  wh_ = Tensor({4 * hidden_dim_, hidden_dim_});
  b_ = Tensor({4 * hidden_dim_});
  hidden_w_ = Tensor({kHiddenUnits, hidden_dim_ + lexicon_dim_});
  hidden_b_ = Tensor({kHiddenUnits});
  output_w_ = Tensor({labels_, kHiddenUnits});
  output_b_ = Tensor({labels_});
  wx_g_ = Tensor({4 * hidden_dim_, d});
  wh_g_ = Tensor({4 * hidden_dim_, hidden_dim_});
  b_g_ = Tensor({4 * hidden_dim_});
  hidden_w_g_ = Tensor({kHiddenUnits, hidden_dim_ + lexicon_dim_});
  hidden_b_g_ = Tensor({kHiddenUnits});
  output_w_g_ = Tensor({labels_, kHiddenUnits});
  output_b_g_ = Tensor({labels_});
}

std::vector<ParamSlot> LstmModel::param_slots() {
  const std::size_t d = embeddings_->dim();
  const std::size_t merged = hidden_dim_ + lexicon_dim_;
  return {
      {"lstm.wx", &wx_, &wx_g_, d},
      {"lstm.wh", &wh_, &wh_g_, hidden_dim_},
      {"lstm.bias", &b_, &b_g_, hidden_dim_},
      {"lstm.hidden.weight", &hidden_w_, &hidden_w_g_, merged},
      {"lstm.hidden.bias", &hidden_b_, &hidden_b_g_, merged},
      {"lstm.output.weight", &output_w_, &output_w_g_, kHiddenUnits},
      {"lstm.output.bias", &output_b_, &output_b_g_, kHiddenUnits},
  };
}

void LstmModel::zero_grads() {
  wx_g_.zero();
  wh_g_.zero();
  b_g_.zero();
  hidden_w_g_.zero();
  hidden_b_g_.zero();
  output_w_g_.zero();
  output_b_g_.zero();
}

void LstmModel::forward(const TrainItem& item, ForwardCache* cache,
                        std::vector<double>& probs) const {
  if (item.lexicon.size() != lexicon_dim_) {
    throw Error("E_DIMENSION", "lexicon feature dim does not match model");
  }
  const std::size_t d = embeddings_->dim();
  const std::size_t H = hidden_dim_;
  const std::size_t T = item.tokens.size();

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.x.assign(T, {});
  c.gate_i.assign(T, std::vector<double>(H));
  c.gate_f.assign(T, std::vector<double>(H));
  c.gate_g.assign(T, std::vector<double>(H));
  c.gate_o.assign(T, std::vector<double>(H));
  c.c.assign(T, std::vector<double>(H));
  c.h.assign(T, std::vector<double>(H));
  c.tanh_c.assign(T, std::vector<double>(H));

  std::vector<double> h_prev(H, 0.0), c_prev(H, 0.0);
  std::vector<double> gates(4 * H);
  for (std::size_t t = 0; t < T; ++t) {
    c.x[t] = embeddings_->lookup(item.tokens[t]);
    const double* x = c.x[t].data();
    for (std::size_t r = 0; r < 4 * H; ++r) {
      double acc = b_[r];
      const double* wx_row = wx_.data.data() + r * d;
      for (std::size_t j = 0; j < d; ++j) acc += wx_row[j] * x[j];
      const double* wh_row = wh_.data.data() + r * H;
      for (std::size_t j = 0; j < H; ++j) acc += wh_row[j] * h_prev[j];
      gates[r] = acc;
    }
    for (std::size_t j = 0; j < H; ++j) {
      const double i_g = detail::sigmoid(gates[j]);
      const double f_g = detail::sigmoid(gates[H + j]);
      const double g_g = std::tanh(gates[2 * H + j]);
      const double o_g = detail::sigmoid(gates[3 * H + j]);
      const double c_t = f_g * c_prev[j] + i_g * g_g;
      const double tanh_c = std::tanh(c_t);
      c.gate_i[t][j] = i_g;
      c.gate_f[t][j] = f_g;
      c.gate_g[t][j] = g_g;
      c.gate_o[t][j] = o_g;
      c.c[t][j] = c_t;
      c.tanh_c[t][j] = tanh_c;
      c.h[t][j] = o_g * tanh_c;
    }
    h_prev = c.h[t];
    c_prev = c.c[t];
  }

  // Last hidden state is the tweet representation; an empty token list
  // leaves it at the zero initial state.
  c.stage.input.assign(H + lexicon_dim_, 0.0);
  if (T > 0) {
    std::copy(c.h[T - 1].begin(), c.h[T - 1].end(), c.stage.input.begin());
  }
  std::copy(item.lexicon.begin(), item.lexicon.end(),
            c.stage.input.begin() + static_cast<std::ptrdiff_t>(H));

  detail::dense_forward(hidden_w_, hidden_b_, output_w_, output_b_, c.stage);
  probs = c.stage.p;
}

std::vector<double> LstmModel::activations(const TrainItem& item) const {
  std::vector<double> probs;
  forward(item, nullptr, probs);
  return probs;
}

double LstmModel::batch_loss(const std::vector<const TrainItem*>& batch,
                             bool with_grad) {
  if (batch.empty()) throw Error("E_EMPTY", "empty batch");
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  const double scale = inv_batch / static_cast<double>(labels_);
  const std::size_t d = embeddings_->dim();
  const std::size_t H = hidden_dim_;
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

    const std::size_t T = item->tokens.size();
    if (T == 0) continue;

    // BPTT from the final hidden state.
    std::vector<double> dh(d_input.begin(),
                           d_input.begin() + static_cast<std::ptrdiff_t>(H));
    std::vector<double> dc(H, 0.0);
    std::vector<double> dgates(4 * H);
    const std::vector<double> zero_state(H, 0.0);
    for (std::size_t t = T; t-- > 0;) {
      const auto& i_g = cache.gate_i[t];
      const auto& f_g = cache.gate_f[t];
      const auto& g_g = cache.gate_g[t];
      const auto& o_g = cache.gate_o[t];
      const auto& tanh_c = cache.tanh_c[t];
      const std::vector<double>& c_prev = t > 0 ? cache.c[t - 1] : zero_state;
      for (std::size_t j = 0; j < H; ++j) {
        const double do_ = dh[j] * tanh_c[j];
        const double dct = dc[j] + dh[j] * o_g[j] * (1.0 - tanh_c[j] * tanh_c[j]);
        const double di = dct * g_g[j];
        const double dg = dct * i_g[j];
        const double df = dct * c_prev[j];
        dgates[j] = di * i_g[j] * (1.0 - i_g[j]);
        dgates[H + j] = df * f_g[j] * (1.0 - f_g[j]);
        dgates[2 * H + j] = dg * (1.0 - g_g[j] * g_g[j]);
        dgates[3 * H + j] = do_ * o_g[j] * (1.0 - o_g[j]);
        dc[j] = dct * f_g[j];
      }
      const double* x = cache.x[t].data();
      const double* h_prev = t > 0 ? cache.h[t - 1].data() : nullptr;
      std::fill(dh.begin(), dh.end(), 0.0);
      for (std::size_t r = 0; r < 4 * H; ++r) {
        const double g = dgates[r];
        if (g == 0.0) continue;
        double* wx_row_g = wx_g_.data.data() + r * d;
        for (std::size_t j = 0; j < d; ++j) wx_row_g[j] += g * x[j];
        double* wh_row_g = wh_g_.data.data() + r * H;
        const double* wh_row = wh_.data.data() + r * H;
        if (h_prev) {
          for (std::size_t j = 0; j < H; ++j) wh_row_g[j] += g * h_prev[j];
        }
        for (std::size_t j = 0; j < H; ++j) dh[j] += g * wh_row[j];
        b_g_[r] += g;
      }
    }
  }
  return loss;
}

std::vector<std::pair<std::string, std::uint64_t>> LstmModel::dims() const {
  return {{"embedding_dim", embeddings_->dim()},
          {"hidden_dim", hidden_dim_},
          {"lexicon_dim", lexicon_dim_},
          {"label_count", labels_}};
}

}  // namespace affectlens
