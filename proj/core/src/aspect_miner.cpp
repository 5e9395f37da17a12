#include "affectlens/aspect_miner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "affectlens/adamw.hpp"
#include "affectlens/csv.hpp"
#include "affectlens/error.hpp"
#include "affectlens/rng.hpp"

namespace affectlens {

namespace {

void softmax_inplace(std::vector<double>& v) {
  const double top = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - top);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

// dx = s*(dy - (s.dy)) for y = softmax(x).
std::vector<double> softmax_backward(const std::vector<double>& s,
                                     const std::vector<double>& dy) {
  double dot = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) dot += s[i] * dy[i];
  std::vector<double> dx(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) dx[i] = s[i] * (dy[i] - dot);
  return dx;
}

std::vector<std::size_t> in_vocab_indices(
    const std::vector<std::string>& tokens,
    const std::unordered_map<std::string, std::size_t>& index) {
  std::vector<std::size_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    const auto it = index.find(t);
    if (it != index.end()) ids.push_back(it->second);
  }
  return ids;
}

struct EncodeState {
  std::vector<std::size_t> words;  // vocabulary rows
  std::vector<double> mean;        // ybar
  std::vector<double> attention;   // a
  std::vector<double> z;
};

// Shared by the public attention_encode and the training loop, which also
// needs the intermediate state for backprop.
bool encode_state(const std::vector<std::size_t>& words, const AspectModel& model,
                  EncodeState& state) {
  if (words.empty()) return false;
  const std::size_t d = model.dim;
  state.words = words;
  state.mean.assign(d, 0.0);
  for (std::size_t w : words) {
    const double* e = model.word_vectors.data.data() + w * d;
    for (std::size_t j = 0; j < d; ++j) state.mean[j] += e[j];
  }
  for (double& v : state.mean) v /= static_cast<double>(words.size());

  std::vector<double> m_ybar(d, 0.0);
  for (std::size_t r = 0; r < d; ++r) {
    const double* row = model.attention.data.data() + r * d;
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += row[j] * state.mean[j];
    m_ybar[r] = acc;
  }
  state.attention.assign(words.size(), 0.0);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const double* e = model.word_vectors.data.data() + words[i] * d;
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += e[j] * m_ybar[j];
    state.attention[i] = acc;
  }
  softmax_inplace(state.attention);
  state.z.assign(d, 0.0);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const double* e = model.word_vectors.data.data() + words[i] * d;
    for (std::size_t j = 0; j < d; ++j) state.z[j] += state.attention[i] * e[j];
  }
  return true;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Row-normalized copy of T; zero rows stay zero.
Tensor normalized_rows(const Tensor& t) {
  Tensor out = t;
  const std::size_t d = t.cols();
  for (std::size_t k = 0; k < t.rows(); ++k) {
    double nrm = 0.0;
    for (std::size_t j = 0; j < d; ++j) nrm += t.at(k, j) * t.at(k, j);
    nrm = std::sqrt(nrm);
    if (nrm > 0.0) {
      for (std::size_t j = 0; j < d; ++j) out.at(k, j) /= nrm;
    }
  }
  return out;
}

// Seeded k-means++ then Lloyd iterations over the vocabulary vectors.
Tensor kmeans_centroids(const Tensor& points, std::size_t k, std::size_t iters,
                        Rng& rng) {
  const std::size_t n = points.rows();
  const std::size_t d = points.cols();
  Tensor centroids({k, d});

  // k-means++ seeding
  std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
  std::size_t first = static_cast<std::size_t>(rng.next_below(n));
  for (std::size_t j = 0; j < d; ++j) centroids.at(0, j) = points.at(first, j);
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double dd = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = points.at(i, j) - centroids.at(c - 1, j);
        dd += diff * diff;
      }
      dist2[i] = std::min(dist2[i], dd);
      total += dist2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.next_double() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += dist2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng.next_below(n));
    }
    for (std::size_t j = 0; j < d; ++j) centroids.at(c, j) = points.at(pick, j);
  }

  std::vector<std::size_t> assign(n, 0);
  for (std::size_t iter = 0; iter < iters; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_c = 0;
      for (std::size_t c = 0; c < k; ++c) {
        double dd = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = points.at(i, j) - centroids.at(c, j);
          dd += diff * diff;
        }
        if (dd < best) {
          best = dd;
          best_c = c;
        }
      }
      if (assign[i] != best_c) changed = true;
      assign[i] = best_c;
    }
    if (!changed && iter > 0) break;
    Tensor sums({k, d});
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
      for (std::size_t j = 0; j < d; ++j) {
        sums.at(assign[i], j) += points.at(i, j);
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      for (std::size_t j = 0; j < d; ++j) {
        centroids.at(c, j) = sums.at(c, j) / static_cast<double>(counts[c]);
      }
    }
  }
  return centroids;
}

}  // namespace

std::optional<SentenceEncoding> attention_encode(
    const std::vector<std::string>& tokens, const AspectModel& model) {
  const auto words = in_vocab_indices(tokens, model.vocab_index);
  EncodeState state;
  if (!encode_state(words, model, state)) return std::nullopt;
  return SentenceEncoding{std::move(state.attention), std::move(state.z)};
}

Reconstruction reconstruct(const std::vector<double>& z,
                           const AspectModel& model) {
  if (z.size() != model.dim) {
    throw Error("E_DIMENSION", "sentence vector dim does not match aspect model");
  }
  const std::size_t k = model.aspect_count;
  const std::size_t d = model.dim;
  Reconstruction out;
  out.probs.assign(k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    const double* row = model.weight.data.data() + a * d;
    double acc = model.bias[a];
    for (std::size_t j = 0; j < d; ++j) acc += row[j] * z[j];
    out.probs[a] = acc;
  }
  softmax_inplace(out.probs);
  out.recon.assign(d, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    const double* row = model.aspects.data.data() + a * d;
    for (std::size_t j = 0; j < d; ++j) out.recon[j] += out.probs[a] * row[j];
  }
  return out;
}

double ortho_penalty(const Tensor& aspects) {
  const Tensor tn = normalized_rows(aspects);
  const std::size_t k = tn.rows();
  const std::size_t d = tn.cols();
  double penalty = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      double g = 0.0;
      for (std::size_t j = 0; j < d; ++j) g += tn.at(a, j) * tn.at(b, j);
      const double diff = g - (a == b ? 1.0 : 0.0);
      penalty += diff * diff;
    }
  }
  return penalty;
}

double abae_loss(const std::vector<SentenceEncoding>& batch,
                 const std::vector<std::vector<std::vector<double>>>& negatives,
                 const AspectModel& model, double ortho_weight) {
  if (batch.size() != negatives.size()) {
    throw Error("E_DIMENSION", "one negative set per sentence required");
  }
  double loss = 0.0;
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const Reconstruction rec = reconstruct(batch[s].vector, model);
    const double rz = dot(rec.recon, batch[s].vector);
    for (const auto& n : negatives[s]) {
      const double margin = 1.0 - rz + dot(rec.recon, n);
      if (margin > 0.0) loss += margin;
    }
  }
  return loss + ortho_weight * ortho_penalty(model.aspects);
}

void AspectModel::rebuild_vocab_index() {
  vocab_index.clear();
  vocab_index.reserve(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) vocab_index[vocab[i]] = i;
}

AspectModel train_abae(const std::vector<std::vector<std::string>>& corpus,
                       const EmbeddingTable& embeddings,
                       const AspectConfig& config, AbaeTrainLog* log) {
  if (config.aspect_count < 2) {
    throw Error("E_CONFIG", "aspect count must be >= 2");
  }
  AspectModel model;
  model.aspect_count = config.aspect_count;
  model.dim = embeddings.dim();

  // Vocabulary: first-seen corpus order, restricted to the table.
  for (const auto& sentence : corpus) {
    for (const auto& token : sentence) {
      if (embeddings.contains(token) && !model.vocab_index.count(token)) {
        model.vocab_index.emplace(token, model.vocab.size());
        model.vocab.push_back(token);
      }
    }
  }
  if (model.vocab.empty()) {
    throw Error("E_EMPTY", "no corpus token appears in the embedding table");
  }
  const std::size_t d = model.dim;
  model.word_vectors = Tensor({model.vocab.size(), d});
  for (std::size_t i = 0; i < model.vocab.size(); ++i) {
    const auto& vec = embeddings.lookup(model.vocab[i]);
    std::copy(vec.begin(), vec.end(),
              model.word_vectors.data.begin() + static_cast<std::ptrdiff_t>(i * d));
  }

  // Sentences with zero in-vocabulary tokens are skipped, not errors.
  std::vector<std::vector<std::size_t>> sentences;
  std::size_t skipped = 0;
  for (const auto& sentence : corpus) {
    auto ids = in_vocab_indices(sentence, model.vocab_index);
    if (ids.empty()) {
      ++skipped;
      continue;
    }
    sentences.push_back(std::move(ids));
  }
  if (sentences.empty()) {
    throw Error("E_EMPTY", "every sentence lost all tokens to the vocabulary");
  }

  Rng rng(config.seed);
  model.aspects = kmeans_centroids(model.word_vectors, config.aspect_count,
                                   config.kmeans_iterations, rng);
  const double bound = std::sqrt(1.0 / static_cast<double>(d));
  model.attention = Tensor({d, d});
  for (double& v : model.attention.data) v = rng.uniform(-bound, bound);
  model.weight = Tensor({config.aspect_count, d});
  for (double& v : model.weight.data) v = rng.uniform(-bound, bound);
  model.bias = Tensor({config.aspect_count});
  for (double& v : model.bias.data) v = rng.uniform(-bound, bound);

  // Negatives are mean word vectors of other sentences.
  std::vector<std::vector<double>> sentence_means(sentences.size());
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    std::vector<double> mean(d, 0.0);
    for (std::size_t w : sentences[s]) {
      const double* e = model.word_vectors.data.data() + w * d;
      for (std::size_t j = 0; j < d; ++j) mean[j] += e[j];
    }
    for (double& v : mean) v /= static_cast<double>(sentences[s].size());
    sentence_means[s] = std::move(mean);
  }

  Tensor aspects_g(model.aspects.shape);
  Tensor attention_g(model.attention.shape);
  Tensor weight_g(model.weight.shape);
  Tensor bias_g(model.bias.shape);
  std::vector<ParamSlot> slots = {
      {"abae.aspects", &model.aspects, &aspects_g, d},
      {"abae.attention", &model.attention, &attention_g, d},
      {"abae.weight", &model.weight, &weight_g, d},
      {"abae.bias", &model.bias, &bias_g, d},
  };
  AdamW optimizer(AdamWConfig{config.learning_rate, 0.9, 0.999, 1e-8, 0.0});

  if (log) {
    log->initial_penalty = ortho_penalty(model.aspects);
    log->sentences_used = sentences.size();
    log->sentences_skipped = skipped;
  }

  const std::size_t batch_size = std::max<std::size_t>(1, config.batch_size);
  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      aspects_g.zero();
      attention_g.zero();
      weight_g.zero();
      bias_g.zero();
      double batch_loss = 0.0;

      for (std::size_t i = start; i < end; ++i) {
        const std::size_t s = order[i];
        EncodeState enc;
        encode_state(sentences[s], model, enc);
        const Reconstruction rec = reconstruct(enc.z, model);
        const double rz = dot(rec.recon, enc.z);

        std::vector<double> dr(d, 0.0);
        std::size_t active = 0;
        for (std::size_t neg = 0; neg < config.negative_samples; ++neg) {
          // with replacement, but never the sentence itself
          std::size_t other = s;
          while (other == s && sentences.size() > 1) {
            other = static_cast<std::size_t>(rng.next_below(sentences.size()));
          }
          const auto& n = sentence_means[other];
          const double margin = 1.0 - rz + dot(rec.recon, n);
          if (margin <= 0.0) continue;
          batch_loss += margin;
          ++active;
          for (std::size_t j = 0; j < d; ++j) dr[j] += n[j] - enc.z[j];
        }
        if (active == 0) continue;

        // r = T' p
        std::vector<double> dp(model.aspect_count, 0.0);
        for (std::size_t a = 0; a < model.aspect_count; ++a) {
          const double* trow = model.aspects.data.data() + a * d;
          double acc = 0.0;
          for (std::size_t j = 0; j < d; ++j) {
            aspects_g.at(a, j) += rec.probs[a] * dr[j];
            acc += trow[j] * dr[j];
          }
          dp[a] = acc;
        }
        // p = softmax(W z + b)
        const std::vector<double> dq = softmax_backward(rec.probs, dp);
        std::vector<double> dz(d, 0.0);
        for (std::size_t j = 0; j < d; ++j) {
          dz[j] = -static_cast<double>(active) * rec.recon[j];
        }
        for (std::size_t a = 0; a < model.aspect_count; ++a) {
          const double g = dq[a];
          bias_g[a] += g;
          double* wrow_g = weight_g.data.data() + a * d;
          const double* wrow = model.weight.data.data() + a * d;
          for (std::size_t j = 0; j < d; ++j) {
            wrow_g[j] += g * enc.z[j];
            dz[j] += g * wrow[j];
          }
        }
        // z = sum a_i e_i
        std::vector<double> da(enc.words.size(), 0.0);
        for (std::size_t i2 = 0; i2 < enc.words.size(); ++i2) {
          const double* e = model.word_vectors.data.data() + enc.words[i2] * d;
          double acc = 0.0;
          for (std::size_t j = 0; j < d; ++j) acc += e[j] * dz[j];
          da[i2] = acc;
        }
        // a = softmax(e_i' M ybar)
        const std::vector<double> dlogit = softmax_backward(enc.attention, da);
        for (std::size_t i2 = 0; i2 < enc.words.size(); ++i2) {
          const double g = dlogit[i2];
          if (g == 0.0) continue;
          const double* e = model.word_vectors.data.data() + enc.words[i2] * d;
          for (std::size_t r = 0; r < d; ++r) {
            const double ge = g * e[r];
            double* mrow_g = attention_g.data.data() + r * d;
            for (std::size_t j = 0; j < d; ++j) mrow_g[j] += ge * enc.mean[j];
          }
        }
      }

      // Orthogonality penalty, once per step.
      const Tensor tn = normalized_rows(model.aspects);
      const std::size_t K = model.aspect_count;
      batch_loss += config.ortho_weight * ortho_penalty(model.aspects);
      // dP/dTn = 4 (G - I) Tn, then back through the row normalization.
      std::vector<std::vector<double>> gram(K, std::vector<double>(K, 0.0));
      for (std::size_t a = 0; a < K; ++a) {
        for (std::size_t b = 0; b < K; ++b) {
          double g = 0.0;
          for (std::size_t j = 0; j < d; ++j) g += tn.at(a, j) * tn.at(b, j);
          gram[a][b] = g - (a == b ? 1.0 : 0.0);
        }
      }
      for (std::size_t a = 0; a < K; ++a) {
        double nrm = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          nrm += model.aspects.at(a, j) * model.aspects.at(a, j);
        }
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) continue;
        std::vector<double> dtn(d, 0.0);
        for (std::size_t j = 0; j < d; ++j) {
          double acc = 0.0;
          for (std::size_t b = 0; b < K; ++b) acc += gram[a][b] * tn.at(b, j);
          dtn[j] = 4.0 * config.ortho_weight * acc;
        }
        double proj = 0.0;
        for (std::size_t j = 0; j < d; ++j) proj += dtn[j] * tn.at(a, j);
        for (std::size_t j = 0; j < d; ++j) {
          aspects_g.at(a, j) += (dtn[j] - proj * tn.at(a, j)) / nrm;
        }
      }

      optimizer.step(slots);
      epoch_loss += batch_loss;
      ++batches;
    }
    if (log) {
      log->epoch_losses.push_back(epoch_loss / static_cast<double>(batches));
      log->epoch_penalties.push_back(ortho_penalty(model.aspects));
    }
  }
  return model;
}

std::vector<std::pair<std::string, double>> top_terms(const AspectModel& model,
                                                      std::size_t aspect,
                                                      std::size_t n) {
  if (aspect >= model.aspect_count) {
    throw Error("E_RANGE", "aspect index out of range");
  }
  if (n > model.vocab.size()) {
    throw Error("E_RANGE", "requested more terms than vocabulary words");
  }
  const std::size_t d = model.dim;
  const double* trow = model.aspects.data.data() + aspect * d;
  double tnorm = 0.0;
  for (std::size_t j = 0; j < d; ++j) tnorm += trow[j] * trow[j];
  tnorm = std::sqrt(tnorm);

  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(model.vocab.size());
  for (std::size_t v = 0; v < model.vocab.size(); ++v) {
    const double* e = model.word_vectors.data.data() + v * d;
    double dot_ = 0.0, enorm = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      dot_ += trow[j] * e[j];
      enorm += e[j] * e[j];
    }
    enorm = std::sqrt(enorm);
    const double cos = (tnorm > 0.0 && enorm > 0.0) ? dot_ / (tnorm * enorm) : 0.0;
    scored.emplace_back(model.vocab[v], cos);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  scored.resize(n);
  return scored;
}

SubcategoryMap SubcategoryMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("E_IO", "cannot open subcategory map: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("E_PARSE", path + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw Error("E_PARSE", path + ": subcategory map must be a JSON object");
  }
  SubcategoryMap map;
  for (const auto& [term, subcats] : doc.items()) {
    if (!subcats.is_array() || subcats.empty()) {
      throw Error("E_PARSE", path + ": term '" + term +
                                 "' must map to at least one subcategory");
    }
    auto& list = map.term_to_subcats[term];
    for (const auto& s : subcats) list.push_back(s.get<std::string>());
  }
  return map;
}

SubcatSeries assign_subcategories(const AspectModel& model,
                                  const SubcategoryMap& map,
                                  const std::vector<AspectSentence>& sentences,
                                  EpochSeconds origin,
                                  EpochSeconds window_seconds,
                                  std::size_t terms_per_aspect) {
  // Subcategory set per aspect: the union over its mapped top terms;
  // aspects with no mapped term count under "other".
  std::vector<std::vector<std::string>> aspect_subcats(model.aspect_count);
  std::set<std::string> all_subcats;
  for (std::size_t k = 0; k < model.aspect_count; ++k) {
    const auto terms =
        top_terms(model, k, std::min(terms_per_aspect, model.vocab.size()));
    std::set<std::string> subcats;
    for (const auto& [term, _] : terms) {
      const auto it = map.term_to_subcats.find(term);
      if (it == map.term_to_subcats.end()) continue;
      subcats.insert(it->second.begin(), it->second.end());
    }
    if (subcats.empty()) subcats.insert("other");
    aspect_subcats[k].assign(subcats.begin(), subcats.end());
    all_subcats.insert(subcats.begin(), subcats.end());
  }

  SubcatSeries series;
  series.subcategories.assign(all_subcats.begin(), all_subcats.end());
  if (sentences.empty()) return series;

  EpochSeconds last = origin;
  for (const auto& s : sentences) {
    if (s.created_at < origin) {
      throw Error("E_RANGE", "sentence " + s.id + " precedes the analysis origin");
    }
    last = std::max(last, s.created_at);
  }
  const std::size_t window_count =
      static_cast<std::size_t>((last - origin) / window_seconds) + 1;
  series.window_starts.resize(window_count);
  for (std::size_t w = 0; w < window_count; ++w) {
    series.window_starts[w] = origin + static_cast<EpochSeconds>(w) * window_seconds;
  }
  series.counts.assign(window_count,
                       std::vector<std::size_t>(series.subcategories.size(), 0));

  std::unordered_map<std::string, std::size_t> subcat_index;
  for (std::size_t i = 0; i < series.subcategories.size(); ++i) {
    subcat_index[series.subcategories[i]] = i;
  }

  for (const auto& s : sentences) {
    const auto enc = attention_encode(s.tokens, model);
    if (!enc) continue;  // nothing in vocabulary
    const Reconstruction rec = reconstruct(enc->vector, model);
    const std::size_t k = static_cast<std::size_t>(
        std::max_element(rec.probs.begin(), rec.probs.end()) -
        rec.probs.begin());
    const auto w = static_cast<std::size_t>((s.created_at - origin) / window_seconds);
    for (const auto& subcat : aspect_subcats[k]) {
      ++series.counts[w][subcat_index[subcat]];
    }
  }
  return series;
}

void write_subcats_csv(std::ostream& os, const SubcatSeries& series,
                       std::uint64_t seed) {
  os << "# affectlens subcats v1 seed=" << seed << "\n";
  csv::write_row(os, {"window_start", "subcategory", "count"});
  for (std::size_t w = 0; w < series.window_starts.size(); ++w) {
    for (std::size_t c = 0; c < series.subcategories.size(); ++c) {
      csv::write_row(os, {format_iso8601(series.window_starts[w]),
                          series.subcategories[c],
                          std::to_string(series.counts[w][c])});
    }
  }
}

}  // namespace affectlens
