#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "affectlens/tensor.hpp"

// Shared forward/backward pieces for the two sequence models, which end in
// the same 128-unit ReLU hidden layer and sigmoid output stage.
namespace affectlens::detail {

inline constexpr double kProbFloor = 1e-12;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct DenseStage {
  std::vector<double> input;   // merged representation + lexicon
  std::vector<double> z1;      // hidden pre-activation
  std::vector<double> h2;      // relu(z1)
  std::vector<double> u;       // output pre-activation
  std::vector<double> p;       // sigmoid(u)
};

inline void dense_forward(const Tensor& hidden_w, const Tensor& hidden_b,
                          const Tensor& output_w, const Tensor& output_b,
                          DenseStage& s) {
  const std::size_t hidden = hidden_w.rows();
  const std::size_t in = hidden_w.cols();
  const std::size_t labels = output_w.rows();
  s.z1.assign(hidden, 0.0);
  s.h2.assign(hidden, 0.0);
  for (std::size_t j = 0; j < hidden; ++j) {
    double acc = hidden_b[j];
    const double* row = hidden_w.data.data() + j * in;
    for (std::size_t k = 0; k < in; ++k) acc += row[k] * s.input[k];
    s.z1[j] = acc;
    s.h2[j] = acc > 0.0 ? acc : 0.0;
  }
  s.u.assign(labels, 0.0);
  s.p.assign(labels, 0.0);
  for (std::size_t l = 0; l < labels; ++l) {
    double acc = output_b[l];
    const double* row = output_w.data.data() + l * hidden;
    for (std::size_t j = 0; j < hidden; ++j) acc += row[j] * s.h2[j];
    s.u[l] = acc;
    s.p[l] = sigmoid(acc);
  }
}

// du = dL/d(output pre-activation). Accumulates parameter gradients and
// returns dL/d(input) in d_input.
inline void dense_backward(const Tensor& hidden_w, const Tensor& output_w,
                           const DenseStage& s, const std::vector<double>& du,
                           Tensor& hidden_w_g, Tensor& hidden_b_g,
                           Tensor& output_w_g, Tensor& output_b_g,
                           std::vector<double>& d_input) {
  const std::size_t hidden = hidden_w.rows();
  const std::size_t in = hidden_w.cols();
  const std::size_t labels = output_w.rows();

  std::vector<double> dh2(hidden, 0.0);
  for (std::size_t l = 0; l < labels; ++l) {
    const double g = du[l];
    if (g == 0.0) continue;
    double* wrow_g = output_w_g.data.data() + l * hidden;
    const double* wrow = output_w.data.data() + l * hidden;
    for (std::size_t j = 0; j < hidden; ++j) {
      wrow_g[j] += g * s.h2[j];
      dh2[j] += g * wrow[j];
    }
    output_b_g[l] += g;
  }

  d_input.assign(in, 0.0);
  for (std::size_t j = 0; j < hidden; ++j) {
    if (s.z1[j] <= 0.0) continue;  // relu gate
    const double g = dh2[j];
    if (g == 0.0) continue;
    double* wrow_g = hidden_w_g.data.data() + j * in;
    const double* wrow = hidden_w.data.data() + j * in;
    for (std::size_t k = 0; k < in; ++k) {
      wrow_g[k] += g * s.input[k];
      d_input[k] += g * wrow[k];
    }
    hidden_b_g[j] += g;
  }
}

// dL/du for the mean multi-label BCE with sigmoid outputs. Entries whose
// probability hit the clamp carry zero gradient, matching the clamped loss.
inline std::vector<double> bce_sigmoid_grad(const std::vector<double>& p,
                                            const std::vector<std::uint8_t>& y,
                                            double scale) {
  std::vector<double> du(p.size(), 0.0);
  for (std::size_t l = 0; l < p.size(); ++l) {
    if (p[l] <= kProbFloor || p[l] >= 1.0 - kProbFloor) continue;
    du[l] = scale * (p[l] - static_cast<double>(y[l]));
  }
  return du;
}

}  // namespace affectlens::detail
