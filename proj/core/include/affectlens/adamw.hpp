#pragma once

#include <cstddef>
#include <vector>

#include "affectlens/emotion_models.hpp"
#include "affectlens/tensor.hpp"

namespace affectlens {

struct AdamWConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
};

// Decoupled weight decay:
//   m <- b1*m + (1-b1)*g
//   v <- b2*v + (1-b2)*g^2
//   theta <- theta - lr*(mhat/(sqrt(vhat) + eps) + wd*theta)
class AdamW {
 public:
  explicit AdamW(AdamWConfig config) : config_(config) {}

  // Moment buffers are sized on the first call and must keep matching.
  void step(const std::vector<ParamSlot>& slots);

  std::size_t step_count() const { return t_; }
  const std::vector<Tensor>& first_moments() const { return m_; }
  const std::vector<Tensor>& second_moments() const { return v_; }

  void restore(std::size_t steps, std::vector<Tensor> m, std::vector<Tensor> v);

 private:
  AdamWConfig config_;
  std::size_t t_ = 0;
  std::vector<Tensor> m_, v_;
};

}  // namespace affectlens
