#include "affectlens/adamw.hpp"

#include <cmath>

#include "affectlens/error.hpp"

namespace affectlens {

void AdamW::step(const std::vector<ParamSlot>& slots) {
  if (m_.empty()) {
    for (const auto& s : slots) {
      m_.emplace_back(s.value->shape);
      v_.emplace_back(s.value->shape);
    }
  }
  if (m_.size() != slots.size()) {
    throw Error("E_STATE", "optimizer state does not match parameter count");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < slots.size(); ++i) {
    Tensor& theta = *slots[i].value;
    const Tensor& g = *slots[i].grad;
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    if (!theta.same_shape(m)) {
      throw Error("E_STATE", "optimizer state shape mismatch for " + slots[i].name);
    }
    for (std::size_t k = 0; k < theta.size(); ++k) {
      m.data[k] = config_.beta1 * m.data[k] + (1.0 - config_.beta1) * g.data[k];
      v.data[k] = config_.beta2 * v.data[k] +
                  (1.0 - config_.beta2) * g.data[k] * g.data[k];
      const double mhat = m.data[k] / bc1;
      const double vhat = v.data[k] / bc2;
      theta.data[k] -= config_.learning_rate *
                       (mhat / (std::sqrt(vhat) + config_.epsilon) +
                        config_.weight_decay * theta.data[k]);
    }
  }
}

void AdamW::restore(std::size_t steps, std::vector<Tensor> m,
                    std::vector<Tensor> v) {
  t_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace affectlens
