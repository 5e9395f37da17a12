#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace affectlens {

// Dense row-major array of 64-bit floats. Shape is fixed at construction;
// the layer code indexes it directly.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s)
      : shape(std::move(s)), data(count(shape), 0.0) {}

  static std::size_t count(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
  }

  std::size_t size() const { return data.size(); }
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  void zero() { std::fill(data.begin(), data.end(), 0.0); }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
};

}  // namespace affectlens
