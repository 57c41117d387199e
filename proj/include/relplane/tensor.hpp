#ifndef RELPLANE_TENSOR_HPP_
#define RELPLANE_TENSOR_HPP_

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "relplane/rng.hpp"

namespace relplane {

// Dense row-major matrix of doubles. Planes (M x M x C) are stored
// flattened as (M*M) x C with the spatial extent carried separately by
// the ops that need it.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

  static Tensor zeros(int r, int c) { return Tensor(r, c); }

  static Tensor full(int r, int c, double value) {
    Tensor t(r, c);
    for (auto& x : t.v) x = value;
    return t;
  }

  static Tensor randn(int r, int c, Rng& rng, double stddev = 1.0) {
    Tensor t(r, c);
    for (auto& x : t.v) x = rng.normal(0.0, stddev);
    return t;
  }

  // Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
  static Tensor xavier(int r, int c, Rng& rng) {
    double a = std::sqrt(6.0 / (r + c));
    Tensor t(r, c);
    for (auto& x : t.v) x = rng.uniform(-a, a);
    return t;
  }

  double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

  double* row(int r) { return v.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const { return v.data() + static_cast<std::size_t>(r) * cols; }

  std::size_t size() const { return v.size(); }

  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

  bool all_finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }
};

inline bool operator==(const Tensor& a, const Tensor& b) {
  return a.rows == b.rows && a.cols == b.cols && a.v == b.v;
}

}  // namespace relplane

#endif  // RELPLANE_TENSOR_HPP_
