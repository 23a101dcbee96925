#pragma once

// Small shared numeric helpers.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace soliton_entropy {

// Pairwise (cascade) summation. Deterministic for a fixed layout and keeps
// roundoff near sqrt(log n) * eps instead of n * eps on long accumulations.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

// Pairwise-summed dot product; layout-deterministic like pairwise_sum.
inline double pairwise_dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("pairwise_dot: size mismatch");
  if (a.size() <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  const std::size_t h = a.size() / 2;
  return pairwise_dot(a.first(h), b.first(h)) + pairwise_dot(a.subspan(h), b.subspan(h));
}

}  // namespace soliton_entropy
