#pragma once

#include "mbn/core.hpp"

#include <Eigen/QR>

#include <cstdint>
#include <limits>
#include <random>

namespace mbn {

namespace detail {

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based generator: the i-th output is mix64(key + (i+1)*gamma).
/// Satisfies UniformRandomBitGenerator. `split(i)` derives an independent
/// stream keyed by key ^ hash(i), so work keyed by index is reproducible no
/// matter which thread runs it.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept : key_(detail::mix64(seed ^ 0x6A09E667F3BCC909ULL)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::golden_gamma);
  }

  Rng split(std::uint64_t index) const noexcept {
    Rng child(0);
    child.key_ = key_ ^ detail::mix64(index + detail::golden_gamma);
    return child;
  }

  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double normal() {
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(*this);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Matrix of i.i.d. standard complex Gaussians (real and imaginary parts of variance 1/2).
inline ComplexMatrix ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> dist(0.0, std::sqrt(0.5));
  ComplexMatrix z(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = dist(rng);
      const double im = dist(rng);
      z(i, j) = Complex(re, im);
    }
  return z;
}

/// Haar-distributed d x d unitary: QR of a Ginibre matrix with the phases of
/// diag(R) folded back into Q.
inline ComplexMatrix haar_unitary(int d, Rng& rng) {
  if (d < 1) throw Error(ErrorCode::invalid_dimension, "unitary dimension must be >= 1");
  const ComplexMatrix z = ginibre(d, d, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (int i = 0; i < d; ++i) {
    const Complex diag = r(i, i);
    const double mag = std::abs(diag);
    q.col(i) *= (mag > 0.0) ? diag / mag : Complex(1.0, 0.0);
  }
  return q;
}

inline ComplexMatrix haar_unitary(int d, std::uint64_t seed) {
  Rng rng(seed);
  return haar_unitary(d, rng);
}

/// Haar-random unit vector in C^d.
inline ComplexVector haar_state_vector(int d, Rng& rng) {
  ComplexVector v = ginibre(d, 1, rng).col(0);
  return v / v.norm();
}

}  // namespace mbn
