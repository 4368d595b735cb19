#pragma once

#include "mbn/core.hpp"

#include <cstddef>
#include <vector>

namespace mbn {

/// Ordered traceless Hermitian generators normalized to Tr(G_i G_j) = 2 delta_ij.
class GeneratorBasis {
 public:
  GeneratorBasis(int dim, std::vector<ComplexMatrix> generators)
      : dim_(dim), generators_(std::move(generators)) {
    validate();
  }

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return generators_.size(); }
  const ComplexMatrix& operator[](std::size_t i) const { return generators_[i]; }
  const std::vector<ComplexMatrix>& generators() const noexcept { return generators_; }

  auto begin() const { return generators_.begin(); }
  auto end() const { return generators_.end(); }

 private:
  void validate() const {
    const auto expected = static_cast<std::size_t>(dim_) * static_cast<std::size_t>(dim_) - 1;
    if (dim_ < 2 || generators_.size() != expected) {
      throw Error(ErrorCode::invalid_dimension, "generator basis needs d^2-1 generators, d >= 2");
    }
    for (std::size_t i = 0; i < generators_.size(); ++i) {
      const auto& g = generators_[i];
      if (g.rows() != dim_ || g.cols() != dim_) {
        throw Error(ErrorCode::invalid_dimension, "generator has wrong shape");
      }
      if (!is_hermitian(g, tol::hermitian)) throw Error(ErrorCode::not_hermitian, "generator is not Hermitian");
      if (std::abs(g.trace()) > tol::generator_trace) {
        throw Error(ErrorCode::invalid_dimension, "generator is not traceless");
      }
    }
    for (std::size_t i = 0; i < generators_.size(); ++i) {
      for (std::size_t j = i; j < generators_.size(); ++j) {
        const Complex ip = (generators_[i] * generators_[j]).trace();
        const double target = (i == j) ? 2.0 : 0.0;
        if (std::abs(ip - target) > tol::orthogonality) {
          throw Error(ErrorCode::invalid_dimension, "generators are not orthonormal (Tr GiGj = 2 delta_ij)");
        }
      }
    }
  }

  int dim_;
  std::vector<ComplexMatrix> generators_;
};

/// Generalized Gell-Mann matrices of SU(d).
///
/// Canonical order: symmetric off-diagonal generators for pairs (j,k), j<k,
/// row-major; then the antisymmetric ones in the same pair order; then the
/// d-1 diagonal generators of increasing rank. For d = 2 this yields X, Y, Z.
inline GeneratorBasis gell_mann_basis(int d) {
  if (d < 2) throw Error(ErrorCode::invalid_dimension, "Gell-Mann basis requires d >= 2");
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(d * d - 1));
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      ComplexMatrix g = ComplexMatrix::Zero(d, d);
      g(j, k) = 1.0;
      g(k, j) = 1.0;
      out.push_back(std::move(g));
    }
  }
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      ComplexMatrix g = ComplexMatrix::Zero(d, d);
      g(j, k) = Complex(0.0, -1.0);
      g(k, j) = Complex(0.0, 1.0);
      out.push_back(std::move(g));
    }
  }
  for (int l = 1; l < d; ++l) {
    ComplexMatrix g = ComplexMatrix::Zero(d, d);
    const double scale = std::sqrt(2.0 / (static_cast<double>(l) * (l + 1)));
    for (int i = 0; i < l; ++i) g(i, i) = scale;
    g(l, l) = -scale * l;
    out.push_back(std::move(g));
  }
  return GeneratorBasis(d, std::move(out));
}

namespace detail {

inline ComplexMatrix pauli(int index) {
  ComplexMatrix p(2, 2);
  switch (index) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, Complex(0, -1), Complex(0, 1), 0; break;
    default: p << 1, 0, 0, -1; break;
  }
  return p;
}

}  // namespace detail

/// The 4^k - 1 non-identity Pauli strings on k qubits, scaled by sqrt(2/2^k).
/// Lexicographic in the base-4 string (first qubit most significant, I<X<Y<Z).
inline GeneratorBasis pauli_string_basis(int k) {
  if (k < 1) throw Error(ErrorCode::invalid_dimension, "Pauli string basis requires k >= 1 qubits");
  if (k > 10) throw Error(ErrorCode::invalid_dimension, "Pauli string basis limited to 10 qubits");
  const int dim = 1 << k;
  const long count = 1L << (2 * k);
  const double scale = std::sqrt(2.0 / dim);
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(count - 1));
  for (long code = 1; code < count; ++code) {
    ComplexMatrix m = ComplexMatrix::Identity(1, 1);
    for (int q = k - 1; q >= 0; --q) {
      const int letter = static_cast<int>((code >> (2 * q)) & 3);
      const ComplexMatrix p = detail::pauli(letter);
      ComplexMatrix next(m.rows() * 2, m.cols() * 2);
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = m(r, c) * p;
      m = std::move(next);
    }
    out.push_back(scale * m);
  }
  return GeneratorBasis(dim, std::move(out));
}

}  // namespace mbn
