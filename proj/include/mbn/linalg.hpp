#pragma once

#include "mbn/core.hpp"

#include <Eigen/SVD>

namespace mbn {

/// Kronecker product a (x) b.
template <typename DerivedA, typename DerivedB>
auto tensor(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar,
                                                      typename DerivedB::Scalar>::ReturnType;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Transpose of the chosen tensor factor of an (N*M)x(N*M) operator.
inline ComplexMatrix partial_transpose(const ComplexMatrix& m, Subsystem part, const Bipartition& bip) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::invalid_bipartition, "partial transpose of non-square matrix");
  bip.require_matches(static_cast<int>(m.rows()));
  const int n = bip.dim_a();
  const int k = bip.dim_b();
  ComplexMatrix out(m.rows(), m.cols());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < k; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < k; ++d) {
          // element <a b| m |c d>
          const Complex v = m(a * k + b, c * k + d);
          if (part == Subsystem::A)
            out(c * k + b, a * k + d) = v;
          else
            out(a * k + d, c * k + b) = v;
        }
  return out;
}

inline ComplexMatrix partial_transpose(const DensityMatrix& rho, Subsystem part, const Bipartition& bip) {
  return partial_transpose(rho.matrix(), part, bip);
}

/// Reduced operator on the kept subsystem (raw matrix form).
inline ComplexMatrix partial_trace_matrix(const ComplexMatrix& m, Subsystem keep, const Bipartition& bip) {
  bip.require_matches(static_cast<int>(m.rows()));
  const int n = bip.dim_a();
  const int k = bip.dim_b();
  if (keep == Subsystem::A) {
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        for (int b = 0; b < k; ++b) out(a, c) += m(a * k + b, c * k + b);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(k, k);
  for (int b = 0; b < k; ++b)
    for (int d = 0; d < k; ++d)
      for (int a = 0; a < n; ++a) out(b, d) += m(a * k + b, a * k + d);
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep, const Bipartition& bip) {
  return DensityMatrix(partial_trace_matrix(rho.matrix(), keep, bip), rho.mode());
}

/// Sum of singular values.
template <typename Derived>
double trace_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  using Plain = typename Derived::PlainObject;
  Eigen::BDCSVD<Plain> svd(m.eval());
  return svd.singularValues().sum();
}

/// U rho U^dagger.
inline ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& rho) {
  return u * rho * u.adjoint();
}

inline DensityMatrix conjugate(const ComplexMatrix& u, const DensityMatrix& rho) {
  ComplexMatrix out = conjugate(u, rho.matrix());
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(std::move(out), rho.mode());
}

}  // namespace mbn
