#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace mbn {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Numerical tolerances shared by every module.
namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double trace = 1e-10;
inline constexpr double psd = 1e-9;
inline constexpr double generator_trace = 1e-12;
inline constexpr double orthogonality = 1e-10;
inline constexpr double zero_eigenvalue = 1e-12;
inline constexpr double imaginary_residue = 1e-10;
}  // namespace tol

enum class ErrorCode {
  invalid_dimension,
  invalid_bipartition,
  invalid_state,
  not_hermitian,
  domain,
  ordering_mismatch,
  step_size,
  degenerate_reference,
  unknown_measure,
  parse,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a Bloch-diagonal coefficient table does not produce a state
/// under the chosen generator basis. Carries the offending minimum eigenvalue.
class OrderingMismatch : public Error {
 public:
  OrderingMismatch(const std::string& what, double min_eigenvalue)
      : Error(ErrorCode::ordering_mismatch, what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

enum class Subsystem { A, B };

/// Split of a composite Hilbert space into N (subsystem A) and M (subsystem B).
class Bipartition {
 public:
  Bipartition(int dim_a, int dim_b) : dim_a_(dim_a), dim_b_(dim_b) {
    if (dim_a < 2 || dim_b < 2) {
      throw Error(ErrorCode::invalid_bipartition,
                  "bipartition dimensions must be >= 2, got " + std::to_string(dim_a) + "|" +
                      std::to_string(dim_b));
    }
  }

  int dim_a() const noexcept { return dim_a_; }
  int dim_b() const noexcept { return dim_b_; }
  int total() const noexcept { return dim_a_ * dim_b_; }

  void require_matches(int dim) const {
    if (dim != total()) {
      throw Error(ErrorCode::invalid_bipartition,
                  "state dimension " + std::to_string(dim) + " does not match bipartition " +
                      std::to_string(dim_a_) + "|" + std::to_string(dim_b_));
    }
  }

  friend bool operator==(const Bipartition&, const Bipartition&) = default;

 private:
  int dim_a_;
  int dim_b_;
};

inline double hermiticity_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& m, double eps = tol::hermitian) {
  return m.rows() == m.cols() && (m.size() == 0 || hermiticity_defect(m) <= eps);
}

/// Ascending eigenvalues of a Hermitian matrix (lower triangle is read).
inline RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

/// Strict states must be PSD; quasi-states (linear-inversion output) only need
/// to be Hermitian with unit trace.
enum class StateMode { strict, quasi };

class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m, StateMode mode = StateMode::strict)
      : matrix_(std::move(m)), mode_(mode) {
    validate();
  }

  /// |psi><psi| for a unit vector.
  static DensityMatrix pure(const ComplexVector& psi) {
    const double norm = psi.norm();
    if (std::abs(norm - 1.0) > 1e-10) {
      throw Error(ErrorCode::invalid_state, "state vector is not normalized");
    }
    return DensityMatrix(psi * psi.adjoint());
  }

  static DensityMatrix maximally_mixed(int dim) {
    if (dim < 1) throw Error(ErrorCode::invalid_dimension, "dimension must be >= 1");
    return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  StateMode mode() const noexcept { return mode_; }

  double min_eigenvalue() const { return hermitian_eigenvalues(matrix_)(0); }
  double purity() const { return (matrix_ * matrix_).trace().real(); }

 private:
  void validate() const {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
      throw Error(ErrorCode::invalid_state, "density matrix must be square and non-empty");
    }
    if (!matrix_.allFinite()) {
      throw Error(ErrorCode::invalid_state, "density matrix has non-finite entries");
    }
    if (hermiticity_defect(matrix_) > tol::hermitian) {
      throw Error(ErrorCode::not_hermitian, "density matrix is not Hermitian");
    }
    const Complex tr = matrix_.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > tol::trace) {
      throw Error(ErrorCode::invalid_state, "density matrix trace is not 1");
    }
    if (mode_ == StateMode::strict && min_eigenvalue() < -tol::psd) {
      throw Error(ErrorCode::invalid_state, "density matrix is not positive semidefinite");
    }
  }

  ComplexMatrix matrix_;
  StateMode mode_;
};

/// p*rho1 + (1-p)*rho2. The result is strict only if both inputs are.
inline DensityMatrix mix(double p, const DensityMatrix& rho1, const DensityMatrix& rho2) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::domain, "mixing weight outside [0,1]");
  if (rho1.dim() != rho2.dim()) throw Error(ErrorCode::invalid_dimension, "mixing states of unequal dimension");
  const StateMode mode = (rho1.mode() == StateMode::strict && rho2.mode() == StateMode::strict)
                             ? StateMode::strict
                             : StateMode::quasi;
  return DensityMatrix(p * rho1.matrix() + (1.0 - p) * rho2.matrix(), mode);
}

/// Schmidt-form maximally entangled state (1/sqrt d) sum_i |i,i>, d = min(N,M).
inline DensityMatrix maximally_entangled_state(const Bipartition& bip) {
  const int d = std::min(bip.dim_a(), bip.dim_b());
  ComplexVector psi = ComplexVector::Zero(bip.total());
  for (int i = 0; i < d; ++i) psi(i * bip.dim_b() + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return DensityMatrix::pure(psi);
}

}  // namespace mbn
