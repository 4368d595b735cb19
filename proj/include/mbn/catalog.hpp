#pragma once

#include "mbn/bloch.hpp"
#include "mbn/core.hpp"
#include "mbn/generators.hpp"
#include "mbn/linalg.hpp"
#include "mbn/random.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mbn {

struct CatalogState {
  std::string label;
  DensityMatrix rho;
  Bipartition bip;
  std::vector<std::pair<std::string, double>> params;
};

namespace detail {

inline ComplexVector basis_ket(int dim, int index) {
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return v;
}

/// |i>|j> in a d_a x d_b product basis.
inline ComplexVector product_ket(int dim_b, int dim, int i, int j) { return basis_ket(dim, i * dim_b + j); }

inline ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

}  // namespace detail

/// Two-qutrit family rho(alpha) = 2/7 |psi+><psi+| + alpha/7 sigma+ + (5-alpha)/7 sigma-.
/// Separable for alpha in [2,3], PPT-entangled for (3,4], NPT for (4,5].
inline CatalogState horodecki_qutrit(double alpha) {
  if (!(alpha >= 2.0 && alpha <= 5.0)) throw Error(ErrorCode::domain, "alpha must lie in [2, 5]");
  const int dim = 9;
  auto ket = [&](int i, int j) { return detail::product_ket(3, dim, i, j); };
  const ComplexVector psi = (ket(0, 0) + ket(1, 1) + ket(2, 2)) / std::sqrt(3.0);
  ComplexMatrix sigma_plus = ComplexMatrix::Zero(dim, dim);
  ComplexMatrix sigma_minus = ComplexMatrix::Zero(dim, dim);
  for (auto [i, j] : std::array<std::pair<int, int>, 3>{{{0, 1}, {1, 2}, {2, 0}}})
    sigma_plus += detail::projector(ket(i, j)) / 3.0;
  for (auto [i, j] : std::array<std::pair<int, int>, 3>{{{1, 0}, {2, 1}, {0, 2}}})
    sigma_minus += detail::projector(ket(i, j)) / 3.0;
  ComplexMatrix rho = (2.0 / 7.0) * detail::projector(psi) + (alpha / 7.0) * sigma_plus +
                      ((5.0 - alpha) / 7.0) * sigma_minus;
  return {"horodecki_qutrit", DensityMatrix(std::move(rho)), Bipartition(3, 3), {{"alpha", alpha}}};
}

/// p * st + (1-p) * 1/d.
inline CatalogState mix_with_identity(const CatalogState& st, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::domain, "mixing parameter p must lie in [0, 1]");
  CatalogState out{st.label, mix(p, st.rho, DensityMatrix::maximally_mixed(st.rho.dim())), st.bip, st.params};
  out.params.emplace_back("p", p);
  return out;
}

/// Four-qubit PPT entangled state of Toth and Vertesi, split as two qubits | two qubits.
/// Each side uses the ququart labels {0,1,2,3}.
inline CatalogState toth_4qubit() {
  const int dim = 16;
  auto ket = [&](int i, int j) { return detail::product_ket(4, dim, i, j); };
  const double r2 = std::sqrt(2.0);
  const std::array<ComplexVector, 4> heavy{
      ComplexVector((ket(0, 1) + ket(2, 3)) / r2), ComplexVector((ket(1, 0) + ket(3, 2)) / r2),
      ComplexVector((ket(1, 1) + ket(2, 2)) / r2), ComplexVector((ket(0, 0) - ket(3, 3)) / r2)};
  const std::array<ComplexVector, 2> light{ComplexVector((ket(0, 3) + ket(1, 2) + r2 * ket(2, 1)) / 2.0),
                                           ComplexVector((-ket(0, 3) + ket(1, 2) + r2 * ket(3, 0)) / 2.0)};
  const double q = (r2 - 1.0) / 2.0;
  const double p = (1.0 - 2.0 * q) / 4.0;
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  for (const auto& v : heavy) rho += p * detail::projector(v);
  for (const auto& v : light) rho += q * detail::projector(v);
  return {"toth_4qubit", DensityMatrix(std::move(rho)), Bipartition(4, 4), {{"p", p}, {"q", q}}};
}

/// rho = 1/d^2 + sum_i t_i (B_i x B_i), where B_i are the generators of `basis`
/// rescaled so that Tr(B_i B_j) = generator_norm * delta_ij.
///
/// `rounding_budget` absorbs negative eigenvalues caused by coefficients
/// printed to finite precision: eigenvalues in [-budget, 0) are clipped to 0
/// and the trace renormalized. Anything below raises OrderingMismatch.
inline DensityMatrix bloch_diagonal_state(std::span<const double> coeffs, const GeneratorBasis& basis,
                                          double generator_norm, double rounding_budget = 0.0) {
  if (coeffs.size() != basis.size()) {
    throw Error(ErrorCode::invalid_dimension, "Bloch-diagonal coefficient count must equal d^2-1");
  }
  const int d = basis.dim();
  const double scale = generator_norm / 2.0;  // (sqrt(norm/2))^2 for B_i x B_i
  ComplexMatrix rho = ComplexMatrix::Identity(d * d, d * d) / static_cast<double>(d * d);
  for (std::size_t i = 0; i < coeffs.size(); ++i) rho += coeffs[i] * scale * tensor(basis[i], basis[i]);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(rho);
  const double min_ev = eig.eigenvalues()(0);
  if (min_ev < -rounding_budget) {
    throw OrderingMismatch("Bloch-diagonal coefficients do not give a positive state in this generator order "
                           "(min eigenvalue " + std::to_string(min_ev) + ")",
                           min_ev);
  }
  if (min_ev < 0.0) {
    const RealVector clipped = eig.eigenvalues().cwiseMax(0.0);
    rho = eig.eigenvectors() * clipped.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
    rho /= rho.trace().real();
    rho = (0.5 * (rho + rho.adjoint())).eval();
  }
  return DensityMatrix(std::move(rho));
}

/// Correlation coefficients of the Bloch-diagonal bound entangled two-ququart
/// state (1-based index sets as tabulated).
inline std::array<double, 15> bloch_diagonal_bd_coefficients() {
  std::array<double, 15> t{};
  for (int i : {1, 2, 3, 4, 5, 8, 11, 13, 15}) t[i - 1] = -0.0557066;
  for (int i : {6, 10, 12}) t[i - 1] = 0.0142664;
  for (int i : {7, 9, 14}) t[i - 1] = 0.0971467;
  return t;
}

/// Coefficients carry seven decimals: 15 terms x 5e-8 rounding x operator norm 1/4, rounded up.
inline constexpr double bloch_diagonal_rounding_budget = 2e-7;

/// Bloch-diagonal 4-qubit bound entangled state (two qubits | two qubits).
/// Index i runs over the two-qubit Pauli strings in lexicographic order
/// (IX, IY, IZ, XI, ..., ZZ) normalized to Tr(P_i P_j) = delta_ij.
inline CatalogState bloch_diagonal_bd() {
  const auto t = bloch_diagonal_bd_coefficients();
  DensityMatrix rho = bloch_diagonal_state(t, pauli_string_basis(2), 1.0, bloch_diagonal_rounding_budget);
  return {"bloch_diagonal_bd", std::move(rho), Bipartition(4, 4), {}};
}

/// Maximally entangled multi-qubit states, first qubit vs the rest.
inline CatalogState me_state(int k) {
  const int dim = 1 << std::max(k, 0);
  ComplexVector psi = ComplexVector::Zero(dim);
  switch (k) {
    case 2:
      psi(0b00) = psi(0b11) = 1.0;
      break;
    case 3:
      psi(0b000) = psi(0b111) = 1.0;
      break;
    case 4:
      psi(0b0000) = psi(0b1100) = psi(0b0011) = 1.0;
      psi(0b1111) = -1.0;
      break;
    default:
      throw Error(ErrorCode::domain, "ME states are defined for k in {2,3,4}");
  }
  psi /= psi.norm();
  return {"me" + std::to_string(k), DensityMatrix::pure(psi), Bipartition(2, dim / 2), {{"k", k}}};
}

inline CatalogState max_entangled(const Bipartition& bip) {
  return {"max_entangled", maximally_entangled_state(bip), bip,
          {{"N", bip.dim_a()}, {"M", bip.dim_b()}}};
}

inline CatalogState bell_state() {
  CatalogState st = max_entangled(Bipartition(2, 2));
  st.label = "bell";
  st.params.clear();
  return st;
}

inline CatalogState maximally_mixed_state(const Bipartition& bip) {
  return {"maximally_mixed", DensityMatrix::maximally_mixed(bip.total()), bip,
          {{"N", bip.dim_a()}, {"M", bip.dim_b()}}};
}

inline CatalogState random_pure(const Bipartition& bip, std::uint64_t seed) {
  Rng rng(seed);
  return {"random_pure", DensityMatrix::pure(haar_state_vector(bip.total(), rng)), bip,
          {{"seed", static_cast<double>(seed)}}};
}

inline ComplexVector random_product_vector(const Bipartition& bip, Rng& rng) {
  const ComplexVector a = haar_state_vector(bip.dim_a(), rng);
  const ComplexVector b = haar_state_vector(bip.dim_b(), rng);
  return tensor(a, b).col(0);
}

inline CatalogState random_product(const Bipartition& bip, std::uint64_t seed) {
  Rng rng(seed);
  ComplexVector v = random_product_vector(bip, rng);
  v /= v.norm();
  return {"random_product", DensityMatrix::pure(v), bip, {{"seed", static_cast<double>(seed)}}};
}

namespace detail {

/// Flat-Dirichlet weights of length n.
inline std::vector<double> dirichlet_uniform(int n, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& x : w) total += (x = expo(rng));
  for (auto& x : w) x /= total;
  return w;
}

template <typename Draw>
ComplexMatrix random_mixture(int dim, int max_terms, Rng& rng, Draw&& draw) {
  std::uniform_int_distribution<int> count(2, max_terms);
  const int n = count(rng);
  const auto w = dirichlet_uniform(n, rng);
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    const ComplexVector v = draw();
    rho += w[static_cast<std::size_t>(i)] * projector(v);
  }
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace detail

/// Mixture of 2..10 Haar-random pure states with flat-Dirichlet weights.
inline CatalogState random_mixed(const Bipartition& bip, std::uint64_t seed) {
  Rng rng(seed);
  ComplexMatrix rho = detail::random_mixture(bip.total(), 10, rng, [&] { return haar_state_vector(bip.total(), rng); });
  return {"random_mixed", DensityMatrix(std::move(rho)), bip, {{"seed", static_cast<double>(seed)}}};
}

/// Mixture of 2..10 random product pure states: separable by construction.
inline CatalogState random_separable(const Bipartition& bip, std::uint64_t seed) {
  Rng rng(seed);
  ComplexMatrix rho = detail::random_mixture(bip.total(), 10, rng, [&] {
    ComplexVector v = random_product_vector(bip, rng);
    return ComplexVector(v / v.norm());
  });
  return {"random_separable", DensityMatrix(std::move(rho)), bip, {{"seed", static_cast<double>(seed)}}};
}

/// U_A (x) U_B with independent Haar factors.
inline ComplexMatrix random_local_unitary(const Bipartition& bip, Rng& rng) {
  const ComplexMatrix ua = haar_unitary(bip.dim_a(), rng);
  const ComplexMatrix ub = haar_unitary(bip.dim_b(), rng);
  return tensor(ua, ub);
}

inline int qubit_count(int dim) {
  if (dim < 2 || !std::has_single_bit(static_cast<unsigned>(dim))) {
    throw Error(ErrorCode::invalid_dimension, "state is not a multi-qubit state (dimension not a power of 2)");
  }
  return std::countr_zero(static_cast<unsigned>(dim));
}

/// The `index`-th member of the LU orbit: independent Haar single-qubit
/// unitaries on every qubit, drawn from stream split(index) of `seed`.
inline CatalogState lu_orbit_member(const CatalogState& st, std::uint64_t index, std::uint64_t seed) {
  const int qubits = qubit_count(st.rho.dim());
  qubit_count(st.bip.dim_a());
  if (std::abs(st.rho.purity() - 1.0) > 1e-9) throw Error(ErrorCode::invalid_state, "LU orbit requires a pure state");
  Rng rng = Rng(seed).split(index);
  ComplexMatrix u = haar_unitary(2, rng);
  for (int q = 1; q < qubits; ++q) u = tensor(u, haar_unitary(2, rng));
  CatalogState out{st.label, conjugate(u, st.rho), st.bip, st.params};
  out.params.emplace_back("orbit_index", static_cast<double>(index));
  return out;
}

inline std::vector<CatalogState> lu_orbit(const CatalogState& st, int count, std::uint64_t seed) {
  std::vector<CatalogState> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) out.push_back(lu_orbit_member(st, static_cast<std::uint64_t>(i), seed));
  return out;
}

inline std::vector<std::string> catalog_labels() {
  return {"bell",   "horodecki_qutrit", "toth_4qubit",    "bloch_diagonal_bd", "me2",
          "me3",    "me4",              "max_entangled",  "maximally_mixed"};
}

struct CatalogOptions {
  double alpha = 4.5;
  int dim_a = 2;
  int dim_b = 2;
};

/// Builds a catalog state by label ("horodecki" is accepted for "horodecki_qutrit").
inline CatalogState make_catalog_state(const std::string& label, const CatalogOptions& opt = {}) {
  if (label == "bell") return bell_state();
  if (label == "horodecki_qutrit" || label == "horodecki") return horodecki_qutrit(opt.alpha);
  if (label == "toth_4qubit") return toth_4qubit();
  if (label == "bloch_diagonal_bd") return bloch_diagonal_bd();
  if (label == "me2") return me_state(2);
  if (label == "me3") return me_state(3);
  if (label == "me4") return me_state(4);
  if (label == "max_entangled") return max_entangled(Bipartition(opt.dim_a, opt.dim_b));
  if (label == "maximally_mixed") return maximally_mixed_state(Bipartition(opt.dim_a, opt.dim_b));
  throw Error(ErrorCode::domain, "unknown catalog label '" + label + "'");
}

}  // namespace mbn
