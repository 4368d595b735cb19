#pragma once

#include "mbn/core.hpp"
#include "mbn/generators.hpp"
#include "mbn/linalg.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <tuple>

namespace mbn {

/// Local Bloch vectors r (subsystem A), s (subsystem B) and the correlation
/// matrix T of a bipartite operator, for a fixed pair of generator bases.
struct BlochDecomposition {
  Bipartition bip;
  RealVector r;
  RealVector s;
  RealMatrix T;
};

/// Parameters (m, a, b) of the modified Bloch matrix family.
struct IbmParams {
  int m = 4;
  double a = 1.0;
  double b = 1.0;

  void validate() const {
    if (m < 1) throw Error(ErrorCode::domain, "IBM parameter m must be >= 1");
    if (!(a >= 0.0) || !(b >= 0.0)) throw Error(ErrorCode::domain, "IBM parameters a, b must be >= 0");
  }

  /// m = 4, a = sqrt(2/(M(M-1))), b = sqrt(2/(N(N-1))).
  static IbmParams defaults(const Bipartition& bip) {
    const double n = bip.dim_a();
    const double k = bip.dim_b();
    return {4, std::sqrt(2.0 / (k * (k - 1.0))), std::sqrt(2.0 / (n * (n - 1.0)))};
  }
  static IbmParams cm() { return {1, 0.0, 0.0}; }
  static IbmParams gcm() { return {1, 1.0, 1.0}; }

  friend bool operator==(const IbmParams&, const IbmParams&) = default;
};

struct ModifiedBlochMatrix {
  RealMatrix matrix;
  IbmParams params;
  Bipartition bip;
};

namespace detail {

/// Read-mostly memo table safe for concurrent callers.
template <typename Key, typename Value>
class SyncCache {
 public:
  template <typename Make>
  const Value& get(const Key& key, Make&& make) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = table_.find(key); it != table_.end()) return *it->second;
    }
    auto fresh = std::make_unique<Value>(make());
    std::unique_lock lock(mutex_);
    auto [it, inserted] = table_.try_emplace(key, std::move(fresh));
    return *it->second;
  }

 private:
  std::shared_mutex mutex_;
  std::map<Key, std::unique_ptr<Value>> table_;
};

inline double real_part_checked(Complex v) {
  if (std::abs(v.imag()) > tol::imaginary_residue) {
    throw Error(ErrorCode::not_hermitian, "Bloch coefficient has a non-negligible imaginary part");
  }
  return v.real();
}

/// Tr(X Y) without forming the product.
inline Complex trace_of_product(const ComplexMatrix& x, const ComplexMatrix& y) {
  return (x.array() * y.transpose().array()).sum();
}

}  // namespace detail

/// Shared canonical Gell-Mann basis for dimension d.
inline const GeneratorBasis& cached_gell_mann(int d) {
  static detail::SyncCache<int, GeneratorBasis> cache;
  return cache.get(d, [d] { return gell_mann_basis(d); });
}

/// r_i = (N/2) Tr(rho (l_i x 1)), s_j = (M/2) Tr(rho (1 x l~_j)),
/// t_ij = (NM/4) Tr(rho (l_i x l~_j)).
inline BlochDecomposition decompose(const DensityMatrix& rho, const Bipartition& bip,
                                    const GeneratorBasis& basis_a, const GeneratorBasis& basis_b) {
  bip.require_matches(rho.dim());
  if (basis_a.dim() != bip.dim_a() || basis_b.dim() != bip.dim_b()) {
    throw Error(ErrorCode::invalid_dimension, "generator basis dimension does not match bipartition");
  }
  const int n = bip.dim_a();
  const int k = bip.dim_b();
  const ComplexMatrix& m = rho.matrix();

  BlochDecomposition out{bip, RealVector(basis_a.size()), RealVector(basis_b.size()),
                         RealMatrix(basis_a.size(), basis_b.size())};

  const ComplexMatrix rho_a = partial_trace_matrix(m, Subsystem::A, bip);
  const ComplexMatrix rho_b = partial_trace_matrix(m, Subsystem::B, bip);
  for (std::size_t i = 0; i < basis_a.size(); ++i)
    out.r(i) = 0.5 * n * detail::real_part_checked(detail::trace_of_product(rho_a, basis_a[i]));
  for (std::size_t j = 0; j < basis_b.size(); ++j)
    out.s(j) = 0.5 * k * detail::real_part_checked(detail::trace_of_product(rho_b, basis_b[j]));

  // reduced[c,d] = sum_{a,b} l_i[b,a] rho[(a,c),(b,d)] = Tr_A((l_i x 1) rho)
  ComplexMatrix reduced(k, k);
  for (std::size_t i = 0; i < basis_a.size(); ++i) {
    const ComplexMatrix& g = basis_a[i];
    reduced.setZero();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const Complex w = g(b, a);
        if (w == Complex(0.0, 0.0)) continue;
        reduced += w * m.block(a * k, b * k, k, k);
      }
    for (std::size_t j = 0; j < basis_b.size(); ++j) {
      out.T(i, j) = 0.25 * n * k * detail::real_part_checked(detail::trace_of_product(reduced, basis_b[j]));
    }
  }
  return out;
}

/// Decomposition in the canonical Gell-Mann bases of both sides.
inline BlochDecomposition decompose(const DensityMatrix& rho, const Bipartition& bip) {
  return decompose(rho, bip, cached_gell_mann(bip.dim_a()), cached_gell_mann(bip.dim_b()));
}

/// Inverse of decompose: (1/NM)(1 + sum r_i l_i x 1 + sum s_j 1 x l~_j + sum t_ij l_i x l~_j).
inline ComplexMatrix reconstruct(const BlochDecomposition& dec, const GeneratorBasis& basis_a,
                                 const GeneratorBasis& basis_b) {
  const int n = dec.bip.dim_a();
  const int k = dec.bip.dim_b();
  const ComplexMatrix id_a = ComplexMatrix::Identity(n, n);
  const ComplexMatrix id_b = ComplexMatrix::Identity(k, k);
  ComplexMatrix out = ComplexMatrix::Identity(n * k, n * k);
  for (std::size_t i = 0; i < basis_a.size(); ++i) out += dec.r(i) * tensor(basis_a[i], id_b);
  for (std::size_t j = 0; j < basis_b.size(); ++j) out += dec.s(j) * tensor(id_a, basis_b[j]);
  for (std::size_t i = 0; i < basis_a.size(); ++i)
    for (std::size_t j = 0; j < basis_b.size(); ++j)
      if (dec.T(i, j) != 0.0) out += dec.T(i, j) * tensor(basis_a[i], basis_b[j]);
  return out / static_cast<double>(n * k);
}

/// S_{m,a,b} = [[a b E_mxm, b w_m(s)^T], [a w_m(r), T]].
inline ModifiedBlochMatrix modified_bloch(const BlochDecomposition& dec, const IbmParams& p) {
  p.validate();
  const auto rows = p.m + dec.r.size();
  const auto cols = p.m + dec.s.size();
  RealMatrix s(rows, cols);
  s.topLeftCorner(p.m, p.m).setConstant(p.a * p.b);
  for (int i = 0; i < p.m; ++i) {
    s.block(i, p.m, 1, dec.s.size()) = p.b * dec.s.transpose();
    s.block(p.m, i, dec.r.size(), 1) = p.a * dec.r;
  }
  s.bottomRightCorner(dec.r.size(), dec.s.size()) = dec.T;
  return {std::move(s), p, dec.bip};
}

/// Separability bound c = sqrt(m b^2 + (N^2-N)/2) * sqrt(m a^2 + (M^2-M)/2),
/// the trace norm of S for every pure product state.
inline double ibm_threshold(const IbmParams& p, const Bipartition& bip) {
  p.validate();
  const double n = bip.dim_a();
  const double k = bip.dim_b();
  return std::sqrt(p.m * p.b * p.b + 0.5 * (n * n - n)) * std::sqrt(p.m * p.a * p.a + 0.5 * (k * k - k));
}

struct IbmEvaluation {
  double trace_norm = 0.0;
  double threshold = 0.0;
  double violation = 0.0;
};

inline IbmEvaluation evaluate_ibm(const DensityMatrix& rho, const Bipartition& bip, const IbmParams& p) {
  const auto s = modified_bloch(decompose(rho, bip), p);
  IbmEvaluation out;
  out.trace_norm = trace_norm(s.matrix);
  out.threshold = ibm_threshold(p, bip);
  out.violation = out.trace_norm - out.threshold;
  return out;
}

/// |S_{m,a,b}|_tr - c; positive values certify entanglement.
inline double violation(const DensityMatrix& rho, const Bipartition& bip, const IbmParams& p) {
  return evaluate_ibm(rho, bip, p).violation;
}

/// Violation of the maximally entangled state of `bip`; memoized per (bip, params).
inline double mbn_normalizer(const Bipartition& bip, const IbmParams& p) {
  using Key = std::tuple<int, int, int, double, double>;
  static detail::SyncCache<Key, double> cache;
  const Key key{bip.dim_a(), bip.dim_b(), p.m, p.a, p.b};
  return cache.get(key, [&] { return violation(maximally_entangled_state(bip), bip, p); });
}

/// Modified Bloch norm: max(0, V) / V(rho_max). Accepts quasi-states.
inline double mbn(const DensityMatrix& rho, const Bipartition& bip, const IbmParams& p) {
  const double v = violation(rho, bip, p);
  const double norm = mbn_normalizer(bip, p);
  if (!(norm > 0.0)) {
    throw Error(ErrorCode::internal, "maximally entangled state does not violate the IBM bound");
  }
  return v > tol::zero_eigenvalue ? v / norm : 0.0;
}

inline double mbn(const DensityMatrix& rho, const Bipartition& bip) {
  return mbn(rho, bip, IbmParams::defaults(bip));
}

/// |sum of negative eigenvalues| of the partial transpose over B.
inline double negativity(const DensityMatrix& rho, const Bipartition& bip) {
  const RealVector ev = hermitian_eigenvalues(partial_transpose(rho.matrix(), Subsystem::B, bip));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) < -tol::zero_eigenvalue) sum += ev(i);
  return sum < 0.0 ? -sum : 0.0;
}

/// Correlation-matrix criterion violation (m=1, a=b=0).
inline double cm_value(const DensityMatrix& rho, const Bipartition& bip) {
  return violation(rho, bip, IbmParams::cm());
}

/// Generalized correlation-matrix criterion violation (m=a=b=1).
inline double gcm_value(const DensityMatrix& rho, const Bipartition& bip) {
  return violation(rho, bip, IbmParams::gcm());
}

}  // namespace mbn
