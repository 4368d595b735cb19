#pragma once

#include "mbn/catalog.hpp"
#include "mbn/core.hpp"
#include "mbn/generators.hpp"
#include "mbn/measures.hpp"
#include "mbn/random.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace mbn {

/// Hermitian observable split into its distinct eigenvalues and the
/// corresponding eigenspaces, ready for repeated Born-rule sampling.
class PreparedObservable {
 public:
  explicit PreparedObservable(const ComplexMatrix& obs, double degeneracy_tol = 1e-9) {
    if (!is_hermitian(obs)) throw Error(ErrorCode::not_hermitian, "observable is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(obs);
    const auto& w = eig.eigenvalues();
    const auto& v = eig.eigenvectors();
    Eigen::Index start = 0;
    while (start < w.size()) {
      Eigen::Index stop = start + 1;
      while (stop < w.size() && w(stop) - w(start) <= degeneracy_tol) ++stop;
      levels_.push_back(w.segment(start, stop - start).mean());
      spaces_.push_back(v.middleCols(start, stop - start));
      start = stop;
    }
    dim_ = static_cast<int>(obs.rows());
  }

  int dim() const noexcept { return dim_; }
  const std::vector<double>& levels() const noexcept { return levels_; }

  /// Born probabilities of each distinct outcome, clipped at 0 and renormalized.
  std::vector<double> probabilities(const ComplexMatrix& rho) const {
    std::vector<double> p(levels_.size());
    double total = 0.0;
    for (std::size_t j = 0; j < spaces_.size(); ++j) {
      const double pj = (spaces_[j].adjoint() * rho * spaces_[j]).trace().real();
      total += (p[j] = std::max(pj, 0.0));
    }
    for (auto& x : p) x /= total;
    return p;
  }

  double exact(const ComplexMatrix& rho) const {
    double e = 0.0;
    for (std::size_t j = 0; j < spaces_.size(); ++j)
      e += levels_[j] * (spaces_[j].adjoint() * rho * spaces_[j]).trace().real();
    return e;
  }

 private:
  int dim_ = 0;
  std::vector<double> levels_;
  std::vector<ComplexMatrix> spaces_;
};

/// One multinomial draw of size n via sequential conditional binomials.
inline std::vector<std::uint64_t> sample_multinomial(std::uint64_t n, std::span<const double> probs, Rng& rng) {
  std::vector<std::uint64_t> counts(probs.size(), 0);
  std::uint64_t remaining = n;
  double mass = 1.0;
  for (std::size_t j = 0; j + 1 < probs.size() && remaining > 0; ++j) {
    const double q = mass > 0.0 ? std::clamp(probs[j] / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::uint64_t> binom(remaining, q);
    counts[j] = binom(rng);
    remaining -= counts[j];
    mass -= probs[j];
  }
  if (!probs.empty()) counts.back() += remaining;
  return counts;
}

/// Finite-shot estimate of <obs>: multinomial counts over the distinct
/// eigenvalues, weighted by those eigenvalues.
inline double simulate_expectation(const DensityMatrix& rho, const PreparedObservable& obs, std::uint64_t shots,
                                   Rng& rng) {
  if (shots < 1) throw Error(ErrorCode::domain, "shots must be >= 1");
  if (obs.dim() != rho.dim()) throw Error(ErrorCode::invalid_dimension, "observable and state dimensions differ");
  const auto probs = obs.probabilities(rho.matrix());
  const auto counts = sample_multinomial(shots, probs, rng);
  double e = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j)
    e += static_cast<double>(counts[j]) / static_cast<double>(shots) * obs.levels()[j];
  return e;
}

inline double simulate_expectation(const DensityMatrix& rho, const ComplexMatrix& obs, std::uint64_t shots,
                                   std::uint64_t seed) {
  Rng rng(seed);
  return simulate_expectation(rho, PreparedObservable(obs), shots, rng);
}

/// Exact <G_i> for every generator.
inline std::vector<double> expectation_values(const DensityMatrix& rho, const GeneratorBasis& basis) {
  std::vector<double> out;
  out.reserve(basis.size());
  for (const auto& g : basis) out.push_back((rho.matrix() * g).trace().real());
  return out;
}

/// rho_est = (1/d)(1 + sum x_i G_i), x_i = (d/2) <G_i>_est. Hermitian with unit
/// trace; positivity is not guaranteed, so the result is a quasi-state.
inline DensityMatrix linear_inversion(std::span<const double> estimates, const GeneratorBasis& basis, int d) {
  if (basis.dim() != d) throw Error(ErrorCode::invalid_dimension, "basis dimension does not match d");
  if (estimates.size() != basis.size()) {
    throw Error(ErrorCode::invalid_dimension, "linear inversion needs d^2-1 estimates");
  }
  ComplexMatrix rho = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  for (std::size_t i = 0; i < estimates.size(); ++i) rho += (0.5 * estimates[i]) * basis[i];
  rho = (0.5 * (rho + rho.adjoint())).eval();
  return DensityMatrix(std::move(rho), StateMode::quasi);
}

enum class ObservableBasis { pauli_strings, gell_mann };

inline GeneratorBasis make_observable_basis(ObservableBasis kind, int d) {
  if (kind == ObservableBasis::pauli_strings) return pauli_string_basis(qubit_count(d));
  return gell_mann_basis(d);
}

struct TomoConfig {
  std::uint64_t shots = 100;  // per observable
  int trials = 1000;
  std::uint64_t seed = 7;
  std::vector<std::string> measures{"mbn", "negativity"};
  ObservableBasis basis = ObservableBasis::pauli_strings;
  int threads = 1;
  bool exact_expectations = false;  // infinite-shot limit
};

struct TrialRecord {
  int trial = 0;
  std::string measure;
  double e_true = 0.0;
  double e_expt = 0.0;
  double delta = 0.0;
};

struct TomoResult {
  TomoConfig config;
  std::string state_label;
  std::vector<TrialRecord> records;  // trial-major, measures in config order
  std::map<std::string, std::vector<double>> deltas;
  int negative_estimates = 0;  // trials whose estimate had a negative eigenvalue

  int trials() const noexcept { return config.trials; }
};

inline double median(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorCode::domain, "median of empty sample");
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Finite-copies entanglement error study: for each trial, take an LU-orbit
/// member of `state`, estimate every observable with `shots` samples, invert,
/// and record Delta = |E_true - E_expt| / E_true for each measure. Every
/// measure in a trial is evaluated on the same estimate. Deterministic in
/// `seed`; trial i uses stream split(i) regardless of thread count.
inline TomoResult error_experiment(const CatalogState& state, const TomoConfig& cfg) {
  if (cfg.shots < 1) throw Error(ErrorCode::domain, "shots per observable must be >= 1");
  if (cfg.trials < 1) throw Error(ErrorCode::domain, "trials must be >= 1");
  qubit_count(state.rho.dim());
  const auto measures = parse_measures(cfg.measures);
  const int d = state.rho.dim();
  const GeneratorBasis basis = make_observable_basis(cfg.basis, d);
  std::vector<PreparedObservable> observables;
  observables.reserve(basis.size());
  for (const auto& g : basis) observables.emplace_back(g);

  const auto nm = measures.size();
  std::vector<TrialRecord> records(static_cast<std::size_t>(cfg.trials) * nm);
  std::vector<char> negative(static_cast<std::size_t>(cfg.trials), 0);

  auto run_trial = [&](int trial) {
    const auto index = static_cast<std::uint64_t>(trial);
    const CatalogState member = lu_orbit_member(state, index, cfg.seed);
    Rng shots_rng = Rng(cfg.seed).split(index).split(1);
    std::vector<double> estimates(basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
      estimates[j] = cfg.exact_expectations ? observables[j].exact(member.rho.matrix())
                                            : simulate_expectation(member.rho, observables[j], cfg.shots, shots_rng);
    }
    const DensityMatrix est = linear_inversion(estimates, basis, d);
    negative[index] = est.min_eigenvalue() < -tol::zero_eigenvalue ? 1 : 0;
    for (std::size_t k = 0; k < nm; ++k) {
      const double e_true = measures[k](member.rho, member.bip);
      if (!(e_true > tol::zero_eigenvalue)) {
        throw Error(ErrorCode::degenerate_reference,
                    "measure '" + measures[k].name + "' is zero on the reference state; relative error undefined");
      }
      const double e_expt = measures[k](est, member.bip);
      records[index * nm + k] = {trial, measures[k].name, e_true, e_expt, std::abs(e_true - e_expt) / e_true};
    }
  };

  const int threads = std::clamp(cfg.threads, 1, cfg.trials);
  if (threads == 1) {
    for (int t = 0; t < cfg.trials; ++t) run_trial(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (int t = next++; t < cfg.trials; t = next++) run_trial(t);
          } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
            next = cfg.trials;
          }
        });
      }
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  TomoResult out{cfg, state.label, std::move(records), {}, 0};
  for (const auto& m : measures) out.deltas[m.name].reserve(static_cast<std::size_t>(cfg.trials));
  for (const auto& r : out.records) out.deltas[r.measure].push_back(r.delta);
  out.negative_estimates = static_cast<int>(std::count(negative.begin(), negative.end(), 1));
  return out;
}

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t count = 0;
};

/// Uniform bins over [0, max]; the last bin is closed.
inline std::vector<HistogramBin> histogram(std::span<const double> values, int bins) {
  if (bins < 1) throw Error(ErrorCode::domain, "histogram needs at least one bin");
  if (values.empty()) throw Error(ErrorCode::domain, "histogram of empty sample");
  const double top = *std::max_element(values.begin(), values.end());
  const double span = top > 0.0 ? top : 1.0;
  const double width = span / bins;
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  for (int i = 0; i < bins; ++i) {
    out[static_cast<std::size_t>(i)].lo = width * i;
    out[static_cast<std::size_t>(i)].hi = (i + 1 == bins) ? span : width * (i + 1);
  }
  for (double v : values) {
    if (v < 0.0) throw Error(ErrorCode::domain, "histogram expects non-negative values");
    auto idx = static_cast<int>(v / width);
    idx = std::min(idx, bins - 1);
    ++out[static_cast<std::size_t>(idx)].count;
  }
  return out;
}

}  // namespace mbn
