#pragma once

#include "mbn/core.hpp"
#include "mbn/linalg.hpp"
#include "mbn/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mbn {

/// Trace-preserving Kraus channel; completeness sum K^dag K = 1 is checked on construction.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<ComplexMatrix> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) throw Error(ErrorCode::invalid_dimension, "Kraus channel needs at least one operator");
    const auto d = ops_.front().rows();
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto& k : ops_) {
      if (k.rows() != d || k.cols() != d) throw Error(ErrorCode::invalid_dimension, "Kraus operators differ in shape");
      sum += k.adjoint() * k;
    }
    if ((sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
      throw Error(ErrorCode::invalid_state, "Kraus operators violate completeness");
    }
  }

  int dim() const noexcept { return static_cast<int>(ops_.front().rows()); }
  const std::vector<ComplexMatrix>& ops() const noexcept { return ops_; }

 private:
  std::vector<ComplexMatrix> ops_;
};

/// Local dephasing on k qubits: every tensor product of {sqrt(alpha) I, sqrt(1-alpha) Z}
/// with alpha = (1 + exp(-t/T2)) / 2. Operators with zero weight are dropped.
inline KrausChannel dephasing_channel(double t, double t2, int k) {
  if (!(t >= 0.0)) throw Error(ErrorCode::domain, "dephasing time must be >= 0");
  if (!(t2 > 0.0)) throw Error(ErrorCode::domain, "dephasing constant T2 must be > 0");
  if (k < 1 || k > 10) throw Error(ErrorCode::invalid_dimension, "dephasing channel needs 1..10 qubits");
  const double alpha = 0.5 * (1.0 + std::exp(-t / t2));
  ComplexMatrix k0 = std::sqrt(alpha) * ComplexMatrix::Identity(2, 2);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k1(0, 0) = std::sqrt(1.0 - alpha);
  k1(1, 1) = -std::sqrt(1.0 - alpha);
  const std::array<ComplexMatrix, 2> single{k0, k1};

  std::vector<ComplexMatrix> ops;
  for (unsigned code = 0; code < (1u << k); ++code) {
    ComplexMatrix m = ComplexMatrix::Identity(1, 1);
    for (int q = k - 1; q >= 0; --q) m = tensor(m, single[(code >> q) & 1u]);
    if (m.cwiseAbs().maxCoeff() > 0.0) ops.push_back(std::move(m));
  }
  return KrausChannel(std::move(ops));
}

/// sum_i K_i rho K_i^dag.
inline DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch) {
  if (ch.dim() != rho.dim()) throw Error(ErrorCode::invalid_dimension, "channel and state dimensions differ");
  ComplexMatrix out = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (const auto& k : ch.ops()) out.noalias() += k * rho.matrix() * k.adjoint();
  out = (0.5 * (out + out.adjoint())).eval();
  return DensityMatrix(std::move(out), rho.mode());
}

/// Anticommutator term of the dissipator: standard GKSL uses {L^dag L, rho};
/// `literal` uses {rho, L L^dag} as printed in some references.
enum class DissipatorForm { standard, literal };

struct JumpOperator {
  ComplexMatrix op;
  double rate = 0.0;  // 1/s
};

class LindbladModel {
 public:
  LindbladModel(std::vector<JumpOperator> jumps, DissipatorForm form = DissipatorForm::standard)
      : jumps_(std::move(jumps)), form_(form) {
    if (jumps_.empty()) throw Error(ErrorCode::invalid_dimension, "Lindblad model needs at least one jump operator");
    const auto d = jumps_.front().op.rows();
    for (auto& j : jumps_) {
      if (j.op.rows() != d || j.op.cols() != d) throw Error(ErrorCode::invalid_dimension, "jump operators differ in shape");
      if (!(j.rate >= 0.0)) throw Error(ErrorCode::domain, "Lindblad rates must be >= 0");
    }
    for (const auto& j : jumps_) {
      anticommuted_.push_back(form_ == DissipatorForm::standard ? ComplexMatrix(j.op.adjoint() * j.op)
                                                                : ComplexMatrix(j.op * j.op.adjoint()));
    }
  }

  int dim() const noexcept { return static_cast<int>(jumps_.front().op.rows()); }
  DissipatorForm form() const noexcept { return form_; }
  /// The literal form changes the trace at rate sum_k gamma_k Tr(rho [L^dag L - L L^dag]).
  bool trace_preserving() const noexcept { return form_ == DissipatorForm::standard; }
  const std::vector<JumpOperator>& jumps() const noexcept { return jumps_; }

  /// d rho / dt.
  ComplexMatrix rhs(const ComplexMatrix& rho) const {
    ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      const auto& j = jumps_[k];
      if (j.rate == 0.0) continue;
      const ComplexMatrix& ac = anticommuted_[k];
      out.noalias() += j.rate * (j.op * rho * j.op.adjoint());
      out.noalias() -= (0.5 * j.rate) * (ac * rho + rho * ac);
    }
    return out;
  }

 private:
  std::vector<JumpOperator> jumps_;
  DissipatorForm form_;
  std::vector<ComplexMatrix> anticommuted_;
};

/// Correlated amplitude damping: a single jump L = a^(x k), a = |0><1|.
inline LindbladModel correlated_amplitude_damping(int k, double gamma, DissipatorForm form) {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  ComplexMatrix l = a;
  for (int q = 1; q < k; ++q) l = tensor(l, a);
  return LindbladModel({{l, gamma}}, form);
}

/// Unnormalized classical RK4 step.
inline ComplexMatrix rk4_step(const ComplexMatrix& rho, const LindbladModel& model, double dt) {
  const ComplexMatrix k1 = model.rhs(rho);
  const ComplexMatrix k2 = model.rhs(rho + (0.5 * dt) * k1);
  const ComplexMatrix k3 = model.rhs(rho + (0.5 * dt) * k2);
  const ComplexMatrix k4 = model.rhs(rho + dt * k3);
  return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline constexpr double max_step_trace_drift = 1e-6;

/// One RK4 step followed by re-Hermitization and trace renormalization.
/// For trace-preserving models, throws step_size if the raw step drifts the
/// trace by more than 1e-6.
inline ComplexMatrix lindblad_step(const ComplexMatrix& rho, const LindbladModel& model, double dt,
                                   double* trace_drift = nullptr) {
  if (!(dt > 0.0)) throw Error(ErrorCode::domain, "time step must be > 0");
  ComplexMatrix next = rk4_step(rho, model, dt);
  const Complex tr_before = rho.trace();
  const Complex tr_after = next.trace();
  const double drift = std::abs(tr_after - tr_before);
  if (trace_drift) *trace_drift = drift;
  if (model.trace_preserving() && drift > max_step_trace_drift) {
    throw Error(ErrorCode::step_size, "trace drift " + std::to_string(drift) + " per step exceeds 1e-6; reduce dt");
  }
  next = (0.5 * (next + next.adjoint())).eval();
  next /= next.trace().real();
  return next;
}

/// Evolves for `duration` with ceil(duration/dt) equal substeps of size <= dt.
inline ComplexMatrix evolve_for(ComplexMatrix rho, const LindbladModel& model, double duration, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::domain, "time step must be > 0");
  if (duration <= 0.0) return rho;
  const auto steps = static_cast<long>(std::ceil(duration / dt - 1e-9));
  const double h = duration / static_cast<double>(steps);
  for (long i = 0; i < steps; ++i) rho = lindblad_step(rho, model, h);
  return rho;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
};

/// Fixed-step RK4 trajectory from t=0 to t_end, one sample per step (plus t=0).
inline Trajectory integrate(const DensityMatrix& rho0, const LindbladModel& model, double t_end, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::domain, "time step must be > 0");
  if (!(t_end >= 0.0)) throw Error(ErrorCode::domain, "end time must be >= 0");
  if (model.dim() != rho0.dim()) throw Error(ErrorCode::invalid_dimension, "model and state dimensions differ");
  Trajectory out;
  out.times.push_back(0.0);
  out.states.push_back(rho0);
  if (t_end == 0.0) return out;
  const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  const double h = t_end / static_cast<double>(steps);
  ComplexMatrix rho = rho0.matrix();
  for (long i = 1; i <= steps; ++i) {
    rho = lindblad_step(rho, model, h);
    out.times.push_back(h * static_cast<double>(i));
    out.states.emplace_back(rho, rho0.mode());
  }
  return out;
}

/// Closed-form Kraus family t -> channel(t).
struct KrausEvolution {
  std::function<KrausChannel(double)> channel_at;
};

struct LindbladEvolution {
  LindbladModel model;
  double dt = 1e-3;
};

using Evolution = std::variant<KrausEvolution, LindbladEvolution>;

/// State at time t starting from rho0 at t = 0.
inline DensityMatrix state_at(const DensityMatrix& rho0, const Evolution& evo, double t) {
  if (const auto* k = std::get_if<KrausEvolution>(&evo)) return apply_channel(rho0, k->channel_at(t));
  const auto& l = std::get<LindbladEvolution>(evo);
  return DensityMatrix(evolve_for(rho0.matrix(), l.model, t, l.dt), rho0.mode());
}

inline void require_ascending(std::span<const double> grid) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::domain, "time grid must be strictly increasing");
}

/// States on every grid point; Lindblad runs are integrated incrementally.
inline std::vector<DensityMatrix> states_on_grid(const DensityMatrix& rho0, const Evolution& evo,
                                                 std::span<const double> grid) {
  require_ascending(grid);
  std::vector<DensityMatrix> out;
  out.reserve(grid.size());
  if (const auto* k = std::get_if<KrausEvolution>(&evo)) {
    for (double t : grid) out.push_back(apply_channel(rho0, k->channel_at(t)));
    return out;
  }
  const auto& l = std::get<LindbladEvolution>(evo);
  ComplexMatrix rho = rho0.matrix();
  double now = 0.0;
  for (double t : grid) {
    if (t < 0.0) throw Error(ErrorCode::domain, "time grid must be >= 0");
    rho = evolve_for(std::move(rho), l.model, t - now, l.dt);
    now = t;
    out.emplace_back(rho, rho0.mode());
  }
  return out;
}

/// Samples of named measures on an ascending axis (time, or a mixing parameter).
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> times, std::string axis = "t")
      : axis_(std::move(axis)), times_(std::move(times)) {
    require_ascending(times_);
  }

  const std::string& axis() const noexcept { return axis_; }
  const std::vector<double>& times() const noexcept { return times_; }
  std::size_t size() const noexcept { return times_.size(); }

  void add(std::string name, std::vector<double> values) {
    if (values.size() != times_.size()) throw Error(ErrorCode::invalid_dimension, "series length mismatch");
    for (auto& c : columns_)
      if (c.first == name) {
        c.second = std::move(values);
        return;
      }
    columns_.emplace_back(std::move(name), std::move(values));
  }

  bool has(const std::string& name) const {
    return std::any_of(columns_.begin(), columns_.end(), [&](const auto& c) { return c.first == name; });
  }

  const std::vector<double>& values(const std::string& name) const {
    for (const auto& c : columns_)
      if (c.first == name) return c.second;
    throw Error(ErrorCode::unknown_measure, "series has no measure '" + name + "'");
  }

  const std::vector<std::pair<std::string, std::vector<double>>>& columns() const noexcept { return columns_; }

 private:
  std::string axis_;
  std::vector<double> times_;
  std::vector<std::pair<std::string, std::vector<double>>> columns_;
};

inline std::vector<double> uniform_grid(double start, double stop, int points) {
  if (points < 2) throw Error(ErrorCode::domain, "grid needs at least 2 points");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = start + (stop - start) * i / (points - 1);
  return g;
}

/// Evaluates every measure on the evolved state at each grid time.
inline TimeSeries sweep(const DensityMatrix& rho0, const Bipartition& bip, const Evolution& evo,
                        std::span<const Measure> measures, std::span<const double> grid) {
  TimeSeries ts(std::vector<double>(grid.begin(), grid.end()));
  const auto states = states_on_grid(rho0, evo, grid);
  for (const auto& m : measures) {
    std::vector<double> v;
    v.reserve(states.size());
    for (const auto& s : states) v.push_back(m(s, bip));
    ts.add(m.name, std::move(v));
  }
  return ts;
}

/// Smallest grid time after which the measure stays below eps.
inline std::optional<double> esd_time(const TimeSeries& ts, const std::string& measure, double eps = 1e-9) {
  const auto& v = ts.values(measure);
  std::optional<std::size_t> first;
  for (std::size_t i = v.size(); i-- > 0;) {
    if (v[i] < eps)
      first = i;
    else
      break;
  }
  if (!first) return std::nullopt;
  return ts.times()[*first];
}

/// esd_time refined by bisection between the last grid point above eps and the
/// grid ESD time, to within (grid step)/100. `value_at(t)` re-evaluates the measure.
inline std::optional<double> esd_time(const TimeSeries& ts, const std::string& measure, double eps,
                                      const std::function<double(double)>& value_at) {
  const auto coarse = esd_time(ts, measure, eps);
  if (!coarse) return std::nullopt;
  const auto& times = ts.times();
  const auto idx = static_cast<std::size_t>(std::find(times.begin(), times.end(), *coarse) - times.begin());
  if (idx == 0) return coarse;
  double lo = times[idx - 1];
  double hi = times[idx];
  const double target = (hi - lo) / 100.0;
  while (hi - lo > target) {
    const double mid = 0.5 * (lo + hi);
    if (value_at(mid) < eps)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

/// Largest axis value at which the measure is below eps (e.g. the last mixing
/// parameter that still reads zero).
inline std::optional<double> last_zero(const TimeSeries& ts, const std::string& measure, double eps = 1e-9) {
  const auto& v = ts.values(measure);
  for (std::size_t i = v.size(); i-- > 0;)
    if (v[i] < eps) return ts.times()[i];
  return std::nullopt;
}

/// Mean over the first window of `window` consecutive samples whose
/// least-squares slope has magnitude below slope_tol (per axis unit).
inline std::optional<double> plateau_value(const TimeSeries& ts, const std::string& measure, int window,
                                           double slope_tol) {
  if (window < 3) throw Error(ErrorCode::domain, "plateau window must be >= 3");
  const auto& v = ts.values(measure);
  const auto& t = ts.times();
  const auto w = static_cast<std::size_t>(window);
  if (v.size() < w) return std::nullopt;
  for (std::size_t start = 0; start + w <= v.size(); ++start) {
    double mt = 0.0, mv = 0.0;
    for (std::size_t i = start; i < start + w; ++i) {
      mt += t[i];
      mv += v[i];
    }
    mt /= static_cast<double>(w);
    mv /= static_cast<double>(w);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = start; i < start + w; ++i) {
      sxy += (t[i] - mt) * (v[i] - mv);
      sxx += (t[i] - mt) * (t[i] - mt);
    }
    if (std::abs(sxy / sxx) < slope_tol) return mv;
  }
  return std::nullopt;
}

}  // namespace mbn
