#pragma once

#include "mbn/io.hpp"
#include "mbn/mbn.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mbn::cli {

enum ExitCode : int { ok = 0, domain_error = 1, input_error = 2 };

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse:
    case ErrorCode::invalid_state:
    case ErrorCode::not_hermitian:
    case ErrorCode::invalid_bipartition:
      return input_error;
    default:
      return domain_error;
  }
}

inline nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

/// Opens `path` for writing, or returns the fallback stream when path is empty.
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error(ErrorCode::parse, "cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

// ---------------------------------------------------------------- measure

struct MeasureArgs {
  std::string state_file;
  std::optional<int> m;
  std::optional<double> a;
  std::optional<double> b;
  bool quasi = false;
};

inline int cmd_measure(const MeasureArgs& args, std::ostream& out) {
  std::ifstream in(args.state_file);
  if (!in) throw Error(ErrorCode::parse, "cannot open state file '" + args.state_file + "'");
  const auto sf = io::read_state(in, args.quasi ? StateMode::quasi : StateMode::strict);
  IbmParams p = IbmParams::defaults(sf.bip);
  if (args.m) p.m = *args.m;
  if (args.a) p.a = *args.a;
  if (args.b) p.b = *args.b;
  p.validate();
  const auto ibm = evaluate_ibm(sf.rho, sf.bip, p);
  nlohmann::json report = {
      {"bipartition", {sf.bip.dim_a(), sf.bip.dim_b()}},
      {"params", {{"m", p.m}, {"a", p.a}, {"b", p.b}}},
      {"mbn", mbn(sf.rho, sf.bip, p)},
      {"negativity", negativity(sf.rho, sf.bip)},
      {"cm", cm_value(sf.rho, sf.bip)},
      {"gcm", gcm_value(sf.rho, sf.bip)},
      {"threshold", ibm.threshold},
      {"trace_norm", ibm.trace_norm},
      {"violation", ibm.violation},
  };
  out << report.dump(2) << '\n';
  return ok;
}

// ---------------------------------------------------------------- catalog

struct CatalogArgs {
  std::string label;
  CatalogOptions options;
  std::string out;
};

inline int cmd_catalog_list(std::ostream& out) {
  for (const auto& l : catalog_labels()) out << l << '\n';
  return ok;
}

inline int cmd_catalog_export(const CatalogArgs& args, std::ostream& out) {
  const auto st = make_catalog_state(args.label, args.options);
  OutputTarget target(args.out, out);
  io::write_state(target.get(), st.rho, st.bip);
  return ok;
}

// ---------------------------------------------------------------- examples

struct Example1Args {
  double alpha = 4.5;
  double p_step = 0.005;
  double eps = 1e-9;
  std::string out;
};

/// Mixing sweep rho(p, alpha) = p rho(alpha) + (1-p) 1/9 on an ascending p grid.
inline TimeSeries example1_series(double alpha, double p_step) {
  if (!(p_step > 0.0 && p_step <= 1.0)) throw Error(ErrorCode::domain, "p step must lie in (0, 1]");
  const auto base = horodecki_qutrit(alpha);
  const int points = static_cast<int>(std::lround(1.0 / p_step)) + 1;
  const auto grid = uniform_grid(0.0, 1.0, points);
  TimeSeries ts(grid, "p");
  std::vector<double> m, n;
  for (double p : grid) {
    const auto st = mix_with_identity(base, p);
    m.push_back(mbn(st.rho, st.bip));
    n.push_back(negativity(st.rho, st.bip));
  }
  ts.add("mbn", std::move(m));
  ts.add("negativity", std::move(n));
  return ts;
}

inline int cmd_example1(const Example1Args& args, std::ostream& out, std::ostream& err) {
  const auto ts = example1_series(args.alpha, args.p_step);
  OutputTarget target(args.out, out);
  io::write_csv(target.get(), ts);
  nlohmann::json summary = {{"alpha", args.alpha},
                            {"p_star",
                             {{"mbn", optional_json(last_zero(ts, "mbn", args.eps))},
                              {"negativity", optional_json(last_zero(ts, "negativity", args.eps))}}}};
  err << summary.dump() << '\n';
  return ok;
}

struct Example2Args {
  double t2 = 2.0;
  double t_end = 0.3;
  int points = 601;
  double eps = 1e-9;
  std::string out;
};

struct Example2Result {
  TimeSeries series;
  std::optional<double> esd_mbn;
  std::optional<double> esd_negativity;
};

/// Four-qubit PPT state under local dephasing.
inline Example2Result run_example2(double t2, double t_end, int points, double eps) {
  if (!(t2 > 0.0)) throw Error(ErrorCode::domain, "T2 must be > 0");
  if (!(t_end > 0.0)) throw Error(ErrorCode::domain, "end time must be > 0");
  const auto st = toth_4qubit();
  const Evolution evo = KrausEvolution{[t2](double t) { return dephasing_channel(t, t2, 4); }};
  const std::vector<Measure> measures{Measure::parse("mbn"), Measure::parse("negativity")};
  const auto grid = uniform_grid(0.0, t_end, points);
  auto ts = sweep(st.rho, st.bip, evo, measures, grid);
  auto value_at = [&](const Measure& m) {
    return [&, m](double t) { return m(state_at(st.rho, evo, t), st.bip); };
  };
  auto esd_m = esd_time(ts, "mbn", eps, value_at(measures[0]));
  auto esd_n = esd_time(ts, "negativity", eps, value_at(measures[1]));
  return {std::move(ts), esd_m, esd_n};
}

inline int cmd_example2(const Example2Args& args, std::ostream& out, std::ostream& err) {
  const auto r = run_example2(args.t2, args.t_end, args.points, args.eps);
  OutputTarget target(args.out, out);
  io::write_csv(target.get(), r.series);
  nlohmann::json summary = {
      {"t2", args.t2},
      {"esd_time", {{"mbn", optional_json(r.esd_mbn)}, {"negativity", optional_json(r.esd_negativity)}}}};
  err << summary.dump() << '\n';
  return ok;
}

struct Example3Args {
  double gamma = 1.0;
  std::string form = "both";
  double t_end = 3.0;
  int points = 3001;
  double dt = 1e-3;
  int window = 200;
  double slope_tol = 2.5e-3;
  std::string out;
};

/// Plateau window and slope tolerance (per second) used for the freezing report.
inline constexpr int default_plateau_window = 200;
inline constexpr double default_plateau_slope_tol = 2.5e-3;

struct Example3Run {
  DissipatorForm form;
  TimeSeries series;
  std::optional<double> plateau_mbn;
  std::optional<double> negativity_onset;  // first grid time with negativity > 1e-10
};

inline std::optional<double> first_above(const TimeSeries& ts, const std::string& measure, double level) {
  const auto& v = ts.values(measure);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] > level) return ts.times()[i];
  return std::nullopt;
}

/// Bloch-diagonal bound entangled state under correlated amplitude damping.
inline Example3Run run_example3(double gamma, DissipatorForm form, double t_end, int points, double dt,
                                int window = default_plateau_window,
                                double slope_tol = default_plateau_slope_tol) {
  if (!(gamma >= 0.0)) throw Error(ErrorCode::domain, "gamma must be >= 0");
  if (!(t_end > 0.0)) throw Error(ErrorCode::domain, "end time must be > 0");
  const auto st = bloch_diagonal_bd();
  const Evolution evo = LindbladEvolution{correlated_amplitude_damping(4, gamma, form), dt};
  const std::vector<Measure> measures{Measure::parse("mbn"), Measure::parse("negativity")};
  const auto grid = uniform_grid(0.0, t_end, points);
  auto ts = sweep(st.rho, st.bip, evo, measures, grid);
  auto plateau = plateau_value(ts, "mbn", window, slope_tol);
  auto onset = first_above(ts, "negativity", 1e-10);
  return {form, std::move(ts), plateau, onset};
}

inline const char* form_name(DissipatorForm f) { return f == DissipatorForm::standard ? "standard" : "literal"; }

inline int cmd_example3(const Example3Args& args, std::ostream& out, std::ostream& err) {
  std::vector<DissipatorForm> forms;
  if (args.form == "standard" || args.form == "both") forms.push_back(DissipatorForm::standard);
  if (args.form == "literal" || args.form == "both") forms.push_back(DissipatorForm::literal);
  if (forms.empty()) throw Error(ErrorCode::domain, "form must be standard, literal or both");

  std::vector<Example3Run> runs;
  for (auto f : forms) runs.push_back(run_example3(args.gamma, f, args.t_end, args.points, args.dt, args.window, args.slope_tol));

  TimeSeries merged(runs.front().series.times());
  nlohmann::json summary = {{"gamma", args.gamma}, {"forms", nlohmann::json::object()}};
  for (const auto& r : runs) {
    const std::string suffix = runs.size() > 1 ? std::string("_") + form_name(r.form) : "";
    for (const auto& [name, values] : r.series.columns()) merged.add(name + suffix, values);
    summary["forms"][form_name(r.form)] = {{"plateau_mbn", optional_json(r.plateau_mbn)},
                                           {"negativity_onset", optional_json(r.negativity_onset)}};
  }
  OutputTarget target(args.out, out);
  io::write_csv(target.get(), merged);
  err << summary.dump() << '\n';
  return ok;
}

// ---------------------------------------------------------------- tomography

struct TomoArgs {
  int k = 2;
  std::uint64_t n = 100;
  int trials = 1000;
  std::uint64_t seed = 7;
  int bins = 20;
  std::string basis = "pauli";
  int threads = 1;
  std::string out_dir = ".";
};

inline int cmd_tomo(const TomoArgs& args, std::ostream& out) {
  TomoConfig cfg;
  cfg.shots = args.n;
  cfg.trials = args.trials;
  cfg.seed = args.seed;
  cfg.threads = args.threads;
  if (args.basis == "pauli")
    cfg.basis = ObservableBasis::pauli_strings;
  else if (args.basis == "gell-mann")
    cfg.basis = ObservableBasis::gell_mann;
  else
    throw Error(ErrorCode::domain, "basis must be 'pauli' or 'gell-mann'");

  const auto result = error_experiment(me_state(args.k), cfg);

  namespace fs = std::filesystem;
  fs::create_directories(args.out_dir);
  const std::string stem = "tomo_k" + std::to_string(args.k) + "_n" + std::to_string(args.n);
  nlohmann::json files = nlohmann::json::array();
  {
    const auto path = (fs::path(args.out_dir) / (stem + ".csv")).string();
    OutputTarget t(path, out);
    io::write_csv(t.get(), result);
    files.push_back(path);
  }
  nlohmann::json medians = nlohmann::json::object();
  for (const auto& [name, deltas] : result.deltas) {
    medians[name] = median(deltas);
    const auto path = (fs::path(args.out_dir) / (stem + "_hist_" + name + ".csv")).string();
    OutputTarget t(path, out);
    const auto bins = histogram(deltas, args.bins);
    io::write_csv(t.get(), std::span<const HistogramBin>(bins));
    files.push_back(path);
  }
  nlohmann::json summary = {{"k", args.k},
                            {"n", args.n},
                            {"trials", args.trials},
                            {"seed", args.seed},
                            {"median_delta", medians},
                            {"negative_estimates", result.negative_estimates},
                            {"files", files}};
  out << summary.dump(2) << '\n';
  return ok;
}

// ---------------------------------------------------------------- entry point

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Modified Bloch norm entanglement toolkit"};
  app.require_subcommand(1);

  MeasureArgs measure_args;
  auto* measure = app.add_subcommand("measure", "Evaluate MBN, negativity and CM/GCM violations of a state file (JSON report)");
  measure->add_option("state", measure_args.state_file, "State JSON: {dim, bipartition:[N,M], matrix:[[[re,im],...],...]}")
      ->required();
  measure->add_option("--m", measure_args.m, "Number of prepended rows/columns (default 4)");
  measure->add_option("--a", measure_args.a, "Scale a (default sqrt(2/(M(M-1))))");
  measure->add_option("--b", measure_args.b, "Scale b (default sqrt(2/(N(N-1))))");
  measure->add_flag("--quasi", measure_args.quasi, "Accept Hermitian unit-trace matrices that are not PSD");

  CatalogArgs catalog_args;
  auto* catalog = app.add_subcommand("catalog", "List or export built-in states");
  catalog->require_subcommand(1);
  auto* catalog_list = catalog->add_subcommand("list", "Print catalog labels");
  auto* catalog_export = catalog->add_subcommand("export", "Write a catalog state as a state JSON file");
  catalog_export->add_option("label", catalog_args.label, "Catalog label")->required();
  catalog_export->add_option("--alpha", catalog_args.options.alpha, "horodecki_qutrit parameter in [2,5]")
      ->capture_default_str();
  std::vector<int> dims;
  catalog_export->add_option("--dims", dims, "N M for max_entangled / maximally_mixed")->expected(2);
  catalog_export->add_option("--out", catalog_args.out, "Output path (default stdout)");

  Example1Args e1;
  auto* example1 = app.add_subcommand("example1", "Two-qutrit family mixed with white noise: CSV p,mbn,negativity");
  example1->add_option("--alpha", e1.alpha, "State parameter in [2,5]")->capture_default_str();
  example1->add_option("--p-step", e1.p_step, "Grid step in p")->capture_default_str();
  example1->add_option("--eps", e1.eps, "Zero threshold for p*")->capture_default_str();
  example1->add_option("--out", e1.out, "CSV path (default stdout)");

  Example2Args e2;
  auto* example2 = app.add_subcommand("example2", "Four-qubit PPT state under local dephasing: CSV t,mbn,negativity");
  example2->add_option("--t2", e2.t2, "Dephasing time T2 [s]")->capture_default_str();
  example2->add_option("--t-end", e2.t_end, "Final time [s]")->capture_default_str();
  example2->add_option("--points", e2.points, "Grid points")->capture_default_str();
  example2->add_option("--eps", e2.eps, "ESD threshold")->capture_default_str();
  example2->add_option("--out", e2.out, "CSV path (default stdout)");

  Example3Args e3;
  auto* example3 = app.add_subcommand("example3", "Bloch-diagonal state under correlated amplitude damping");
  example3->add_option("--gamma", e3.gamma, "Damping rate [1/s]")->capture_default_str();
  example3->add_option("--form", e3.form, "Dissipator: standard | literal | both")->capture_default_str();
  example3->add_option("--t-end", e3.t_end, "Final time [s]")->capture_default_str();
  example3->add_option("--points", e3.points, "Grid points")->capture_default_str();
  example3->add_option("--dt", e3.dt, "RK4 step [s]")->capture_default_str();
  example3->add_option("--window", e3.window, "Plateau window (samples)")->capture_default_str();
  example3->add_option("--slope-tol", e3.slope_tol, "Plateau slope tolerance [1/s]")->capture_default_str();
  example3->add_option("--out", e3.out, "CSV path (default stdout)");

  TomoArgs ta;
  auto* tomo = app.add_subcommand(
      "tomo", "Finite-copies linear-inversion error study on k-qubit ME states. n is the number of shots per "
              "observable (each of the 4^k-1 Pauli strings is measured n times).");
  tomo->add_option("--k", ta.k, "Qubits: 2, 3 or 4")->capture_default_str();
  tomo->add_option("--n", ta.n, "Shots per observable")->capture_default_str();
  tomo->add_option("--trials", ta.trials, "LU-equivalent states")->capture_default_str();
  tomo->add_option("--seed", ta.seed, "PRNG seed")->capture_default_str();
  tomo->add_option("--bins", ta.bins, "Histogram bins")->capture_default_str();
  tomo->add_option("--basis", ta.basis, "Observable basis: pauli | gell-mann")->capture_default_str();
  tomo->add_option("--threads", ta.threads, "Worker threads (results do not depend on this)")->capture_default_str();
  tomo->add_option("--out-dir", ta.out_dir, "Directory for CSV files")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return input_error;
  }

  try {
    if (*measure) return cmd_measure(measure_args, out);
    if (*catalog_list) return cmd_catalog_list(out);
    if (*catalog_export) {
      if (dims.size() == 2) {
        catalog_args.options.dim_a = dims[0];
        catalog_args.options.dim_b = dims[1];
      }
      return cmd_catalog_export(catalog_args, out);
    }
    if (*example1) return cmd_example1(e1, out, err);
    if (*example2) return cmd_example2(e2, out, err);
    if (*example3) return cmd_example3(e3, out, err);
    if (*tomo) return cmd_tomo(ta, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return domain_error;
  }
  return input_error;
}

}  // namespace mbn::cli
