#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polaron/eigensolver.hpp"
#include "polaron/model.hpp"

namespace polaron {

inline constexpr std::string_view kCodeVersion = "1.0.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One coupling sweep: lambda_P walks a fixed grid at fixed bare g_BM, once
// per adiabaticity ratio. Unknown JSON keys are rejected, not ignored.
struct SweepConfig {
  double g_bm = 0.25;
  std::vector<double> omega_ratios = {0.5, 1.0, 2.0};
  double lambda_p_start = 0.0;
  double lambda_p_stop = 3.2;
  double lambda_p_step = 0.05;
  int n_sites = 8;
  int n_ph_max = 9;
  double t_e = 1.0;
  SolverSettings solver;
  int threads = 0;  // 0 picks the hardware count
  bool strict = false;
  bool emit_figures = false;
  bool refine_transitions = false;
  std::string output_dir = ".";

  static SweepConfig from_json_file(const std::filesystem::path& path);
  static SweepConfig from_json_text(const std::string& text);

  std::vector<double> lambda_grid() const;
  void validate() const;  // throws ConfigError
};

struct SweepRow {
  double lambda_p = 0.0;
  double g_p = 0.0;
  double g_bm = 0.0;
  double omega_ratio = 0.0;
  double k_gs_over_pi = 0.0;
  bool degenerate = false;
  double e_gs = 0.0;
  double s_e = 0.0;
  std::vector<double> xis;  // N levels, ascending, +inf for vanished weight
  double bare_overlap = 0.0;
  std::string status = "ok";
};

struct TransitionInterval {
  double omega_ratio = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double k_from_over_pi = 0.0;
  double k_to_over_pi = 0.0;
  std::optional<double> refined;  // bisection estimate when requested
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRow> rows;  // ratio-major, lambda ascending inside a ratio
  std::vector<TransitionInterval> transitions;
  double wall_seconds = 0.0;
};

// Grid points are dispatched to a bounded worker pool; row order and content
// are independent of the thread count. A solver failure marks the row
// "solver_failed" unless strict mode is on, which rethrows instead.
SweepResult run_sweep(const SweepConfig& cfg);

// Scan for ground-momentum changes between consecutive clean rows.
std::vector<TransitionInterval> detect_transitions(const std::vector<SweepRow>& rows);

// Narrow one crossing by bisection, re-solving only the two competing
// sectors, until the bracket is no wider than width_target.
double refine_transition(const SweepConfig& cfg, const TransitionInterval& interval,
                         double width_target = 1e-3);

struct ConvergenceEntry {
  int n_sites = 0;
  int n_ph_max = 0;
  std::int64_t dim = 0;
  double e_gs = 0.0;
  double rel_change = 0.0;  // against the previous entry; NaN for the first
};

struct ConvergenceReport {
  std::vector<ConvergenceEntry> entries;
  std::optional<std::size_t> certified_index;  // first entry under threshold
  double threshold = 0.0;
};

// Ground energy along a growing (N, N_ph) schedule at fixed couplings; the
// first step whose relative change drops under the threshold certifies it.
ConvergenceReport converge(const ModelParams& base,
                           const std::vector<std::pair<int, int>>& schedule,
                           const SolverSettings& solver, double threshold = 1e-4);

struct EmittedFiles {
  std::filesystem::path csv;
  std::filesystem::path metadata;
  std::vector<std::filesystem::path> figures;
};

// sweep.csv (deterministic bytes for a given config), sweep_meta.json
// (settings, conventions, timings), and optionally one figure-style file per
// sweep with a column group per omega ratio.
EmittedFiles emit(const SweepResult& result, const std::filesystem::path& out_dir,
                  bool figures);

// %.17g, round-trip exact; infinities and NaNs print as inf/-inf/nan.
std::string format_double(double v);

}  // namespace polaron
