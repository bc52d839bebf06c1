#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polaron/entanglement.hpp"
#include "polaron/sweep.hpp"

namespace {

struct CliState {
  int verify_failures = 0;
};

std::vector<std::pair<int, int>> parse_schedule(const std::string& text) {
  std::vector<std::pair<int, int>> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw polaron::ConfigError("schedule entries look like N:cap, got '" + item + "'");
    }
    try {
      out.emplace_back(std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw polaron::ConfigError("cannot parse schedule entry '" + item + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw polaron::ConfigError("schedule is empty");
  return out;
}

void print_spectrum_block(const polaron::EntanglementSpectrum& spec) {
  std::printf("  %-6s %-22s %s\n", "level", "xi", "weight");
  for (std::size_t i = 0; i < spec.levels.size(); ++i) {
    std::printf("  %-6zu %-22s %s\n", i + 1, polaron::format_double(spec.levels[i]).c_str(),
                polaron::format_double(spec.weights[i]).c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ring polaron with bond and site phonon couplings: sector ground states,"
               " entanglement spectra, coupling sweeps"};
  app.require_subcommand(1);
  CliState state;

  // ---------------- sweep ----------------
  auto* sweep = app.add_subcommand("sweep", "walk a lambda_P grid, write sweep.csv + metadata");
  std::string cfg_path;
  std::string out_dir;
  double gbm = 0.0, lam_start = 0.0, lam_stop = 0.0, lam_step = 0.0, tol = 0.0;
  std::vector<double> ratios;
  int sites = 0, cap = 0, threads = 0, max_iter = 0;
  std::uint64_t seed = 0;
  bool figures = false, strict = false, refine = false;

  sweep->add_option("--config", cfg_path, "JSON config file (flags override it)");
  auto* o_gbm = sweep->add_option("--g-bm", gbm, "bare breathing-mode coupling");
  auto* o_ratios = sweep->add_option("--omega", ratios, "adiabaticity ratio omega/t (repeatable)");
  auto* o_start = sweep->add_option("--lambda-start", lam_start, "grid start");
  auto* o_stop = sweep->add_option("--lambda-stop", lam_stop, "grid stop");
  auto* o_step = sweep->add_option("--lambda-step", lam_step, "grid step");
  auto* o_sites = sweep->add_option("--sites", sites, "ring length N");
  auto* o_cap = sweep->add_option("--phonon-cap", cap, "total phonon cap");
  auto* o_thr = sweep->add_option("--threads", threads, "worker pool size (0 = hardware)");
  auto* o_tol = sweep->add_option("--tol", tol, "solver residual target");
  auto* o_mi = sweep->add_option("--max-iter", max_iter, "solver iteration cap");
  auto* o_seed = sweep->add_option("--seed", seed, "solver start-vector seed");
  auto* o_out = sweep->add_option("--out-dir", out_dir, "output directory");
  sweep->add_flag("--figures", figures, "also write the per-ratio figure file");
  sweep->add_flag("--strict", strict, "abort on solver failure instead of flagging the row");
  sweep->add_flag("--refine", refine, "bisect each detected transition to width 1e-3");

  sweep->callback([&]() {
    polaron::SweepConfig cfg;
    if (!cfg_path.empty()) cfg = polaron::SweepConfig::from_json_file(cfg_path);
    if (*o_gbm) cfg.g_bm = gbm;
    if (*o_ratios) cfg.omega_ratios = ratios;
    if (*o_start) cfg.lambda_p_start = lam_start;
    if (*o_stop) cfg.lambda_p_stop = lam_stop;
    if (*o_step) cfg.lambda_p_step = lam_step;
    if (*o_sites) cfg.n_sites = sites;
    if (*o_cap) cfg.n_ph_max = cap;
    if (*o_thr) cfg.threads = threads;
    if (*o_tol) cfg.solver.tol = tol;
    if (*o_mi) cfg.solver.max_iter = max_iter;
    if (*o_seed) cfg.solver.seed = seed;
    if (*o_out) cfg.output_dir = out_dir;
    if (figures) cfg.emit_figures = true;
    if (strict) cfg.strict = true;
    if (refine) cfg.refine_transitions = true;
    cfg.validate();

    const auto result = polaron::run_sweep(cfg);
    const auto files = polaron::emit(result, cfg.output_dir, cfg.emit_figures);
    std::printf("%zu rows in %.1f s -> %s\n", result.rows.size(), result.wall_seconds,
                files.csv.string().c_str());
    for (const auto& tr : result.transitions) {
      std::printf("K_gs/pi %s -> %s between lambda_P %s and %s (omega ratio %s)%s%s\n",
                  polaron::format_double(tr.k_from_over_pi).c_str(),
                  polaron::format_double(tr.k_to_over_pi).c_str(),
                  polaron::format_double(tr.lambda_lo).c_str(),
                  polaron::format_double(tr.lambda_hi).c_str(),
                  polaron::format_double(tr.omega_ratio).c_str(),
                  tr.refined ? ", refined " : "",
                  tr.refined ? polaron::format_double(*tr.refined).c_str() : "");
    }
  });

  // ---------------- converge ----------------
  auto* conv = app.add_subcommand("converge", "certify ground-energy convergence along a schedule");
  double c_lambda = 2.0, c_gbm = 0.25, c_omega = 1.0, c_threshold = 1e-4, c_tol = 0.0;
  int c_mi = 0;
  std::uint64_t c_seed = 0;
  std::string schedule_text = "8:4,8:5,8:6,8:7,8:8,8:9";
  conv->add_option("--lambda-p", c_lambda, "bond-coupling strength lambda_P");
  conv->add_option("--g-bm", c_gbm, "bare breathing-mode coupling");
  conv->add_option("--omega", c_omega, "adiabaticity ratio omega/t");
  conv->add_option("--schedule", schedule_text, "comma list of N:cap steps");
  conv->add_option("--threshold", c_threshold, "relative-change certification threshold");
  auto* co_tol = conv->add_option("--tol", c_tol, "solver residual target");
  auto* co_mi = conv->add_option("--max-iter", c_mi, "solver iteration cap");
  auto* co_seed = conv->add_option("--seed", c_seed, "solver start-vector seed");

  conv->callback([&]() {
    polaron::ModelParams base;
    base.omega_ph = c_omega;
    base.g_bm = c_gbm;
    base.g_p = polaron::g_p_from_lambda(c_lambda, c_omega);
    polaron::SolverSettings solver;
    if (*co_tol) solver.tol = c_tol;
    if (*co_mi) solver.max_iter = c_mi;
    if (*co_seed) solver.seed = c_seed;

    const auto report = polaron::converge(base, parse_schedule(schedule_text), solver, c_threshold);
    std::printf("%-4s %-5s %-10s %-24s %s\n", "N", "cap", "dim", "E_gs", "rel_change");
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
      const auto& e = report.entries[i];
      std::printf("%-4d %-5d %-10lld %-24s %s%s\n", e.n_sites, e.n_ph_max,
                  static_cast<long long>(e.dim), polaron::format_double(e.e_gs).c_str(),
                  polaron::format_double(e.rel_change).c_str(),
                  report.certified_index && *report.certified_index == i ? "  <- certified" : "");
    }
    if (!report.certified_index) {
      std::printf("NOT CERTIFIED: no step changed by less than %s\n",
                  polaron::format_double(report.threshold).c_str());
    }
  });

  // ---------------- spectrum ----------------
  auto* spec_cmd = app.add_subcommand("spectrum", "solve one coupling point and print the levels");
  double s_lambda = 0.125, s_gp = 0.0, s_gbm = 0.25, s_omega = 1.0, s_tol = 0.0;
  int s_sites = 8, s_cap = 9, s_mi = 0;
  std::uint64_t s_seed = 0;
  std::string dump_path;
  auto* so_lambda = spec_cmd->add_option("--lambda-p", s_lambda, "bond coupling as lambda_P");
  auto* so_gp = spec_cmd->add_option("--g-p", s_gp, "bond coupling as bare g_P");
  so_lambda->excludes(so_gp);
  so_gp->excludes(so_lambda);
  spec_cmd->add_option("--g-bm", s_gbm, "bare breathing-mode coupling");
  spec_cmd->add_option("--omega", s_omega, "adiabaticity ratio omega/t");
  spec_cmd->add_option("--sites", s_sites, "ring length N");
  spec_cmd->add_option("--phonon-cap", s_cap, "total phonon cap");
  auto* so_tol = spec_cmd->add_option("--tol", s_tol, "solver residual target");
  auto* so_mi = spec_cmd->add_option("--max-iter", s_mi, "solver iteration cap");
  auto* so_seed = spec_cmd->add_option("--seed", s_seed, "solver start-vector seed");
  spec_cmd->add_option("--dump-sector", dump_path, "write the ground sector matrix (raw binary)");

  spec_cmd->callback([&]() {
    polaron::ModelParams p;
    p.n_sites = s_sites;
    p.n_ph_max = s_cap;
    p.omega_ph = s_omega;
    p.g_bm = s_gbm;
    p.g_p = *so_gp ? s_gp : polaron::g_p_from_lambda(s_lambda, s_omega);
    p.validate();
    polaron::SolverSettings solver;
    if (*so_tol) solver.tol = s_tol;
    if (*so_mi) solver.max_iter = s_mi;
    if (*so_seed) solver.seed = s_seed;

    const polaron::BasisIndexMap basis(p.n_sites, p.n_ph_max);
    const auto gs = polaron::ground_state_over_K(p, basis, solver);
    const auto spec = polaron::spectrum(polaron::reduced_density(gs, basis));

    std::printf("lambda_P %s   lambda_BM %s   omega/t %s\n",
                polaron::format_double(p.lambda_p()).c_str(),
                polaron::format_double(p.lambda_bm()).c_str(),
                polaron::format_double(p.omega_ph / p.t_e).c_str());
    std::printf("sector energies (K/pi : E):\n");
    for (const auto& [k, e] : gs.sector_energies) {
      std::printf("  %-8s %s\n", polaron::format_double(2.0 * k.index / k.n_sites).c_str(),
                  polaron::format_double(e).c_str());
    }
    std::printf("K_gs/pi %s   E_gs %s   degenerate %s\n",
                polaron::format_double(2.0 * gs.k_gs.index / gs.k_gs.n_sites).c_str(),
                polaron::format_double(gs.energy).c_str(),
                gs.degenerate_partner ? "yes" : "no");
    std::printf("S_E %s   bare overlap %s\n",
                polaron::format_double(polaron::entropy(spec)).c_str(),
                polaron::format_double(polaron::bare_overlap(gs)).c_str());
    print_spectrum_block(spec);

    if (!dump_path.empty()) {
      const auto h = polaron::SparseSectorHamiltonian::assemble(gs.k_gs, basis, p);
      h.write_binary(dump_path);
      std::printf("ground sector written to %s\n", dump_path.c_str());
    }
  });

  // ---------------- verify ----------------
  auto* verify = app.add_subcommand("verify", "run fast built-in consistency checks");
  verify->callback([&]() {
    auto check = [&](bool ok, const char* what) {
      std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what);
      if (!ok) ++state.verify_failures;
    };

    {
      polaron::ModelParams p;
      p.n_sites = 6;
      p.n_ph_max = 3;
      p.g_p = 0.7;
      p.g_bm = 0.7;
      p.omega_ph = 1.3;
      const polaron::BasisIndexMap basis(6, 3);
      const auto h =
          polaron::SparseSectorHamiltonian::assemble(polaron::Momentum{0, 6}, basis, p);
      Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(h.dim());
      e0[0] = 1.0;
      const double res = (h.apply(e0) - (-2.0) * e0).norm();
      check(res <= 1e-12, "equal couplings leave the zero-momentum bare state alone");
    }
    {
      polaron::ModelParams p;
      p.n_sites = 4;
      p.n_ph_max = 3;
      p.g_p = 0.65;
      p.g_bm = 0.3;
      p.omega_ph = 0.9;
      const polaron::BasisIndexMap basis(4, 3);
      const auto gs = polaron::ground_state_over_K(p, basis, {});
      const auto dense = polaron::dense_oracle(p);
      check(std::abs(gs.energy - dense.eigenvalues[0]) < 1e-8,
            "sector ground energy matches the dense reference");
      const auto via_rho = polaron::spectrum(polaron::reduced_density(gs, basis));
      const auto via_svd = polaron::svd_cross_check(gs, basis);
      bool match = true;
      for (std::size_t i = 0; i < via_rho.levels.size(); ++i) {
        const bool fa = std::isfinite(via_rho.levels[i]);
        const bool fb = std::isfinite(via_svd.levels[i]);
        if (fa != fb || (fa && std::abs(via_rho.levels[i] - via_svd.levels[i]) > 1e-10)) {
          match = false;
        }
      }
      check(match, "both entanglement-spectrum routes agree");
    }
    {
      polaron::ModelParams p;
      p.n_sites = 6;
      p.n_ph_max = 3;
      p.omega_ph = 3.0;
      const polaron::BasisIndexMap basis(6, 3);
      bool ok = true;
      for (const auto& k : polaron::allowed_momenta(6)) {
        const auto h = polaron::SparseSectorHamiltonian::assemble(k, basis, p);
        const auto pair = polaron::lowest_eigenpair(h, {});
        const double expect = std::min(-2.0 * std::cos(k.value()), p.omega_ph - 2.0);
        if (std::abs(pair.value - expect) > 1e-10) ok = false;
      }
      check(ok, "decoupled sectors sit at the exact analytic floor");
    }
    if (state.verify_failures == 0) std::printf("all checks passed\n");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const polaron::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const polaron::SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 2;
  } catch (const polaron::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return state.verify_failures == 0 ? 0 : 1;
}
