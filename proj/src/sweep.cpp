#include "polaron/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

#include "polaron/entanglement.hpp"
#include "polaron/fock_basis.hpp"
#include "polaron/sector_hamiltonian.hpp"

namespace polaron {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string_view> kKnownKeys = {
    "g_bm",      "omega_ratios", "lambda_p_start", "lambda_p_stop",
    "lambda_p_step", "n_sites",  "n_ph_max",       "t_e",
    "solver",    "threads",      "strict",         "emit_figures",
    "refine_transitions",        "output_dir"};

const std::vector<std::string_view> kKnownSolverKeys = {
    "tol", "max_iter", "full_reorth", "seed", "check_interval"};

bool known(const std::vector<std::string_view>& keys, const std::string& k) {
  return std::find(keys.begin(), keys.end(), k) != keys.end();
}

void compute_row(SweepRow& row, const SweepConfig& cfg, const BasisIndexMap& basis) {
  ModelParams p;
  p.t_e = cfg.t_e;
  p.omega_ph = row.omega_ratio * cfg.t_e;
  p.g_bm = cfg.g_bm;
  p.g_p = g_p_from_lambda(row.lambda_p, p.omega_ph, p.t_e);
  p.n_sites = cfg.n_sites;
  p.n_ph_max = cfg.n_ph_max;
  row.g_p = p.g_p;

  const auto gs = ground_state_over_K(p, basis, cfg.solver);
  row.k_gs_over_pi = 2.0 * gs.k_gs.index / cfg.n_sites;
  row.degenerate = gs.degenerate_partner.has_value();
  row.e_gs = gs.energy;
  const auto spec = spectrum(reduced_density(gs, basis));
  row.s_e = entropy(spec);
  row.xis = spec.levels;
  row.bare_overlap = bare_overlap(gs);
  row.status = "ok";
}

std::string trimmed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

std::vector<double> SweepConfig::lambda_grid() const {
  std::vector<double> out;
  const auto count =
      static_cast<std::size_t>(std::floor((lambda_p_stop - lambda_p_start) / lambda_p_step + 1e-9)) + 1;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(lambda_p_start + static_cast<double>(i) * lambda_p_step);
  }
  return out;
}

void SweepConfig::validate() const {
  if (!(g_bm >= 0.0) || !std::isfinite(g_bm)) throw ConfigError("g_bm must be >= 0");
  if (omega_ratios.empty()) throw ConfigError("omega_ratios must not be empty");
  for (double r : omega_ratios) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("omega ratios must be positive");
  }
  if (!(lambda_p_start >= 0.0)) throw ConfigError("lambda_p_start must be >= 0");
  if (!(lambda_p_stop >= lambda_p_start)) throw ConfigError("lambda_p_stop must be >= start");
  if (!(lambda_p_step > 0.0)) throw ConfigError("lambda_p_step must be > 0");
  if (n_sites < 2) throw ConfigError("n_sites must be at least 2");
  if (n_ph_max < 0) throw ConfigError("n_ph_max must be >= 0");
  if (!(t_e > 0.0)) throw ConfigError("t_e must be > 0");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (!(solver.tol > 0.0)) throw ConfigError("solver.tol must be > 0");
  if (solver.max_iter < 1) throw ConfigError("solver.max_iter must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

SweepConfig SweepConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known(kKnownKeys, key)) throw ConfigError("unknown config key: " + key);
  }

  SweepConfig cfg;
  try {
    if (j.contains("g_bm")) cfg.g_bm = j.at("g_bm").get<double>();
    if (j.contains("omega_ratios")) cfg.omega_ratios = j.at("omega_ratios").get<std::vector<double>>();
    if (j.contains("lambda_p_start")) cfg.lambda_p_start = j.at("lambda_p_start").get<double>();
    if (j.contains("lambda_p_stop")) cfg.lambda_p_stop = j.at("lambda_p_stop").get<double>();
    if (j.contains("lambda_p_step")) cfg.lambda_p_step = j.at("lambda_p_step").get<double>();
    if (j.contains("n_sites")) cfg.n_sites = j.at("n_sites").get<int>();
    if (j.contains("n_ph_max")) cfg.n_ph_max = j.at("n_ph_max").get<int>();
    if (j.contains("t_e")) cfg.t_e = j.at("t_e").get<double>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("strict")) cfg.strict = j.at("strict").get<bool>();
    if (j.contains("emit_figures")) cfg.emit_figures = j.at("emit_figures").get<bool>();
    if (j.contains("refine_transitions")) {
      cfg.refine_transitions = j.at("refine_transitions").get<bool>();
    }
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      if (!s.is_object()) throw ConfigError("solver must be a JSON object");
      for (const auto& [key, value] : s.items()) {
        (void)value;
        if (!known(kKnownSolverKeys, key)) throw ConfigError("unknown solver key: " + key);
      }
      if (s.contains("tol")) cfg.solver.tol = s.at("tol").get<double>();
      if (s.contains("max_iter")) cfg.solver.max_iter = s.at("max_iter").get<int>();
      if (s.contains("full_reorth")) cfg.solver.full_reorth = s.at("full_reorth").get<bool>();
      if (s.contains("seed")) cfg.solver.seed = s.at("seed").get<std::uint64_t>();
      if (s.contains("check_interval")) {
        cfg.solver.check_interval = s.at("check_interval").get<int>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field has the wrong type: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

SweepConfig SweepConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return from_json_text(text);
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const BasisIndexMap basis(cfg.n_sites, cfg.n_ph_max);
  const auto lambdas = cfg.lambda_grid();
  const std::size_t n_points = cfg.omega_ratios.size() * lambdas.size();

  SweepResult result;
  result.config = cfg;
  result.rows.resize(n_points);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned requested = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : hw;
  const unsigned pool = std::max(1u, std::min<unsigned>(requested, static_cast<unsigned>(n_points)));

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n_points);

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_points) return;
      SweepRow& row = result.rows[i];
      row.lambda_p = lambdas[i % lambdas.size()];
      row.omega_ratio = cfg.omega_ratios[i / lambdas.size()];
      row.g_bm = cfg.g_bm;
      try {
        compute_row(row, cfg, basis);
      } catch (const SolverError&) {
        if (cfg.strict) {
          errors[i] = std::current_exception();
          return;
        }
        row.status = "solver_failed";
        row.k_gs_over_pi = kNan;
        row.degenerate = false;
        row.e_gs = kNan;
        row.s_e = kNan;
        row.xis.assign(static_cast<std::size_t>(cfg.n_sites), kNan);
        row.bare_overlap = kNan;
      } catch (...) {
        errors[i] = std::current_exception();
        return;
      }
    }
  };

  if (pool == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (unsigned i = 0; i < pool; ++i) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  result.transitions = detect_transitions(result.rows);
  if (cfg.refine_transitions) {
    for (auto& tr : result.transitions) tr.refined = refine_transition(cfg, tr);
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

std::vector<TransitionInterval> detect_transitions(const std::vector<SweepRow>& rows) {
  std::vector<TransitionInterval> out;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const auto& a = rows[i];
    const auto& b = rows[i + 1];
    if (a.omega_ratio != b.omega_ratio) continue;  // ratio block boundary
    if (a.status != "ok" || b.status != "ok") continue;
    if (a.k_gs_over_pi == b.k_gs_over_pi) continue;
    out.push_back({a.omega_ratio, a.lambda_p, b.lambda_p, a.k_gs_over_pi, b.k_gs_over_pi, {}});
  }
  return out;
}

double refine_transition(const SweepConfig& cfg, const TransitionInterval& interval,
                         double width_target) {
  cfg.validate();
  if (!(width_target > 0.0)) throw ConfigError("refine: width target must be > 0");
  const BasisIndexMap basis(cfg.n_sites, cfg.n_ph_max);
  auto label = [&](double over_pi) {
    return static_cast<int>(std::lround(over_pi * cfg.n_sites / 2.0));
  };
  const Momentum from{label(interval.k_from_over_pi), cfg.n_sites};
  const Momentum to{label(interval.k_to_over_pi), cfg.n_sites};

  auto sector_energy = [&](Momentum k, double lambda) {
    ModelParams p;
    p.t_e = cfg.t_e;
    p.omega_ph = interval.omega_ratio * cfg.t_e;
    p.g_bm = cfg.g_bm;
    p.g_p = g_p_from_lambda(lambda, p.omega_ph, p.t_e);
    p.n_sites = cfg.n_sites;
    p.n_ph_max = cfg.n_ph_max;
    return lowest_eigenpair(SparseSectorHamiltonian::assemble(k, basis, p), cfg.solver).value;
  };

  double lo = interval.lambda_lo;
  double hi = interval.lambda_hi;
  while (hi - lo > width_target) {
    const double mid = 0.5 * (lo + hi);
    // the incumbent sector still winning means the crossing lies above mid
    if (sector_energy(from, mid) <= sector_energy(to, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ConvergenceReport converge(const ModelParams& base,
                           const std::vector<std::pair<int, int>>& schedule,
                           const SolverSettings& solver, double threshold) {
  if (schedule.empty()) throw ConfigError("converge: empty schedule");
  ConvergenceReport report;
  report.threshold = threshold;
  double prev = kNan;
  for (const auto& [n, cap] : schedule) {
    ModelParams p = base;
    p.n_sites = n;
    p.n_ph_max = cap;
    p.validate();
    const BasisIndexMap basis(n, cap);
    const auto gs = ground_state_over_K(p, basis, solver);
    ConvergenceEntry entry{n, cap, basis.size(), gs.energy, kNan};
    if (!std::isnan(prev)) {
      entry.rel_change = std::abs(gs.energy - prev) /
                         std::max(std::abs(gs.energy), std::numeric_limits<double>::min());
      if (!report.certified_index && entry.rel_change < threshold) {
        report.certified_index = report.entries.size();
      }
    }
    prev = gs.energy;
    report.entries.push_back(entry);
  }
  return report;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

EmittedFiles emit(const SweepResult& result, const std::filesystem::path& out_dir, bool figures) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  const auto& cfg = result.config;
  EmittedFiles files;
  files.csv = out_dir / "sweep.csv";

  {
    std::ofstream os(files.csv);
    if (!os) throw IoError("cannot open " + files.csv.string());
    os << "lambda_P,g_P,g_BM,omega_ratio,K_gs_over_pi,degenerate,E_gs,S_E";
    for (int i = 1; i <= cfg.n_sites; ++i) os << ",xi_" << i;
    os << ",bare_overlap,status\n";
    for (const auto& row : result.rows) {
      os << format_double(row.lambda_p) << ',' << format_double(row.g_p) << ','
         << format_double(row.g_bm) << ',' << format_double(row.omega_ratio) << ','
         << format_double(row.k_gs_over_pi) << ',' << (row.degenerate ? '1' : '0') << ','
         << format_double(row.e_gs) << ',' << format_double(row.s_e);
      for (int i = 0; i < cfg.n_sites; ++i) {
        const auto xi = static_cast<std::size_t>(i) < row.xis.size() ? row.xis[i] : kNan;
        os << ',' << format_double(xi);
      }
      os << ',' << format_double(row.bare_overlap) << ',' << row.status << '\n';
    }
    if (!os) throw IoError("short write to " + files.csv.string());
  }

  files.metadata = out_dir / "sweep_meta.json";
  {
    nlohmann::json j;
    j["code_version"] = std::string(kCodeVersion);
    {
      std::time_t now = std::time(nullptr);
      char stamp[32];
      std::tm tm_utc{};
      gmtime_r(&now, &tm_utc);
      std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
      j["generated_utc"] = stamp;
    }
    j["config"] = {{"g_bm", cfg.g_bm},
                   {"omega_ratios", cfg.omega_ratios},
                   {"lambda_p_start", cfg.lambda_p_start},
                   {"lambda_p_stop", cfg.lambda_p_stop},
                   {"lambda_p_step", cfg.lambda_p_step},
                   {"n_sites", cfg.n_sites},
                   {"n_ph_max", cfg.n_ph_max},
                   {"t_e", cfg.t_e},
                   {"threads", cfg.threads},
                   {"strict", cfg.strict},
                   {"emit_figures", cfg.emit_figures},
                   {"refine_transitions", cfg.refine_transitions},
                   {"output_dir", cfg.output_dir}};
    j["solver"] = {{"tol", cfg.solver.tol},
                   {"max_iter", cfg.solver.max_iter},
                   {"full_reorth", cfg.solver.full_reorth},
                   {"seed", cfg.solver.seed},
                   {"check_interval", cfg.solver.check_interval}};
    j["conventions"] = {
        {"energy_unit", "t_e = 1 sets the scale; omega_ratio is omega_ph / t_e"},
        {"omega_ratio_default", "adiabatic, intermediate, antiadiabatic: 0.5, 1, 2"},
        {"momentum_labels", "K = 2 pi j / N with j in (-N/2, N/2]"},
        {"tie_break", "energy ties resolve to the non-negative K; mirror recorded as degenerate"},
        {"lanczos_stop", "residual <= tol * max(1, |E|), recomputed from a direct apply"},
        {"xi_sentinel", "weights below 1e-14 print as inf with weight 0"},
        {"csv_floats", "%.17g, bitwise round-trip"}};
    j["basis_dimension"] = basis_dimension(cfg.n_sites, cfg.n_ph_max);
    j["row_count"] = result.rows.size();
    j["wall_seconds"] = result.wall_seconds;
    auto& trans = j["transitions"] = nlohmann::json::array();
    for (const auto& tr : result.transitions) {
      nlohmann::json e = {{"omega_ratio", tr.omega_ratio},
                          {"lambda_lo", tr.lambda_lo},
                          {"lambda_hi", tr.lambda_hi},
                          {"k_from_over_pi", tr.k_from_over_pi},
                          {"k_to_over_pi", tr.k_to_over_pi}};
      if (tr.refined) e["refined"] = *tr.refined;
      trans.push_back(e);
    }

    std::ofstream os(files.metadata);
    if (!os) throw IoError("cannot open " + files.metadata.string());
    os << j.dump(2) << '\n';
    if (!os) throw IoError("short write to " + files.metadata.string());
  }

  if (figures) {
    const auto path = out_dir / ("figure_gbm" + trimmed(cfg.g_bm) + ".csv");
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string());
    const auto lambdas = cfg.lambda_grid();
    const int n_xi = std::min(4, cfg.n_sites);
    os << "lambda_P";
    for (double r : cfg.omega_ratios) {
      const auto tag = trimmed(r);
      os << ",S_E_w" << tag;
      for (int i = 1; i <= n_xi; ++i) os << ",xi_" << i << "_w" << tag;
    }
    os << '\n';
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      os << format_double(lambdas[li]);
      for (std::size_t ri = 0; ri < cfg.omega_ratios.size(); ++ri) {
        const auto& row = result.rows[ri * lambdas.size() + li];
        os << ',' << format_double(row.s_e);
        for (int i = 0; i < n_xi; ++i) {
          const auto xi = static_cast<std::size_t>(i) < row.xis.size() ? row.xis[i] : kNan;
          os << ',' << format_double(xi);
        }
      }
      os << '\n';
    }
    if (!os) throw IoError("short write to " + path.string());
    files.figures.push_back(path);
  }

  return files;
}

}  // namespace polaron
