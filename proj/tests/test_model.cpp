#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "polaron/model.hpp"

using polaron::ModelParams;

namespace {

constexpr double kPi = std::numbers::pi;

// Midpoint-rule Brillouin-zone average of f(k, q) on an M x M grid. Uniform
// grids integrate low-order trig polynomials exactly, so M = 256 is already
// far inside the tolerance used below.
template <typename F>
double bz_average(F&& f, int m = 256) {
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double k = -kPi + (2.0 * kPi) * (i + 0.5) / m;
    for (int j = 0; j < m; ++j) {
      const double q = -kPi + (2.0 * kPi) * (j + 0.5) / m;
      acc += f(k, q);
    }
  }
  return acc / (static_cast<double>(m) * m);
}

}  // namespace

TEST_CASE("effective couplings at frozen spot values") {
  ModelParams p;
  p.g_p = 0.25;
  p.g_bm = 0.25;
  p.omega_ph = 1.0;
  CHECK(p.lambda_p() == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(p.lambda_bm() == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(p.lambda_total() == doctest::Approx(0.1875).epsilon(1e-15));

  p.omega_ph = 2.0;
  CHECK(p.lambda_p() == doctest::Approx(0.25).epsilon(1e-15));
  p.t_e = 2.0;
  CHECK(p.lambda_p() == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("lambda <-> g round trips") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> lam(0.0, 4.0), w(0.3, 3.0);
  for (int t = 0; t < 100; ++t) {
    const double omega = w(rng);
    const double lp = lam(rng), lb = lam(rng);
    ModelParams p;
    p.omega_ph = omega;
    p.g_p = polaron::g_p_from_lambda(lp, omega);
    p.g_bm = polaron::g_bm_from_lambda(lb, omega);
    CHECK(p.lambda_p() == doctest::Approx(lp).epsilon(1e-14));
    CHECK(p.lambda_bm() == doctest::Approx(lb).epsilon(1e-14));
  }
}

TEST_CASE("vertices are odd, imaginary, and cancel at k = 0 for equal couplings") {
  ModelParams p;
  p.g_p = 0.7;
  p.g_bm = 0.7;
  p.omega_ph = 1.3;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int t = 0; t < 200; ++t) {
    const double k = u(rng), q = u(rng);
    const auto gp = polaron::vertex_peierls(p, k, q);
    const auto gb = polaron::vertex_breathing(p, q);
    CHECK(gp.real() == 0.0);
    CHECK(gb.real() == 0.0);
    // scattering k -> k+q followed by k+q -> k undoes the amplitude
    CHECK(polaron::vertex_peierls(p, k + q, -q).imag() == doctest::Approx(-gp.imag()).epsilon(1e-12));
    CHECK(polaron::vertex_breathing(p, -q).imag() == doctest::Approx(-gb.imag()).epsilon(1e-12));
    // a zone-boundary-free excitation at k = 0 sees equal and opposite couplings
    CHECK(std::abs(polaron::vertex_total(p, 0.0, q)) < 1e-14);
  }
}

TEST_CASE("lambda_total equals the Brillouin-zone average of the squared vertex") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> g(0.05, 1.5), w(0.4, 2.5);
  for (int t = 0; t < 5; ++t) {
    ModelParams p;
    p.g_p = g(rng);
    p.g_bm = g(rng);
    p.omega_ph = w(rng);
    const double quad = bz_average([&](double k, double q) {
      return std::norm(polaron::vertex_total(p, k, q));
    }) / (2.0 * p.t_e * p.omega_ph);
    CHECK(quad == doctest::Approx(p.lambda_total()).epsilon(1e-9));

    const double cross = bz_average([&](double k, double q) {
      return 2.0 * (polaron::vertex_peierls(p, k, q) * std::conj(polaron::vertex_breathing(p, q))).real();
    });
    CHECK(std::abs(cross) < 1e-12);
  }
}

TEST_CASE("bare band") {
  ModelParams p;
  CHECK(polaron::bare_dispersion(p, 0.0) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(polaron::bare_dispersion(p, kPi / 2) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(polaron::bare_dispersion(p, kPi) == doctest::Approx(2.0).epsilon(1e-15));
  p.t_e = 1.5;
  CHECK(polaron::bare_dispersion(p, 0.0) == doctest::Approx(-3.0).epsilon(1e-15));
}

TEST_CASE("parameter validation") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  p.t_e = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.t_e = 1.0;
  p.omega_ph = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.omega_ph = 1.0;
  p.n_sites = 1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.n_sites = 8;
  p.n_ph_max = -2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_THROWS_AS((void)polaron::g_p_from_lambda(-0.1, 1.0), std::invalid_argument);
}
