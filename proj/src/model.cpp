#include "polaron/model.hpp"

#include <cmath>
#include <stdexcept>

namespace polaron {

void ModelParams::validate() const {
  if (!(t_e > 0.0) || !std::isfinite(t_e)) {
    throw std::invalid_argument("ModelParams: t_e must be positive and finite");
  }
  if (!(omega_ph > 0.0) || !std::isfinite(omega_ph)) {
    throw std::invalid_argument("ModelParams: omega_ph must be positive and finite");
  }
  if (!std::isfinite(g_p) || !std::isfinite(g_bm)) {
    throw std::invalid_argument("ModelParams: couplings must be finite");
  }
  if (n_sites < 2) {
    throw std::invalid_argument("ModelParams: the ring needs at least two sites");
  }
  if (n_ph_max < 0) {
    throw std::invalid_argument("ModelParams: negative phonon cap");
  }
}

double g_p_from_lambda(double lambda_p, double omega_ph, double t_e) {
  if (lambda_p < 0.0 || !(omega_ph > 0.0) || !(t_e > 0.0)) {
    throw std::invalid_argument("g_p_from_lambda: need lambda_p >= 0, omega_ph > 0, t_e > 0");
  }
  return std::sqrt(lambda_p * t_e / (2.0 * omega_ph));
}

double g_bm_from_lambda(double lambda_bm, double omega_ph, double t_e) {
  if (lambda_bm < 0.0 || !(omega_ph > 0.0) || !(t_e > 0.0)) {
    throw std::invalid_argument("g_bm_from_lambda: need lambda_bm >= 0, omega_ph > 0, t_e > 0");
  }
  return std::sqrt(lambda_bm * t_e / omega_ph);
}

std::complex<double> vertex_peierls(const ModelParams& p, double k, double q) {
  return {0.0, 2.0 * p.g_p * p.omega_ph * (std::sin(k) - std::sin(k + q))};
}

std::complex<double> vertex_breathing(const ModelParams& p, double q) {
  return {0.0, 2.0 * p.g_bm * p.omega_ph * std::sin(q)};
}

std::complex<double> vertex_total(const ModelParams& p, double k, double q) {
  return vertex_peierls(p, k, q) + vertex_breathing(p, q);
}

double bare_dispersion(const ModelParams& p, double k) {
  return -2.0 * p.t_e * std::cos(k);
}

}  // namespace polaron
