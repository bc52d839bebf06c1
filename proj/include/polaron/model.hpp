#pragma once

#include <complex>

namespace polaron {

// Scales and couplings of one itinerant spinless excitation on an N-site ring,
// coupled to dispersionless phonons through the bond-modulated (Peierls) and
// site-modulated (breathing-mode) mechanisms. t_e = 1 fixes the energy unit,
// so omega_ph doubles as the adiabaticity ratio omega_ph / t_e.
struct ModelParams {
  double t_e = 1.0;
  double omega_ph = 1.0;
  double g_p = 0.0;
  double g_bm = 0.0;
  int n_sites = 8;
  int n_ph_max = 9;

  void validate() const;  // throws std::invalid_argument on nonsense

  // Dimensionless effective couplings (band-averaged squared vertex over
  // 2 t_e omega_ph). The cross average of the two mechanisms vanishes, so the
  // total is the plain sum.
  double lambda_p() const { return 2.0 * g_p * g_p * omega_ph / t_e; }
  double lambda_bm() const { return g_bm * g_bm * omega_ph / t_e; }
  double lambda_total() const { return lambda_p() + lambda_bm(); }
};

// Inverses of the lambda formulas, used to walk coupling sweeps in lambda.
double g_p_from_lambda(double lambda_p, double omega_ph, double t_e = 1.0);
double g_bm_from_lambda(double lambda_bm, double omega_ph, double t_e = 1.0);

// Momentum-space scattering amplitudes for excitation momentum k -> k + q.
std::complex<double> vertex_peierls(const ModelParams& p, double k, double q);
std::complex<double> vertex_breathing(const ModelParams& p, double q);
std::complex<double> vertex_total(const ModelParams& p, double k, double q);

// Free-excitation band, -2 t_e cos k.
double bare_dispersion(const ModelParams& p, double k);

}  // namespace polaron
