#include "polaron/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace polaron {

namespace {

constexpr double kVanishing = 1e-14;   // below this a weight counts as zero
constexpr double kNegativeSlack = -1e-12;  // rounding floor for eigenvalues

EntanglementSpectrum spectrum_from_probabilities(std::vector<double> probs) {
  // descending probabilities give ascending levels
  std::sort(probs.begin(), probs.end(), std::greater<>());
  EntanglementSpectrum out;
  out.levels.reserve(probs.size());
  out.weights.reserve(probs.size());
  for (double p : probs) {
    if (p < kNegativeSlack) {
      throw std::domain_error("entanglement spectrum: eigenvalue " + std::to_string(p) +
                              " is negative beyond rounding slack");
    }
    if (p <= kVanishing) {
      out.levels.push_back(std::numeric_limits<double>::infinity());
      out.weights.push_back(0.0);
    } else {
      out.levels.push_back(-std::log(p));
      out.weights.push_back(p);
    }
  }
  return out;
}

}  // namespace

ReducedDensityMatrix reduced_density(const GroundStateRecord& gs, const BasisIndexMap& basis) {
  const int n = basis.sites();
  const auto d = basis.size();
  if (gs.coeffs.size() != d) {
    throw std::invalid_argument("reduced_density: coefficient length != basis size");
  }

  // overlap of the cloud with its own translate, one value per offset
  Eigen::VectorXcd f(n);
  for (int off = 0; off < n; ++off) {
    std::complex<double> acc{0.0, 0.0};
    for (std::int64_t x = 0; x < d; ++x) {
      acc += gs.coeffs[x] * std::conj(gs.coeffs[basis.translated_rank(x, off)]);
    }
    f[off] = acc;
  }

  ReducedDensityMatrix out;
  out.k = gs.k_gs;
  out.rho.resize(n, n);
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      const int off = ((row - col) % n + n) % n;
      out.rho(row, col) = gs.k_gs.phase_pow(off) * f[off] / static_cast<double>(n);
    }
  }
  return out;
}

Eigen::MatrixXcd reduced_density_product_basis(const Eigen::VectorXcd& psi, int n_sites) {
  if (n_sites < 1 || psi.size() % n_sites != 0) {
    throw std::invalid_argument("reduced_density_product_basis: length not divisible by N");
  }
  const auto d = psi.size() / n_sites;
  Eigen::MatrixXcd rho(n_sites, n_sites);
  for (int a = 0; a < n_sites; ++a) {
    for (int b = 0; b < n_sites; ++b) {
      // dot conjugates its first factor, so this is sum_x psi(a,x) psi(b,x)*
      rho(a, b) = psi.segment(b * d, d).dot(psi.segment(a * d, d));
    }
  }
  return rho;
}

EntanglementSpectrum spectrum_of_density(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols()) {
    throw std::invalid_argument("spectrum_of_density: matrix is not square");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  std::vector<double> probs(es.eigenvalues().data(),
                            es.eigenvalues().data() + es.eigenvalues().size());
  return spectrum_from_probabilities(std::move(probs));
}

EntanglementSpectrum spectrum(const ReducedDensityMatrix& rdm) {
  return spectrum_of_density(rdm.rho);
}

double entropy(const EntanglementSpectrum& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.levels.size(); ++i) {
    if (std::isinf(s.levels[i])) continue;
    acc += s.levels[i] * s.weights[i];
  }
  return acc;
}

EntanglementSpectrum svd_cross_check(const GroundStateRecord& gs, const BasisIndexMap& basis) {
  const int n = basis.sites();
  const auto d = basis.size();
  if (gs.coeffs.size() != d) {
    throw std::invalid_argument("svd_cross_check: coefficient length != basis size");
  }

  // site-by-cloud coefficient matrix of the Bloch sum: the cloud seen from
  // site n0 is the reference cloud dragged forward by n0 steps
  Eigen::MatrixXcd m(n, d);
  const double root = 1.0 / std::sqrt(static_cast<double>(n));
  for (int n0 = 0; n0 < n; ++n0) {
    const auto phase = gs.k_gs.phase_pow(n0 + 1) * root;
    for (std::int64_t x = 0; x < d; ++x) {
      m(n0, x) = phase * gs.coeffs[basis.translated_rank(x, -n0)];
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  std::vector<double> probs;
  probs.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double s = svd.singularValues()[i];
    probs.push_back(s * s);
  }
  // a wide matrix yields min(N, D) values; the rest of the N levels are empty
  while (probs.size() < static_cast<std::size_t>(n)) probs.push_back(0.0);
  return spectrum_from_probabilities(std::move(probs));
}

}  // namespace polaron
