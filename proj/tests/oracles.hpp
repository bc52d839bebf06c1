// Test-side reference constructions. Everything here is built directly from
// the real-space Hamiltonian terms and brute-force sums, independent of the
// library's sector assembly, so the two routes can disagree.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "polaron/fock_basis.hpp"
#include "polaron/model.hpp"
#include "polaron/sector_hamiltonian.hpp"

namespace oracles {

// Full one-excitation Hamiltonian in the site-major product basis
// (index = site * D + config rank), assembled term by term on the ring.
inline Eigen::MatrixXcd full_hamiltonian(const polaron::ModelParams& p,
                                         const polaron::BasisIndexMap& basis) {
  const int n = basis.sites();
  const int cap = basis.phonon_cap();
  const auto d = basis.size();
  const auto dim = static_cast<std::int64_t>(n) * d;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const double t = p.t_e;
  const double w = p.omega_ph;
  auto at = [&](int site, std::int64_t x) { return static_cast<std::int64_t>(site) * d + x; };

  for (std::int64_t x = 0; x < d; ++x) {
    const auto& m = basis.config(x);
    const int total = m.total();

    for (int site = 0; site < n; ++site) {
      h(at(site, x), at(site, x)) += w * total;
      h(at((site + 1) % n, x), at(site, x)) += -t;
      h(at((site - 1 + n) % n, x), at(site, x)) += -t;
    }

    auto ladder = [&](int site, double pref, auto&& sink) {
      const int occ = m.occ[static_cast<std::size_t>(site)];
      if (total < cap) {
        auto c2 = m;
        ++c2.occ[static_cast<std::size_t>(site)];
        sink(basis.rank(c2), pref * std::sqrt(occ + 1.0));
      }
      if (occ > 0) {
        auto c2 = m;
        --c2.occ[static_cast<std::size_t>(site)];
        sink(basis.rank(c2), pref * std::sqrt(static_cast<double>(occ)));
      }
    };

    // bond coupling: both hop directions across bond (b, b+1) share the
    // factor (raise/lower at b+1) - (raise/lower at b)
    for (int b = 0; b < n; ++b) {
      const int bp = (b + 1) % n;
      for (const auto [site, sign] : {std::pair{bp, +1.0}, std::pair{b, -1.0}}) {
        ladder(site, p.g_p * w * sign, [&](std::int64_t x2, double amp) {
          h(at(bp, x2), at(b, x)) += amp;
          h(at(b, x2), at(bp, x)) += amp;
        });
      }
    }
    // site coupling: occupied site couples to (behind) - (ahead)
    for (int site = 0; site < n; ++site) {
      for (const auto [ph, sign] :
           {std::pair{(site - 1 + n) % n, +1.0}, std::pair{(site + 1) % n, -1.0}}) {
        ladder(ph, p.g_bm * w * sign, [&](std::int64_t x2, double amp) {
          h(at(site, x2), at(site, x)) += amp;
        });
      }
    }
  }
  return h;
}

// Isometry from one momentum sector into the product basis: column m is the
// normalised Bloch sum of the excitation at each site with the cloud dragged
// along, phased as e^{iK site_number} with 1-based numbering.
inline Eigen::MatrixXcd bloch_isometry(polaron::Momentum k,
                                       const polaron::BasisIndexMap& basis) {
  const int n = basis.sites();
  const auto d = basis.size();
  Eigen::MatrixXcd iso = Eigen::MatrixXcd::Zero(n * d, d);
  const double root = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::int64_t m = 0; m < d; ++m) {
    for (int site = 0; site < n; ++site) {
      const auto x = basis.translated_rank(m, site);
      iso(static_cast<std::int64_t>(site) * d + x, m) = k.phase_pow(site + 1) * root;
    }
  }
  return iso;
}

inline Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Spearman rank correlation with midranks for ties.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ranks = [](const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return v[i] < v[j]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t t = i; t <= j; ++t) r[idx[t]] = mid;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - mean) * (rb[i] - mean);
    da += (ra[i] - mean) * (ra[i] - mean);
    db += (rb[i] - mean) * (rb[i] - mean);
  }
  return num / std::sqrt(da * db);
}

}  // namespace oracles
