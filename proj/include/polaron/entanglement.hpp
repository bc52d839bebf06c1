#pragma once

#include <vector>

#include <Eigen/Dense>

#include "polaron/eigensolver.hpp"
#include "polaron/fock_basis.hpp"
#include "polaron/sector_hamiltonian.hpp"

namespace polaron {

// Excitation-side reduced density matrix of a sector ground state. Tracing
// the phonon cloud out of a Bloch-sum state leaves entries that depend on the
// site offset only, through inner products of the cloud with its translates,
// so the matrix is circulant up to the Bloch phase and has 1/N on the
// diagonal by normalisation.
struct ReducedDensityMatrix {
  Eigen::MatrixXcd rho;  // N x N, site basis
  Momentum k;
};

ReducedDensityMatrix reduced_density(const GroundStateRecord& gs, const BasisIndexMap& basis);

// Partial trace over the phonon factor of a site-major product-basis vector
// (the dense oracle's layout); the independent route used for cross-checks.
Eigen::MatrixXcd reduced_density_product_basis(const Eigen::VectorXcd& psi, int n_sites);

// Entanglement levels xi = -ln p, ascending, with weights e^{-xi} alongside.
// Probabilities below 1e-14 are reported as xi = +inf with weight zero;
// negative eigenvalues beyond -1e-12 are a hard error rather than a clamp.
struct EntanglementSpectrum {
  std::vector<double> levels;
  std::vector<double> weights;
};

EntanglementSpectrum spectrum(const ReducedDensityMatrix& rdm);
EntanglementSpectrum spectrum_of_density(const Eigen::MatrixXcd& rho);

// Entanglement entropy as the level-weighted sum over finite levels; equal to
// -sum p ln p with the vanishing-weight levels contributing nothing.
double entropy(const EntanglementSpectrum& s);

// Independent spectrum route: singular values of the N x D site-by-cloud
// coefficient matrix of the same state, xi = -2 ln sigma. Never reuses the
// reduced-density eigensolve.
EntanglementSpectrum svd_cross_check(const GroundStateRecord& gs, const BasisIndexMap& basis);

}  // namespace polaron
