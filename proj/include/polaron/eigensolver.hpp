#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "polaron/fock_basis.hpp"
#include "polaron/model.hpp"
#include "polaron/sector_hamiltonian.hpp"

namespace polaron {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverSettings {
  double tol = 1e-10;       // residual target, relative to max(1, |E|)
  int max_iter = 500;       // Krylov steps per attempt
  bool full_reorth = true;  // project each new direction against the whole stored basis
  std::uint64_t seed = 0x5eedULL;
  int check_interval = 5;   // Ritz checks this many steps apart
};

struct Eigenpair {
  double value = 0.0;
  Eigen::VectorXcd vector;
  int iterations = 0;     // Krylov dimension built; 0 on the dense path
  double residual = 0.0;  // ||H v - value * v|| recomputed with a direct apply
  bool dense_path = false;
  bool restarted = false;
};

// Lowest eigenpair of one sector. Small dimensions (<= 64) go through a
// dense solve; everything else runs Lanczos with full reorthogonalisation, a
// deterministic seeded start vector, and one reseeded restart if the first
// pass stalls. Throws SolverError when the residual target cannot be met.
Eigenpair lowest_eigenpair(const SparseSectorHamiltonian& h,
                           const SolverSettings& settings = {});

struct SectorSolution {
  Momentum k;
  Eigenpair pair;
};

// lowest_eigenpair for every allowed momentum label, ascending in j.
std::vector<SectorSolution> solve_all_sectors(const ModelParams& params,
                                              const BasisIndexMap& basis,
                                              const SolverSettings& settings = {});

struct GroundStateRecord {
  Momentum k_gs;
  double energy = 0.0;
  Eigen::VectorXcd coeffs;  // amplitudes over phonon configs in the K_gs sector
  std::optional<Momentum> degenerate_partner;
  std::vector<std::pair<Momentum, double>> sector_energies;  // ascending j
};

// Global ground state across sectors. Time reversal pairs +-K exactly, so
// energy ties within 10x the solver tolerance resolve to the non-negative
// label with the mirror recorded as the degenerate partner.
GroundStateRecord ground_state_over_K(const ModelParams& params,
                                      const BasisIndexMap& basis,
                                      const SolverSettings& settings = {});

// Weight of the zero-phonon Bloch component in the ground state; identically
// zero off the K = 0 sector where that component does not exist.
double bare_overlap(const GroundStateRecord& gs);

// Full position-space reference, one excitation times capped phonon space,
// basis laid out site-major (index = site * D + config rank). Refuses
// problems with N * D above 5000; use it to cross-check the sector route,
// not to produce physics.
struct DenseSolution {
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::VectorXcd ground_vector;
  std::int64_t dim = 0;
};
DenseSolution dense_oracle(const ModelParams& params);

}  // namespace polaron
