#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "polaron/fock_basis.hpp"
#include "polaron/model.hpp"

namespace polaron {

// One allowed ring quasimomentum K = 2 pi j / N, carried as the integer label
// j in (-N/2, N/2] so sectors compare exactly and +-K pair up by sign.
struct Momentum {
  int index = 0;    // j
  int n_sites = 1;  // N

  double value() const;  // K in (-pi, pi]

  // e^{iKd}, built from |K| with the sign applied afterwards so the result
  // for -K is the exact entrywise conjugate of the one for +K.
  std::complex<double> phase_pow(int d) const;
  std::complex<double> bloch_phase() const { return phase_pow(1); }

  bool operator==(const Momentum&) const = default;
};

// The N sector labels in ascending j order; even N runs -(N/2-1)..N/2.
std::vector<Momentum> allowed_momenta(int n_sites);

// The Hamiltonian restricted to quasimomentum K, in the translation-adapted
// basis whose elements are Bloch sums over ring positions of the excitation
// with the phonon cloud dragged along; one basis vector per phonon config.
// Raising terms that would leave the capped phonon space are dropped
// (projector truncation). CSR storage, exactly Hermitian by construction:
// only the upper wedge is generated, the lower wedge is its conjugate mirror.
class SparseSectorHamiltonian {
 public:
  static SparseSectorHamiltonian assemble(Momentum k, const BasisIndexMap& basis,
                                          const ModelParams& params);

  std::int64_t dim() const { return static_cast<std::int64_t>(row_offsets_.size()) - 1; }
  std::int64_t nonzeros() const { return static_cast<std::int64_t>(values_.size()); }
  Momentum momentum() const { return k_; }
  const ModelParams& params() const { return params_; }

  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& in) const;

  // Dense copy for small-dimension solves and tests; refuses dim > 8192.
  Eigen::MatrixXcd to_dense() const;

  const std::vector<std::int64_t>& row_offsets() const { return row_offsets_; }
  const std::vector<std::int64_t>& columns() const { return columns_; }
  const std::vector<std::complex<double>>& values() const { return values_; }

  // Raw little-endian dump (header, offsets, columns, re/im value pairs).
  void write_binary(const std::filesystem::path& path) const;
  static SparseSectorHamiltonian read_binary(const std::filesystem::path& path);

 private:
  Momentum k_;
  ModelParams params_;
  std::vector<std::int64_t> row_offsets_;
  std::vector<std::int64_t> columns_;
  std::vector<std::complex<double>> values_;
};

}  // namespace polaron
