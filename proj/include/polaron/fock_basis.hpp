#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace polaron {

// Occupation pattern of the dispersionless phonon modes on an N-site ring.
// Site l (0-based) holds occ[l] quanta. The config itself carries no cap;
// the basis it lives in enforces the total.
struct PhononConfig {
  std::vector<std::uint8_t> occ;

  int sites() const { return static_cast<int>(occ.size()); }
  int total() const;
  bool operator==(const PhononConfig&) const = default;
};

// Cyclic shift: the result holds at site l what the input held at site
// (l - shift) mod N, so shift = +1 moves every quantum one site up the ring.
// Any integer shift is accepted and reduced mod N.
PhononConfig translate_config(const PhononConfig& m, int shift);

// 1 if translate_config(b, shift) equals a, else 0. Number-state configs are
// orthonormal, so this is the complete overlap rule between shifted configs.
int overlap_translated(const PhononConfig& a, const PhononConfig& b, int shift);

// Binomial coefficient via Pascal addition, throwing std::overflow_error as
// soon as an intermediate leaves int64 range. k > n gives 0.
std::int64_t binomial_checked(int n, int k);

// C(n_sites + n_ph_max, n_sites) without enumerating anything; same overflow
// behaviour as binomial_checked so oversized requests fail fast.
std::int64_t basis_dimension(int n_sites, int n_ph_max);

// All phonon configs on n_sites sites with total occupation <= n_ph_max in
// lexicographic order (site 0 most significant, vacuum first), plus O(N)
// rank lookup through combinatorial prefix counts.
class BasisIndexMap {
 public:
  BasisIndexMap(int n_sites, int n_ph_max);

  int sites() const { return n_sites_; }
  int phonon_cap() const { return n_ph_max_; }
  std::int64_t size() const { return static_cast<std::int64_t>(configs_.size()); }

  const PhononConfig& config(std::int64_t index) const;

  // Throws std::invalid_argument on a length mismatch and std::out_of_range
  // if the config's total exceeds the cap.
  std::int64_t rank(const PhononConfig& m) const;

  // rank of translate_config(config(index), shift) without materialising the
  // shifted config; hot path of the Hamiltonian assembly and of the
  // reduced-density accumulation.
  std::int64_t translated_rank(std::int64_t index, int shift) const;

 private:
  int n_sites_;
  int n_ph_max_;
  std::vector<PhononConfig> configs_;
  std::vector<std::vector<std::int64_t>> binom_;  // Pascal rows up to N+cap+1

  std::int64_t rank_impl(std::span<const std::uint8_t> occ) const;
};

// Interface-named convenience wrapper for the constructor.
BasisIndexMap enumerate_basis(int n_sites, int n_ph_max);

}  // namespace polaron
