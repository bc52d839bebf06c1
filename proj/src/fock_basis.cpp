#include "polaron/fock_basis.hpp"

#include <array>
#include <limits>
#include <stdexcept>
#include <string>

namespace polaron {

namespace {

constexpr std::int64_t kSaturated = std::numeric_limits<std::int64_t>::max();

std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (a == kSaturated || b == kSaturated || __builtin_add_overflow(a, b, &r)) {
    return kSaturated;
  }
  return r;
}

}  // namespace

int PhononConfig::total() const {
  int t = 0;
  for (auto v : occ) t += v;
  return t;
}

PhononConfig translate_config(const PhononConfig& m, int shift) {
  const int n = m.sites();
  if (n == 0) return m;
  const int s = ((shift % n) + n) % n;
  PhononConfig out;
  out.occ.resize(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    out.occ[static_cast<std::size_t>(l)] =
        m.occ[static_cast<std::size_t>((l - s + n) % n)];
  }
  return out;
}

int overlap_translated(const PhononConfig& a, const PhononConfig& b, int shift) {
  if (a.sites() != b.sites()) {
    throw std::invalid_argument("overlap_translated: configs live on different rings");
  }
  const int n = a.sites();
  if (n == 0) return 1;
  const int s = ((shift % n) + n) % n;
  for (int l = 0; l < n; ++l) {
    if (a.occ[static_cast<std::size_t>(l)] !=
        b.occ[static_cast<std::size_t>((l - s + n) % n)]) {
      return 0;
    }
  }
  return 1;
}

std::int64_t binomial_checked(int n, int k) {
  if (n < 0 || k < 0) throw std::invalid_argument("binomial_checked: negative argument");
  if (k > n) return 0;
  k = std::min(k, n - k);
  // One Pascal column at a time keeps the scratch at O(k).
  std::vector<std::int64_t> row(static_cast<std::size_t>(k) + 1, 0);
  row[0] = 1;
  for (int i = 1; i <= n; ++i) {
    for (int j = std::min(i, k); j >= 1; --j) {
      std::int64_t r = 0;
      if (__builtin_add_overflow(row[static_cast<std::size_t>(j)],
                                 row[static_cast<std::size_t>(j) - 1], &r)) {
        throw std::overflow_error("binomial_checked: value exceeds int64");
      }
      row[static_cast<std::size_t>(j)] = r;
    }
  }
  return row[static_cast<std::size_t>(k)];
}

std::int64_t basis_dimension(int n_sites, int n_ph_max) {
  if (n_sites <= 0) throw std::invalid_argument("basis_dimension: need at least one site");
  if (n_ph_max < 0) throw std::invalid_argument("basis_dimension: negative phonon cap");
  return binomial_checked(n_sites + n_ph_max, n_sites);
}

BasisIndexMap::BasisIndexMap(int n_sites, int n_ph_max)
    : n_sites_(n_sites), n_ph_max_(n_ph_max) {
  if (n_sites <= 0 || n_sites > 256) {
    throw std::invalid_argument("BasisIndexMap: site count must be in [1, 256]");
  }
  if (n_ph_max < 0 || n_ph_max > 255) {
    throw std::invalid_argument("BasisIndexMap: phonon cap must fit an 8-bit occupation");
  }
  const auto dim = basis_dimension(n_sites, n_ph_max);  // throws on overflow

  // Saturating Pascal triangle; every entry the rank formula touches is
  // bounded by dim (it counts a subset of the basis), so a saturated cell can
  // only sit in a column we never read.
  const int rows = n_sites_ + n_ph_max_ + 2;
  const int cols = n_sites_ + 2;
  binom_.assign(static_cast<std::size_t>(rows), {});
  for (int n = 0; n < rows; ++n) {
    auto& row = binom_[static_cast<std::size_t>(n)];
    row.assign(static_cast<std::size_t>(std::min(n, cols - 1)) + 1, 0);
    row[0] = 1;
    for (int k = 1; k < static_cast<int>(row.size()); ++k) {
      const auto& prev = binom_[static_cast<std::size_t>(n) - 1];
      const std::int64_t up = prev[static_cast<std::size_t>(k) - 1];
      const std::int64_t left =
          k < static_cast<int>(prev.size()) ? prev[static_cast<std::size_t>(k)] : 0;
      row[static_cast<std::size_t>(k)] = sat_add(up, left);
    }
  }

  configs_.reserve(static_cast<std::size_t>(dim));
  PhononConfig cur;
  cur.occ.assign(static_cast<std::size_t>(n_sites_), 0);
  // Lexicographic odometer: smallest occupation first at every site.
  auto gen = [&](auto&& self, int site, int remaining) -> void {
    if (site == n_sites_) {
      configs_.push_back(cur);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      cur.occ[static_cast<std::size_t>(site)] = static_cast<std::uint8_t>(v);
      self(self, site + 1, remaining - v);
    }
    cur.occ[static_cast<std::size_t>(site)] = 0;
  };
  gen(gen, 0, n_ph_max_);
}

const PhononConfig& BasisIndexMap::config(std::int64_t index) const {
  if (index < 0 || index >= size()) {
    throw std::out_of_range("BasisIndexMap::config: index " + std::to_string(index) +
                            " outside [0, " + std::to_string(size()) + ")");
  }
  return configs_[static_cast<std::size_t>(index)];
}

std::int64_t BasisIndexMap::rank_impl(std::span<const std::uint8_t> occ) const {
  // Count configs lexicographically below the argument: at each site, every
  // smaller occupation value v frees its own tail budget, and the number of
  // tails with total <= B on p sites is C(p + B, p). The v-sum telescopes to
  // a difference of two table entries.
  std::int64_t r = 0;
  int budget = n_ph_max_;
  for (int i = 0; i < n_sites_; ++i) {
    const int m_i = occ[static_cast<std::size_t>(i)];
    const int p = n_sites_ - 1 - i;
    if (m_i > 0) {
      const auto& hi = binom_[static_cast<std::size_t>(p + budget + 1)];
      const auto& lo = binom_[static_cast<std::size_t>(p + budget - m_i + 1)];
      r += hi[static_cast<std::size_t>(p) + 1] - lo[static_cast<std::size_t>(p) + 1];
    }
    budget -= m_i;
  }
  return r;
}

std::int64_t BasisIndexMap::rank(const PhononConfig& m) const {
  if (m.sites() != n_sites_) {
    throw std::invalid_argument("BasisIndexMap::rank: config has wrong site count");
  }
  if (m.total() > n_ph_max_) {
    throw std::out_of_range("BasisIndexMap::rank: config exceeds the phonon cap");
  }
  return rank_impl(m.occ);
}

std::int64_t BasisIndexMap::translated_rank(std::int64_t index, int shift) const {
  const auto& src = config(index).occ;
  const int n = n_sites_;
  const int s = ((shift % n) + n) % n;
  if (s == 0) return index;
  std::array<std::uint8_t, 256> buf;
  for (int l = 0; l < n; ++l) {
    buf[static_cast<std::size_t>(l)] = src[static_cast<std::size_t>((l - s + n) % n)];
  }
  return rank_impl({buf.data(), static_cast<std::size_t>(n)});
}

BasisIndexMap enumerate_basis(int n_sites, int n_ph_max) {
  return BasisIndexMap(n_sites, n_ph_max);
}

}  // namespace polaron
