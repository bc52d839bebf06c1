#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "polaron/fock_basis.hpp"
#include "polaron/model.hpp"
#include "polaron/sector_hamiltonian.hpp"

using polaron::BasisIndexMap;
using polaron::ModelParams;
using polaron::Momentum;
using polaron::SparseSectorHamiltonian;

namespace {

ModelParams params_for(int n, int cap, double gp, double gbm, double omega) {
  ModelParams p;
  p.n_sites = n;
  p.n_ph_max = cap;
  p.g_p = gp;
  p.g_bm = gbm;
  p.omega_ph = omega;
  return p;
}

}  // namespace

TEST_CASE("momentum labels cover (-pi, pi] and phase powers conjugate exactly") {
  const auto ks8 = polaron::allowed_momenta(8);
  REQUIRE(ks8.size() == 8);
  CHECK(ks8.front().index == -3);
  CHECK(ks8.back().index == 4);
  const auto ks5 = polaron::allowed_momenta(5);
  REQUIRE(ks5.size() == 5);
  CHECK(ks5.front().index == -2);
  CHECK(ks5.back().index == 2);

  for (const auto& k : ks8) {
    CHECK(k.value() > -std::numbers::pi - 1e-15);
    CHECK(k.value() <= std::numbers::pi + 1e-15);
    for (int d = -9; d <= 9; ++d) {
      const auto ph = k.phase_pow(d);
      CHECK(std::abs(ph) == doctest::Approx(1.0).epsilon(1e-15));
      if (k.index != 4 && k.index != 0) {
        const auto mph = Momentum{-k.index, 8}.phase_pow(d);
        CHECK(mph.real() == ph.real());
        CHECK(mph.imag() == -ph.imag());
      }
    }
    CHECK(k.phase_pow(8) == std::complex<double>{1.0, 0.0});
  }
  CHECK(Momentum{4, 8}.phase_pow(1) == std::complex<double>{-1.0, 0.0});
  CHECK(Momentum{0, 8}.phase_pow(3) == std::complex<double>{1.0, 0.0});
}

TEST_CASE("sector matrix equals the Bloch-sum compression of the full Hamiltonian") {
  for (const auto& [n, cap] : {std::pair{4, 2}, {5, 2}, {3, 3}}) {
    const BasisIndexMap basis(n, cap);
    const auto p = params_for(n, cap, 0.6, 0.3, 0.8);
    const auto full = oracles::full_hamiltonian(p, basis);
    for (const auto& k : polaron::allowed_momenta(n)) {
      CAPTURE(n);
      CAPTURE(cap);
      CAPTURE(k.index);
      const auto iso = oracles::bloch_isometry(k, basis);
      const Eigen::MatrixXcd expect = iso.adjoint() * full * iso;
      const auto got = SparseSectorHamiltonian::assemble(k, basis, p).to_dense();
      REQUIRE(got.rows() == expect.rows());
      CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("sector spectra together tile the full spectrum") {
  const int n = 4, cap = 3;
  const BasisIndexMap basis(n, cap);
  const auto p = params_for(n, cap, 0.9, 0.45, 1.2);
  const auto full_evs = oracles::sorted_eigenvalues(oracles::full_hamiltonian(p, basis));

  std::vector<double> sector_evs;
  for (const auto& k : polaron::allowed_momenta(n)) {
    const auto evs =
        oracles::sorted_eigenvalues(SparseSectorHamiltonian::assemble(k, basis, p).to_dense());
    sector_evs.insert(sector_evs.end(), evs.data(), evs.data() + evs.size());
  }
  std::sort(sector_evs.begin(), sector_evs.end());
  REQUIRE(static_cast<Eigen::Index>(sector_evs.size()) == full_evs.size());
  for (Eigen::Index i = 0; i < full_evs.size(); ++i) {
    CHECK(sector_evs[static_cast<std::size_t>(i)] == doctest::Approx(full_evs[i]).epsilon(1e-10));
  }
}

TEST_CASE("storage is exactly Hermitian and free of explicit zeros") {
  const BasisIndexMap basis(6, 3);
  const auto p = params_for(6, 3, 0.8, 0.25, 1.0);
  for (int j : {0, 1, 3, -2}) {
    const auto h = SparseSectorHamiltonian::assemble(Momentum{j, 6}, basis, p);
    const auto& off = h.row_offsets();
    const auto& col = h.columns();
    const auto& val = h.values();
    auto entry = [&](std::int64_t r, std::int64_t c) -> std::complex<double> {
      for (auto q = off[static_cast<std::size_t>(r)]; q < off[static_cast<std::size_t>(r) + 1]; ++q) {
        if (col[static_cast<std::size_t>(q)] == c) return val[static_cast<std::size_t>(q)];
      }
      REQUIRE(false);
      return {};
    };
    for (std::int64_t r = 0; r < h.dim(); ++r) {
      for (auto q = off[static_cast<std::size_t>(r)]; q < off[static_cast<std::size_t>(r) + 1]; ++q) {
        const auto c = col[static_cast<std::size_t>(q)];
        const auto v = val[static_cast<std::size_t>(q)];
        CHECK(v != std::complex<double>{0.0, 0.0});
        const auto mirror = entry(c, r);
        // bitwise-equal conjugates, not approximately equal ones
        CHECK(mirror.real() == v.real());
        CHECK(mirror.imag() == -v.imag());
        if (r == c) CHECK(v.imag() == 0.0);
      }
    }
  }
}

TEST_CASE("opposite momenta assemble to exact entrywise conjugates") {
  const BasisIndexMap basis(6, 3);
  const auto p = params_for(6, 3, 0.7, 0.4, 1.5);
  for (int j : {1, 2}) {
    const auto hp = SparseSectorHamiltonian::assemble(Momentum{j, 6}, basis, p);
    const auto hm = SparseSectorHamiltonian::assemble(Momentum{-j, 6}, basis, p);
    REQUIRE(hp.nonzeros() == hm.nonzeros());
    CHECK(hp.row_offsets() == hm.row_offsets());
    CHECK(hp.columns() == hm.columns());
    for (std::size_t i = 0; i < hp.values().size(); ++i) {
      CHECK(hp.values()[i].real() == hm.values()[i].real());
      CHECK(hp.values()[i].imag() == -hm.values()[i].imag());
    }
  }
}

TEST_CASE("apply agrees with the dense copy") {
  const BasisIndexMap basis(5, 3);
  const auto p = params_for(5, 3, 0.5, 0.35, 0.9);
  const auto h = SparseSectorHamiltonian::assemble(Momentum{2, 5}, basis, p);
  const auto dense = h.to_dense();
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXcd v(h.dim());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = {u(rng), u(rng)};
    const Eigen::VectorXcd lhs = h.apply(v);
    const Eigen::VectorXcd rhs = dense * v;
    CHECK((lhs - rhs).norm() < 1e-12 * rhs.norm());
  }
}

TEST_CASE("decoupled limit: vacuum diagonal is the bare band, sector floor is the exact minimum") {
  const int n = 6, cap = 3;
  const BasisIndexMap basis(n, cap);
  for (double omega : {0.5, 1.0, 3.0}) {
    const auto p = params_for(n, cap, 0.0, 0.0, omega);
    for (const auto& k : polaron::allowed_momenta(n)) {
      CAPTURE(omega);
      CAPTURE(k.index);
      const auto h = SparseSectorHamiltonian::assemble(k, basis, p);
      const auto dense = h.to_dense();
      CHECK(std::abs(dense(0, 0) - std::complex<double>{-2.0 * std::cos(k.value()), 0.0}) < 1e-14);
      // one phonon parked anywhere costs omega but frees the excitation to
      // sit at its band bottom, hence the competition below
      const double expect = std::min(-2.0 * std::cos(k.value()), omega - 2.0);
      const auto evs = oracles::sorted_eigenvalues(dense);
      CHECK(evs[0] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("equal couplings leave the zero-momentum vacuum column bare") {
  const int n = 6, cap = 3;
  const BasisIndexMap basis(n, cap);
  for (const auto [g, omega] : {std::pair{0.7, 1.3}, {1.2, 0.6}}) {
    const auto p = params_for(n, cap, g, g, omega);
    const auto h = SparseSectorHamiltonian::assemble(Momentum{0, n}, basis, p);
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(h.dim());
    e0[0] = 1.0;
    const Eigen::VectorXcd hv = h.apply(e0);
    CHECK((hv - (-2.0 * p.t_e) * e0).norm() <= 1e-12);

    // away from K = 0 the two mechanisms stop cancelling
    const auto hpi = SparseSectorHamiltonian::assemble(Momentum{n / 2, n}, basis, p);
    CHECK((hpi.apply(e0) - (2.0 * p.t_e) * e0).norm() > 0.1);
  }
}

TEST_CASE("raising terms at the cap are projected away, not wrapped") {
  const int n = 4, cap = 2;
  const BasisIndexMap basis(n, cap);
  const auto p = params_for(n, cap, 0.8, 0.5, 1.0);
  const auto h = SparseSectorHamiltonian::assemble(Momentum{1, n}, basis, p);
  const auto dense = h.to_dense();
  // a column sitting at the cap can only reach totals cap (diagonal, hops)
  // and cap - 1 (lowering); any other total would mean a wrapped raising term
  for (std::int64_t c = 0; c < h.dim(); ++c) {
    if (basis.config(c).total() != cap) continue;
    for (std::int64_t r = 0; r < h.dim(); ++r) {
      if (dense(r, c) == std::complex<double>{0.0, 0.0}) continue;
      const int rt = basis.config(r).total();
      CHECK((rt == cap || rt == cap - 1));
    }
  }
  // and the truncation does not break Hermiticity
  CHECK((dense - dense.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("binary dump round-trips bit for bit") {
  const BasisIndexMap basis(4, 3);
  const auto p = params_for(4, 3, 0.6, 0.2, 1.1);
  const auto h = SparseSectorHamiltonian::assemble(Momentum{1, 4}, basis, p);
  const auto path = std::filesystem::temp_directory_path() / "sector_dump_test.bin";
  h.write_binary(path);
  const auto back = SparseSectorHamiltonian::read_binary(path);
  std::filesystem::remove(path);
  CHECK(back.dim() == h.dim());
  CHECK(back.momentum() == h.momentum());
  CHECK(back.params().g_p == h.params().g_p);
  CHECK(back.row_offsets() == h.row_offsets());
  CHECK(back.columns() == h.columns());
  REQUIRE(back.values().size() == h.values().size());
  for (std::size_t i = 0; i < h.values().size(); ++i) CHECK(back.values()[i] == h.values()[i]);
}

TEST_CASE("mismatched sizes are rejected") {
  const BasisIndexMap basis(4, 2);
  auto p = params_for(4, 2, 0.5, 0.5, 1.0);
  CHECK_THROWS_AS(SparseSectorHamiltonian::assemble(Momentum{3, 4}, basis, p),
                  std::invalid_argument);
  CHECK_THROWS_AS(SparseSectorHamiltonian::assemble(Momentum{1, 6}, basis, p),
                  std::invalid_argument);
  p.n_ph_max = 3;
  CHECK_THROWS_AS(SparseSectorHamiltonian::assemble(Momentum{1, 4}, basis, p),
                  std::invalid_argument);
}
