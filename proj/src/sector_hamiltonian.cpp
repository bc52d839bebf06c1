#include "polaron/sector_hamiltonian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

namespace polaron {

static_assert(std::endian::native == std::endian::little,
              "binary dumps assume a little-endian host");

double Momentum::value() const {
  return 2.0 * std::numbers::pi * index / n_sites;
}

std::complex<double> Momentum::phase_pow(int d) const {
  const long long prod = static_cast<long long>(index) * d;
  // exact integer reduction mod N keeps the angle in [0, 2 pi) and makes the
  // -K phases bitwise conjugates of the +K ones
  const long long red = ((prod % n_sites) + n_sites) % n_sites;
  const long long mag = prod >= 0 ? red : (red == 0 ? 0 : n_sites - red);
  // snap the half and full turns so K = 0 and K = pi phases are exactly real
  if (mag == 0) return {1.0, 0.0};
  if (2 * mag == n_sites) return {-1.0, 0.0};
  const double ang = 2.0 * std::numbers::pi * static_cast<double>(mag) / n_sites;
  const double c = std::cos(ang);
  const double s = std::sin(ang);
  return {c, prod >= 0 ? s : -s};
}

std::vector<Momentum> allowed_momenta(int n_sites) {
  if (n_sites < 1) throw std::invalid_argument("allowed_momenta: empty ring");
  std::vector<Momentum> out;
  out.reserve(static_cast<std::size_t>(n_sites));
  for (int j = -(n_sites - 1) / 2; j <= n_sites / 2; ++j) {
    out.push_back(Momentum{j, n_sites});
  }
  return out;
}

namespace {

struct Triplet {
  std::int64_t row;
  std::int64_t col;
  std::complex<double> val;
};

// Ladder factor of one coupling term: apply (a_site^dag + a_site) with an
// overall sign, then shift the whole cloud, then attach a Bloch phase.
struct LadderPiece {
  int site;
  double sign;
  int shift;
  std::complex<double> phase;
  double strength;  // g * omega_ph
};

}  // namespace

SparseSectorHamiltonian SparseSectorHamiltonian::assemble(Momentum k,
                                                          const BasisIndexMap& basis,
                                                          const ModelParams& params) {
  params.validate();
  const int n = basis.sites();
  if (k.n_sites != n || params.n_sites != n || params.n_ph_max != basis.phonon_cap()) {
    throw std::invalid_argument("assemble: momentum, params, and basis disagree on sizes");
  }
  if (2 * k.index <= -n || 2 * k.index > n) {
    throw std::invalid_argument("assemble: momentum label outside (-N/2, N/2]");
  }

  const int cap = basis.phonon_cap();
  const auto dim = basis.size();
  const double t = params.t_e;
  const double w = params.omega_ph;
  const auto phase_left = k.bloch_phase();            // e^{+iK}: excitation one step down-ring
  const auto phase_right = std::conj(phase_left);     // e^{-iK}: one step up-ring
  const std::complex<double> one{1.0, 0.0};

  // Acting on a basis vector, each coupling term lands on the excitation's
  // new position; re-centring the cloud back onto the reference site turns
  // that into a pure phonon-config map with the Bloch phase of the step.
  const LadderPiece pieces[] = {
      {1 % n, +1.0, -1, phase_right, params.g_p * w},      // bond ahead, far end
      {0, -1.0, -1, phase_right, params.g_p * w},          // bond ahead, near end
      {0, +1.0, +1, phase_left, params.g_p * w},           // bond behind, near end
      {n - 1, -1.0, +1, phase_left, params.g_p * w},       // bond behind, far end
      {n - 1, +1.0, 0, one, params.g_bm * w},              // site term, neighbour behind
      {1 % n, -1.0, 0, one, params.g_bm * w},              // site term, neighbour ahead
  };

  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(dim) * 16);

  std::vector<std::int64_t> rows;
  std::vector<std::complex<double>> vals;
  rows.reserve(16);
  vals.reserve(16);
  auto add = [&](std::int64_t r, std::complex<double> v) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i] == r) {
        vals[i] += v;
        return;
      }
    }
    rows.push_back(r);
    vals.push_back(v);
  };

  PhononConfig scratch;
  for (std::int64_t c = 0; c < dim; ++c) {
    rows.clear();
    vals.clear();
    const auto& m = basis.config(c);
    const int total = m.total();

    add(c, {w * total, 0.0});
    add(basis.translated_rank(c, -1), -t * phase_right);
    add(basis.translated_rank(c, +1), -t * phase_left);

    for (const auto& piece : pieces) {
      if (piece.strength == 0.0) continue;
      const int occ = m.occ[static_cast<std::size_t>(piece.site)];
      if (total < cap) {  // raising; at the cap the target is projected away
        scratch = m;
        ++scratch.occ[static_cast<std::size_t>(piece.site)];
        const auto r = basis.rank(translate_config(scratch, piece.shift));
        add(r, piece.sign * piece.strength * std::sqrt(occ + 1.0) * piece.phase);
      }
      if (occ > 0) {  // lowering
        scratch = m;
        --scratch.occ[static_cast<std::size_t>(piece.site)];
        const auto r = basis.rank(translate_config(scratch, piece.shift));
        add(r, piece.sign * piece.strength * std::sqrt(static_cast<double>(occ)) * piece.phase);
      }
    }

    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto r = rows[i];
      const auto v = vals[i];
      if (v == 0.0) continue;  // merged terms that cancelled exactly
      if (r > c) continue;     // lower wedge comes from the mirror below
      trips.push_back({r, c, v});
      if (r < c) trips.push_back({c, r, std::conj(v)});
    }
  }

  std::sort(trips.begin(), trips.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseSectorHamiltonian h;
  h.k_ = k;
  h.params_ = params;
  h.row_offsets_.assign(static_cast<std::size_t>(dim) + 1, 0);
  h.columns_.reserve(trips.size());
  h.values_.reserve(trips.size());
  for (const auto& tr : trips) {
    ++h.row_offsets_[static_cast<std::size_t>(tr.row) + 1];
    h.columns_.push_back(tr.col);
    h.values_.push_back(tr.val);
  }
  for (std::size_t r = 1; r < h.row_offsets_.size(); ++r) {
    h.row_offsets_[r] += h.row_offsets_[r - 1];
  }
  return h;
}

void SparseSectorHamiltonian::apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
  const auto d = dim();
  if (in.size() != d) throw std::invalid_argument("apply: vector length != sector dimension");
  out.resize(d);
  for (std::int64_t r = 0; r < d; ++r) {
    std::complex<double> acc{0.0, 0.0};
    const auto begin = row_offsets_[static_cast<std::size_t>(r)];
    const auto end = row_offsets_[static_cast<std::size_t>(r) + 1];
    for (auto p = begin; p < end; ++p) {
      acc += values_[static_cast<std::size_t>(p)] * in[columns_[static_cast<std::size_t>(p)]];
    }
    out[r] = acc;
  }
}

Eigen::VectorXcd SparseSectorHamiltonian::apply(const Eigen::VectorXcd& in) const {
  Eigen::VectorXcd out;
  apply(in, out);
  return out;
}

Eigen::MatrixXcd SparseSectorHamiltonian::to_dense() const {
  const auto d = dim();
  if (d > 8192) {
    throw std::length_error("to_dense: refusing a dense copy above dim 8192");
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (std::int64_t r = 0; r < d; ++r) {
    for (auto p = row_offsets_[static_cast<std::size_t>(r)];
         p < row_offsets_[static_cast<std::size_t>(r) + 1]; ++p) {
      m(r, columns_[static_cast<std::size_t>(p)]) = values_[static_cast<std::size_t>(p)];
    }
  }
  return m;
}

namespace {

template <typename T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

constexpr char kMagic[8] = {'P', 'O', 'L', 'S', 'E', 'C', 'H', '1'};

}  // namespace

void SparseSectorHamiltonian::write_binary(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_binary: cannot open " + path.string());
  os.write(kMagic, sizeof(kMagic));
  put(os, static_cast<std::int64_t>(dim()));
  put(os, static_cast<std::int64_t>(nonzeros()));
  put(os, static_cast<std::int32_t>(k_.index));
  put(os, static_cast<std::int32_t>(k_.n_sites));
  put(os, params_.t_e);
  put(os, params_.omega_ph);
  put(os, params_.g_p);
  put(os, params_.g_bm);
  put(os, static_cast<std::int32_t>(params_.n_sites));
  put(os, static_cast<std::int32_t>(params_.n_ph_max));
  os.write(reinterpret_cast<const char*>(row_offsets_.data()),
           static_cast<std::streamsize>(row_offsets_.size() * sizeof(std::int64_t)));
  os.write(reinterpret_cast<const char*>(columns_.data()),
           static_cast<std::streamsize>(columns_.size() * sizeof(std::int64_t)));
  os.write(reinterpret_cast<const char*>(values_.data()),
           static_cast<std::streamsize>(values_.size() * sizeof(std::complex<double>)));
  if (!os) throw std::runtime_error("write_binary: short write to " + path.string());
}

SparseSectorHamiltonian SparseSectorHamiltonian::read_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_binary: cannot open " + path.string());
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("read_binary: bad magic in " + path.string());
  }
  SparseSectorHamiltonian h;
  const auto d = get<std::int64_t>(is);
  const auto nnz = get<std::int64_t>(is);
  h.k_.index = get<std::int32_t>(is);
  h.k_.n_sites = get<std::int32_t>(is);
  h.params_.t_e = get<double>(is);
  h.params_.omega_ph = get<double>(is);
  h.params_.g_p = get<double>(is);
  h.params_.g_bm = get<double>(is);
  h.params_.n_sites = get<std::int32_t>(is);
  h.params_.n_ph_max = get<std::int32_t>(is);
  if (d < 0 || nnz < 0) throw std::runtime_error("read_binary: negative sizes");
  h.row_offsets_.resize(static_cast<std::size_t>(d) + 1);
  h.columns_.resize(static_cast<std::size_t>(nnz));
  h.values_.resize(static_cast<std::size_t>(nnz));
  is.read(reinterpret_cast<char*>(h.row_offsets_.data()),
          static_cast<std::streamsize>(h.row_offsets_.size() * sizeof(std::int64_t)));
  is.read(reinterpret_cast<char*>(h.columns_.data()),
          static_cast<std::streamsize>(h.columns_.size() * sizeof(std::int64_t)));
  is.read(reinterpret_cast<char*>(h.values_.data()),
          static_cast<std::streamsize>(h.values_.size() * sizeof(std::complex<double>)));
  if (!is) throw std::runtime_error("read_binary: truncated file " + path.string());
  return h;
}

}  // namespace polaron
