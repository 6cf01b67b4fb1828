#include "riscr/channel.hpp"

#include <cmath>
#include <cstring>

namespace riscr {

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void NetworkGeometry::validate() const {
  if (n_antennas < 1 || n_sus < 1 || n_pus < 0 || n_ris_elements < 0) {
    throw ValidationError("NetworkGeometry: counts out of range");
  }
  auto check_box = [](const Box3& b, const char* name) {
    if (b.min.x > b.max.x || b.min.y > b.max.y || b.min.z > b.max.z) {
      throw ValidationError(std::string("NetworkGeometry: ") + name + " has min > max");
    }
  };
  check_box(su_region, "su_region");
  check_box(pu_region, "pu_region");
}

void PathLossParams::validate() const {
  if (d0 <= 0.0) throw ValidationError("PathLossParams: d0 must be positive");
  for (double a : exponents) {
    if (a < 0.0) throw ValidationError("PathLossParams: exponents must be nonnegative");
  }
}

double path_loss(double d, LinkClass link, const PathLossParams& params) {
  params.validate();
  if (!(d > 0.0)) throw ValidationError("path_loss: distance must be positive (InvalidDistance)");
  const double t0 = db_to_linear(params.t0_db);
  return t0 * std::pow(d / params.d0, -params.exponent(link));
}

namespace {

Vec3 uniform_in_box(const Box3& b, Rng& rng) {
  // Draw order x, y, z is part of the determinism contract.
  Vec3 p;
  p.x = rng.uniform(b.min.x, b.max.x);
  p.y = rng.uniform(b.min.y, b.max.y);
  p.z = rng.uniform(b.min.z, b.max.z);
  return p;
}

// Fills a block row-by-row with sqrt(gain) * CN(0,1) entries.
void fill_block(CMatrix& block, const std::vector<double>& row_gains, Rng& rng) {
  for (Eigen::Index r = 0; r < block.rows(); ++r) {
    const double amp = std::sqrt(row_gains[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < block.cols(); ++c) {
      block(r, c) = amp * rng.cnormal();
    }
  }
}

}  // namespace

std::pair<std::vector<Vec3>, std::vector<Vec3>> sample_positions(const NetworkGeometry& geom,
                                                                 Rng& rng) {
  geom.validate();
  std::vector<Vec3> sus(static_cast<std::size_t>(geom.n_sus));
  std::vector<Vec3> pus(static_cast<std::size_t>(geom.n_pus));
  for (auto& p : sus) p = uniform_in_box(geom.su_region, rng);
  for (auto& p : pus) p = uniform_in_box(geom.pu_region, rng);
  return {std::move(sus), std::move(pus)};
}

ChannelSet generate_channels(const NetworkGeometry& geom, const PathLossParams& params, Rng& rng) {
  geom.validate();
  params.validate();
  const int n = geom.n_antennas, m = geom.n_ris_elements, k = geom.n_sus, l = geom.n_pus;

  ChannelSet ch;
  std::tie(ch.su_positions, ch.pu_positions) = sample_positions(geom, rng);

  std::vector<double> su_tx_gain(static_cast<std::size_t>(k));
  std::vector<double> su_ris_gain(static_cast<std::size_t>(k));
  std::vector<double> pu_tx_gain(static_cast<std::size_t>(l));
  std::vector<double> pu_ris_gain(static_cast<std::size_t>(l));
  for (int i = 0; i < k; ++i) {
    su_tx_gain[i] = path_loss(distance(geom.tx_position, ch.su_positions[i]), LinkClass::TxSu, params);
    su_ris_gain[i] =
        path_loss(distance(geom.ris_position, ch.su_positions[i]), LinkClass::RisSu, params);
  }
  for (int i = 0; i < l; ++i) {
    pu_tx_gain[i] = path_loss(distance(geom.tx_position, ch.pu_positions[i]), LinkClass::TxPu, params);
    pu_ris_gain[i] =
        path_loss(distance(geom.ris_position, ch.pu_positions[i]), LinkClass::RisPu, params);
  }
  const double ris_gain =
      m > 0 ? path_loss(distance(geom.tx_position, geom.ris_position), LinkClass::TxRis, params)
            : 0.0;

  ch.h_d.resize(k, n);
  ch.h_r.resize(k, m);
  ch.g.resize(m, n);
  ch.u_d.resize(l, n);
  ch.u_r.resize(l, m);

  // Block order is fixed: h_d, h_r, g, u_d, u_r.
  fill_block(ch.h_d, su_tx_gain, rng);
  fill_block(ch.h_r, su_ris_gain, rng);
  fill_block(ch.g, std::vector<double>(static_cast<std::size_t>(m), ris_gain), rng);
  fill_block(ch.u_d, pu_tx_gain, rng);
  fill_block(ch.u_r, pu_ris_gain, rng);
  return ch;
}

namespace {

void hash_bytes(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

void hash_matrix(std::uint64_t& h, const CMatrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const Complex v = m(r, c);
      const double re = v.real(), im = v.imag();
      hash_bytes(h, &re, sizeof(re));
      hash_bytes(h, &im, sizeof(im));
    }
  }
}

}  // namespace

std::uint64_t channel_hash(const ChannelSet& ch) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  hash_matrix(h, ch.h_d);
  hash_matrix(h, ch.h_r);
  hash_matrix(h, ch.g);
  hash_matrix(h, ch.u_d);
  hash_matrix(h, ch.u_r);
  return h;
}

}  // namespace riscr
