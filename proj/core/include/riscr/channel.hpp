#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "riscr/rng.hpp"
#include "riscr/types.hpp"

namespace riscr {

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

double distance(const Vec3& a, const Vec3& b);

/// Axis-aligned box, min <= max per axis.
struct Box3 {
  Vec3 min, max;
};

enum class LinkClass { TxSu = 0, TxPu = 1, TxRis = 2, RisSu = 3, RisPu = 4 };
inline constexpr int kNumLinkClasses = 5;

struct NetworkGeometry {
  Vec3 tx_position;
  Vec3 ris_position;
  Box3 su_region;
  Box3 pu_region;
  int n_antennas = 1;      // N
  int n_ris_elements = 1;  // M
  int n_sus = 1;           // K
  int n_pus = 1;           // L

  void validate() const;
};

/// zeta(d) = T0 * (d/d0)^(-alpha), T0 given in dB, one exponent per link class.
struct PathLossParams {
  double t0_db = -30.0;
  double d0 = 1.0;
  std::array<double, kNumLinkClasses> exponents{3.5, 3.5, 2.0, 2.2, 2.2};

  double exponent(LinkClass c) const { return exponents[static_cast<int>(c)]; }
  void validate() const;
};

/// The five channel blocks. Row k of h_d stores the conjugated (row-form)
/// channel h_{d,k}^H, so that h_d.row(k) * w is directly the received symbol
/// coefficient; h_r, u_d, u_r follow the same convention. g holds the Tx->RIS
/// matrix G itself (M x N).
struct ChannelSet {
  CMatrix h_d;  // K x N, Tx -> SU
  CMatrix h_r;  // K x M, RIS -> SU
  CMatrix g;    // M x N, Tx -> RIS
  CMatrix u_d;  // L x N, Tx -> PU
  CMatrix u_r;  // L x M, RIS -> PU
  std::vector<Vec3> su_positions;
  std::vector<Vec3> pu_positions;
};

/// Linear power gain of a link of length d. Throws ValidationError for d <= 0.
double path_loss(double d, LinkClass link, const PathLossParams& params);

/// Uniform SU/PU placements inside their regions; consumes the rng in a fixed
/// order, so a given seed always produces the same layout.
std::pair<std::vector<Vec3>, std::vector<Vec3>> sample_positions(const NetworkGeometry& geom,
                                                                 Rng& rng);

/// Rayleigh-fading channels: every entry is sqrt(zeta(d)) * tau with
/// tau ~ CN(0,1) and d the center-to-center distance of the link.
ChannelSet generate_channels(const NetworkGeometry& geom, const PathLossParams& params, Rng& rng);

/// FNV-1a hash over the raw entries of all five blocks; identifies a
/// ChannelSet bit-exactly (used by the paired experiment design).
std::uint64_t channel_hash(const ChannelSet& ch);

}  // namespace riscr
