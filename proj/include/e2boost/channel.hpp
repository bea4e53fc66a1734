#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "e2boost/netmodel.hpp"
#include "e2boost/rng.hpp"

namespace e2boost {

using ComplexGain = std::complex<double>;

/// Quantized RIS phase profile: tau = pi * rho / 2^(b-1) with rho in [0, 2^b - 1].
struct PhaseShiftMatrix {
  int rows = 0;
  int cols = 0;
  int pin_bits = 8;
  std::vector<int> codes;  // row-major rho values

  double phase(std::size_t element) const;
  std::vector<double> phases() const;
};

double phase_from_code(int rho, int pin_bits);

/// A * exp(-j tau(rho)). Throws std::domain_error if rho is outside [0, 2^b - 1].
ComplexGain reflection_factor(int rho, int pin_bits, double amplitude);

/// Deterministic BS-element-device path: sqrt(G D^-i d^-i) exp(-j 2pi/lambda (D + d)).
/// Throws std::domain_error on a zero distance.
ComplexGain los_component(const Position3D& bs, const Position3D& elem, const Position3D& dev,
                          const RadioConstants& radio);

/// 3GPP UMa NLoS power gain (linear) at distance d [m], carrier fc [GHz], device height h [m].
double nlos_pathloss_uma(double distance, double fc_ghz, double device_height);

/// Phases that co-phase the BS-element-target paths:
/// floor(-(2pi/lambda) L * 2^b / 2pi) mod 2^b.
PhaseShiftMatrix optimal_phase_shifts(const RisGeometry& geom, const Position3D& bs, const Position3D& target,
                                      const RadioConstants& radio);
PhaseShiftMatrix constant_phase_shifts(const RisGeometry& geom, int rho, int pin_bits);
PhaseShiftMatrix scenario_phase_shifts(const Scenario& s, int ris);

/// Rician weights sqrt(zeta/(zeta+1)) and sqrt(1/(zeta+1)); zeta = inf gives (1, 0).
std::pair<double, double> rician_weights(double zeta);

/// One draw of sum_e A_e h_e with an independent CN(0, PL_NLoS(L_e)) scatter term per element.
ComplexGain sample_ris_channel(const RisGeometry& geom, const PhaseShiftMatrix& phases, const Position3D& dev,
                               const Position3D& bs, const RadioConstants& radio, Rng& rng);

/// sqrt(rho) g with ln(rho) ~ N(mu, sigma^2), g ~ CN(0, 1).
ComplexGain sample_direct_channel(double shadow_mu, double shadow_sigma, Rng& rng);

ComplexGain sample_cn(Rng& rng);

double received_sinr(ComplexGain effective_gain, const RadioConstants& radio);

/// B * sf / 2^sf * CR in bits/s.
double data_rate(int sf, double bandwidth, double code_rate);

/// Aggregated description of one transmission link. The per-element scatter terms
/// are independent circular Gaussians, so their sum is CN(0, nlos_power) exactly.
struct LinkModel {
  enum class Kind { RisAssisted, Direct };
  Kind kind = Kind::RisAssisted;
  ComplexGain los_sum{};         // sum_e A_e * LoS_e
  double los_magnitude_sum = 0;  // sum_e |A_e * LoS_e|
  double nlos_power = 0;         // sum_e |A_e|^2 PL_NLoS(L_e)
  double shadow_mu = 0;          // direct links
  double shadow_sigma = 0;
};

/// Draws one effective gain from a link model.
ComplexGain sample_link(const LinkModel& link, double rician_factor, Rng& rng);

/// Precomputed links for every (device, RIS) pair and every direct path.
class ChannelModel {
 public:
  explicit ChannelModel(const Scenario& s, bool parallel = true);

  int devices() const { return devices_; }
  int riss() const { return riss_; }
  const LinkModel& ris_link(int device, int ris) const {
    return links_[static_cast<std::size_t>(device) * riss_ + ris];
  }
  const LinkModel& direct_link(int device) const {
    return links_[static_cast<std::size_t>(devices_) * riss_ + device];
  }
  std::span<const LinkModel> links() const { return links_; }
  const RadioConstants& radio() const { return radio_; }

  double sample_ris_sinr(int device, int ris, Rng& rng) const;
  double sample_direct_sinr(int device, Rng& rng) const;

 private:
  int devices_ = 0;
  int riss_ = 0;
  RadioConstants radio_;
  std::vector<LinkModel> links_;  // N*K RIS links followed by N direct links
};

/// Per-arm success probabilities estimated by Monte Carlo over sampled SINRs.
struct SuccessProbTable {
  int devices = 0;
  int riss = 0;
  int sfs = 0;
  std::uint64_t sample_count = 0;
  std::vector<double> ris_assisted;      // [N][K][M], isotonic-repaired
  std::vector<double> direct;            // [N][M], isotonic-repaired
  std::vector<double> raw_ris_assisted;  // as estimated
  std::vector<double> raw_direct;

  double ris(int n, int k, int m) const { return ris_assisted[index(n, k, m)]; }
  double dir(int n, int m) const { return direct[static_cast<std::size_t>(n) * sfs + m]; }
  std::size_t index(int n, int k, int m) const {
    return (static_cast<std::size_t>(n) * riss + k) * sfs + m;
  }
};

/// Pool-adjacent-violators fit of a non-decreasing sequence (equal weights).
std::vector<double> isotonic_non_decreasing(std::span<const double> values);

/// Runs `trials` independent channel draws per link. Deterministic in `seed`
/// regardless of the OpenMP thread count.
SuccessProbTable estimate_success_probs(const Scenario& s, std::uint64_t trials, std::uint64_t seed,
                                        bool parallel = true);
SuccessProbTable estimate_success_probs(const ChannelModel& channel, const SfTable& table,
                                        std::uint64_t trials, std::uint64_t seed, bool parallel = true);

/// Fills repaired tables from raw ones.
void repair_monotonicity(SuccessProbTable& table);

}  // namespace e2boost
