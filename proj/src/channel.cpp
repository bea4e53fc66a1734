#include "e2boost/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "e2boost/kernels.hpp"

namespace e2boost {

double phase_from_code(int rho, int pin_bits) {
  return std::numbers::pi * static_cast<double>(rho) / std::ldexp(1.0, pin_bits - 1);
}

double PhaseShiftMatrix::phase(std::size_t element) const { return phase_from_code(codes[element], pin_bits); }

std::vector<double> PhaseShiftMatrix::phases() const {
  std::vector<double> out(codes.size());
  for (std::size_t e = 0; e < codes.size(); ++e) out[e] = phase(e);
  return out;
}

ComplexGain reflection_factor(int rho, int pin_bits, double amplitude) {
  if (pin_bits < 1) throw std::domain_error("pin_bits must be >= 1");
  const int max_code = (1 << pin_bits) - 1;
  if (rho < 0 || rho > max_code) throw std::domain_error("phase code out of range");
  if (!(amplitude > 0.0 && amplitude <= 1.0)) throw std::domain_error("reflection amplitude must be in (0, 1]");
  return std::polar(amplitude, -phase_from_code(rho, pin_bits));
}

ComplexGain los_component(const Position3D& bs, const Position3D& elem, const Position3D& dev,
                          const RadioConstants& radio) {
  const double big_d = distance(bs, elem);
  const double small_d = distance(elem, dev);
  if (!(big_d > 0.0) || !(small_d > 0.0)) throw std::domain_error("zero link distance");
  const double mag = std::sqrt(radio.antenna_gain * std::pow(big_d, -radio.pathloss_exp) *
                               std::pow(small_d, -radio.pathloss_exp));
  const double k = 2.0 * std::numbers::pi / radio.wavelength();
  return std::polar(mag, -k * (big_d + small_d));
}

double nlos_pathloss_uma(double distance, double fc_ghz, double device_height) {
  const double pl_db =
      13.54 + 39.08 * std::log10(distance) + 20.0 * std::log10(fc_ghz) - 0.6 * (device_height - 1.5);
  return std::pow(10.0, -pl_db / 10.0);
}

PhaseShiftMatrix optimal_phase_shifts(const RisGeometry& geom, const Position3D& bs, const Position3D& target,
                                      const RadioConstants& radio) {
  PhaseShiftMatrix p{geom.rows, geom.cols, radio.pin_bits, {}};
  p.codes.reserve(geom.elements.size());
  const double k = 2.0 * std::numbers::pi / radio.wavelength();
  const double levels = std::ldexp(1.0, radio.pin_bits);
  const long long modulus = 1LL << radio.pin_bits;
  for (const auto& e : geom.elements) {
    const double path = distance(bs, e) + distance(e, target);
    // Reference phase constant taken as 0.
    const auto step = static_cast<long long>(std::floor(-k * path * levels / (2.0 * std::numbers::pi)));
    p.codes.push_back(static_cast<int>(((step % modulus) + modulus) % modulus));
  }
  return p;
}

PhaseShiftMatrix constant_phase_shifts(const RisGeometry& geom, int rho, int pin_bits) {
  if (rho < 0 || rho > (1 << pin_bits) - 1) throw std::domain_error("phase code out of range");
  return {geom.rows, geom.cols, pin_bits, std::vector<int>(geom.elements.size(), rho)};
}

PhaseShiftMatrix scenario_phase_shifts(const Scenario& s, int ris) {
  const auto& geom = s.riss[static_cast<std::size_t>(ris)];
  if (s.phase.mode == PhaseMode::Constant) return constant_phase_shifts(geom, s.phase.rho, s.radio.pin_bits);
  return optimal_phase_shifts(geom, s.bs, s.ue_centroid(), s.radio);
}

std::pair<double, double> rician_weights(double zeta) {
  if (std::isinf(zeta)) return {1.0, 0.0};
  return {std::sqrt(zeta / (zeta + 1.0)), std::sqrt(1.0 / (zeta + 1.0))};
}

ComplexGain sample_cn(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::numbers::sqrt2 / 2.0);
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

ComplexGain sample_ris_channel(const RisGeometry& geom, const PhaseShiftMatrix& phases, const Position3D& dev,
                               const Position3D& bs, const RadioConstants& radio, Rng& rng) {
  const auto [w_los, w_nlos] = rician_weights(radio.rician_factor);
  const double fc_ghz = radio.carrier_freq / 1e9;
  ComplexGain acc{};
  for (std::size_t e = 0; e < geom.elements.size(); ++e) {
    const auto& el = geom.elements[e];
    const auto refl = std::polar(radio.reflection_amplitude, -phases.phase(e));
    const auto los = los_component(bs, el, dev, radio);
    ComplexGain h = w_los * los;
    if (w_nlos > 0.0) {
      const double pl = nlos_pathloss_uma(distance(bs, el) + distance(el, dev), fc_ghz, dev.z);
      h += w_nlos * std::sqrt(pl) * sample_cn(rng);
    }
    acc += refl * h;
  }
  return acc;
}

ComplexGain sample_direct_channel(double shadow_mu, double shadow_sigma, Rng& rng) {
  double ln_rho = shadow_mu;
  if (shadow_sigma > 0.0) ln_rho += shadow_sigma * std::normal_distribution<double>(0.0, 1.0)(rng);
  return std::sqrt(std::exp(ln_rho)) * sample_cn(rng);
}

double received_sinr(ComplexGain effective_gain, const RadioConstants& radio) {
  return radio.tx_power * std::norm(effective_gain) / radio.noise_plus_interference();
}

double data_rate(int sf, double bandwidth, double code_rate) {
  return bandwidth * static_cast<double>(sf) / std::ldexp(1.0, sf) * code_rate;
}

ComplexGain sample_link(const LinkModel& link, double rician_factor, Rng& rng) {
  if (link.kind == LinkModel::Kind::Direct) return sample_direct_channel(link.shadow_mu, link.shadow_sigma, rng);
  const auto [w_los, w_nlos] = rician_weights(rician_factor);
  ComplexGain h = w_los * link.los_sum;
  if (w_nlos > 0.0) h += w_nlos * std::sqrt(link.nlos_power) * sample_cn(rng);
  return h;
}

ChannelModel::ChannelModel(const Scenario& s, bool parallel)
    : devices_(s.device_count()), riss_(s.ris_count()), radio_(s.radio) {
  links_.resize(static_cast<std::size_t>(devices_) * riss_ + devices_);
  for (int k = 0; k < riss_; ++k) {
    const auto& geom = s.riss[static_cast<std::size_t>(k)];
    const auto phases = scenario_phase_shifts(s, k).phases();
    for (int n = 0; n < devices_; ++n) {
      const auto& dev = s.devices[static_cast<std::size_t>(n)];
      const auto sums = parallel ? kernels::link_sums_parallel(geom.elements, phases, s.bs, dev, radio_, geom.cols)
                                 : kernels::link_sums_serial(geom.elements, phases, s.bs, dev, radio_, geom.cols);
      auto& l = links_[static_cast<std::size_t>(n) * riss_ + k];
      l.kind = LinkModel::Kind::RisAssisted;
      l.los_sum = sums.los_sum;
      l.los_magnitude_sum = sums.los_magnitude_sum;
      l.nlos_power = sums.nlos_power;
    }
  }
  for (int n = 0; n < devices_; ++n) {
    auto& l = links_[static_cast<std::size_t>(devices_) * riss_ + n];
    l.kind = LinkModel::Kind::Direct;
    l.shadow_mu = s.shadow_mu_for(n);
    l.shadow_sigma = s.radio.shadow_sigma;
  }
}

double ChannelModel::sample_ris_sinr(int device, int ris, Rng& rng) const {
  return received_sinr(sample_link(ris_link(device, ris), radio_.rician_factor, rng), radio_);
}

double ChannelModel::sample_direct_sinr(int device, Rng& rng) const {
  return received_sinr(sample_link(direct_link(device), radio_.rician_factor, rng), radio_);
}

std::vector<double> isotonic_non_decreasing(std::span<const double> values) {
  // Blocks of (mean, size); merge while the previous block mean exceeds the current one.
  std::vector<double> mean;
  std::vector<std::size_t> size;
  for (double v : values) {
    mean.push_back(v);
    size.push_back(1);
    while (mean.size() > 1 && mean[mean.size() - 2] > mean.back()) {
      const std::size_t n1 = size[size.size() - 2], n2 = size.back();
      const double m = (mean[mean.size() - 2] * static_cast<double>(n1) + mean.back() * static_cast<double>(n2)) /
                       static_cast<double>(n1 + n2);
      mean.pop_back();
      size.pop_back();
      mean.back() = m;
      size.back() = n1 + n2;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t b = 0; b < mean.size(); ++b) out.insert(out.end(), size[b], mean[b]);
  return out;
}

void repair_monotonicity(SuccessProbTable& t) {
  const auto m = static_cast<std::size_t>(t.sfs);
  t.ris_assisted = t.raw_ris_assisted;
  t.direct = t.raw_direct;
  auto fix = [m](std::vector<double>& v) {
    for (std::size_t row = 0; row + m <= v.size(); row += m) {
      const auto fitted = isotonic_non_decreasing(std::span<const double>(v.data() + row, m));
      std::copy(fitted.begin(), fitted.end(), v.begin() + static_cast<std::ptrdiff_t>(row));
    }
  };
  fix(t.ris_assisted);
  fix(t.direct);
}

SuccessProbTable estimate_success_probs(const ChannelModel& channel, const SfTable& table, std::uint64_t trials,
                                        std::uint64_t seed, bool parallel) {
  SuccessProbTable t;
  t.devices = channel.devices();
  t.riss = channel.riss();
  t.sfs = table.size();
  t.sample_count = trials;
  const auto counts =
      parallel ? kernels::count_successes_parallel(channel.links(), channel.radio(), table.thresholds, trials, seed)
               : kernels::count_successes_serial(channel.links(), channel.radio(), table.thresholds, trials, seed);
  const auto m = static_cast<std::size_t>(t.sfs);
  const std::size_t ris_links = static_cast<std::size_t>(t.devices) * t.riss;
  const double denom = trials > 0 ? static_cast<double>(trials) : 1.0;
  t.raw_ris_assisted.resize(ris_links * m);
  t.raw_direct.resize(static_cast<std::size_t>(t.devices) * m);
  for (std::size_t i = 0; i < ris_links * m; ++i) t.raw_ris_assisted[i] = static_cast<double>(counts[i]) / denom;
  for (std::size_t i = 0; i < t.raw_direct.size(); ++i)
    t.raw_direct[i] = static_cast<double>(counts[ris_links * m + i]) / denom;
  repair_monotonicity(t);
  return t;
}

SuccessProbTable estimate_success_probs(const Scenario& s, std::uint64_t trials, std::uint64_t seed,
                                        bool parallel) {
  const ChannelModel channel(s, parallel);
  return estimate_success_probs(channel, s.sf_table, trials, seed, parallel);
}

}  // namespace e2boost
