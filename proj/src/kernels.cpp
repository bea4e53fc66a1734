#include "e2boost/kernels.hpp"

#include <cmath>
#include <numbers>

namespace e2boost::kernels {

namespace {

struct ElementTerm {
  std::complex<double> los;
  double magnitude;
  double nlos;
};

inline ElementTerm element_term(const Position3D& e, double phase, const Position3D& bs, const Position3D& dev,
                                const RadioConstants& radio, double k, double fc_ghz) {
  const double big_d = distance(bs, e);
  const double small_d = distance(e, dev);
  const double mag = std::sqrt(radio.antenna_gain * std::pow(big_d, -radio.pathloss_exp) *
                               std::pow(small_d, -radio.pathloss_exp));
  const double a = radio.reflection_amplitude;
  // A e^{-j tau} * mag e^{-j k L}
  const double arg = -(phase + k * (big_d + small_d));
  const double pl = nlos_pathloss_uma(big_d + small_d, fc_ghz, dev.z);
  return {std::polar(a * mag, arg), a * mag, a * a * pl};
}

LinkSums row_sums(std::span<const Position3D> elements, std::span<const double> phases, std::size_t begin,
                  std::size_t end, const Position3D& bs, const Position3D& dev, const RadioConstants& radio,
                  double k, double fc_ghz) {
  LinkSums s;
  for (std::size_t e = begin; e < end; ++e) {
    const auto t = element_term(elements[e], phases[e], bs, dev, radio, k, fc_ghz);
    s.los_sum += t.los;
    s.los_magnitude_sum += t.magnitude;
    s.nlos_power += t.nlos;
  }
  return s;
}

// One trial of every link, accumulating threshold hits.
inline void trial_hits(std::span<const LinkModel> links, const RadioConstants& radio,
                       std::span<const double> thresholds, Rng& rng, std::uint64_t* counts) {
  const std::size_t m_count = thresholds.size();
  for (std::size_t l = 0; l < links.size(); ++l) {
    const double sinr = received_sinr(sample_link(links[l], radio.rician_factor, rng), radio);
    // thresholds descend, so scan from the easiest one.
    for (std::size_t m = m_count; m-- > 0;) {
      if (sinr >= thresholds[m]) ++counts[l * m_count + m];
      else break;
    }
  }
}

void block_hits(std::span<const LinkModel> links, const RadioConstants& radio, std::span<const double> thresholds,
                std::uint64_t block, std::uint64_t trials, std::uint64_t seed, std::uint64_t* counts) {
  Rng rng = make_rng(seed, block);
  const std::uint64_t first = block * kTrialBlock;
  const std::uint64_t last = std::min(trials, first + kTrialBlock);
  for (std::uint64_t t = first; t < last; ++t) trial_hits(links, radio, thresholds, rng, counts);
}

std::complex<double> row_draw(std::span<const Position3D> elements, std::span<const double> phases, int row,
                              int cols, const Position3D& bs, const Position3D& dev, const RadioConstants& radio,
                              double k, double fc_ghz, std::uint64_t seed) {
  const auto [w_los, w_nlos] = rician_weights(radio.rician_factor);
  Rng rng = make_rng(seed, static_cast<std::uint64_t>(row));
  std::complex<double> acc{};
  const std::size_t begin = static_cast<std::size_t>(row) * cols;
  for (std::size_t e = begin; e < begin + static_cast<std::size_t>(cols); ++e) {
    const auto t = element_term(elements[e], phases[e], bs, dev, radio, k, fc_ghz);
    // A e^{-j tau} * sqrt(PL) g; the rotation is kept explicit for the per-element form.
    const auto refl = std::polar(radio.reflection_amplitude, -phases[e]);
    const double pl = t.nlos / (radio.reflection_amplitude * radio.reflection_amplitude);
    acc += w_los * t.los + w_nlos * refl * std::sqrt(pl) * sample_cn(rng);
  }
  return acc;
}

}  // namespace

LinkSums link_sums_serial(std::span<const Position3D> elements, std::span<const double> phases,
                          const Position3D& bs, const Position3D& dev, const RadioConstants& radio, int cols) {
  const double k = 2.0 * std::numbers::pi / radio.wavelength();
  const double fc_ghz = radio.carrier_freq / 1e9;
  const std::size_t n = elements.size();
  const std::size_t c = static_cast<std::size_t>(cols);
  LinkSums total;
  for (std::size_t begin = 0; begin < n; begin += c) {
    const auto r = row_sums(elements, phases, begin, std::min(n, begin + c), bs, dev, radio, k, fc_ghz);
    total.los_sum += r.los_sum;
    total.los_magnitude_sum += r.los_magnitude_sum;
    total.nlos_power += r.nlos_power;
  }
  return total;
}

LinkSums link_sums_parallel(std::span<const Position3D> elements, std::span<const double> phases,
                            const Position3D& bs, const Position3D& dev, const RadioConstants& radio, int cols) {
  const double k = 2.0 * std::numbers::pi / radio.wavelength();
  const double fc_ghz = radio.carrier_freq / 1e9;
  const std::size_t n = elements.size();
  const std::size_t c = static_cast<std::size_t>(cols);
  const std::int64_t rows = static_cast<std::int64_t>((n + c - 1) / c);
  std::vector<LinkSums> partial(static_cast<std::size_t>(rows));
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < rows; ++r) {
    const std::size_t begin = static_cast<std::size_t>(r) * c;
    partial[static_cast<std::size_t>(r)] =
        row_sums(elements, phases, begin, std::min(n, begin + c), bs, dev, radio, k, fc_ghz);
  }
  LinkSums total;
  for (const auto& p : partial) {
    total.los_sum += p.los_sum;
    total.los_magnitude_sum += p.los_magnitude_sum;
    total.nlos_power += p.nlos_power;
  }
  return total;
}

std::vector<std::uint64_t> count_successes_serial(std::span<const LinkModel> links, const RadioConstants& radio,
                                                  std::span<const double> thresholds, std::uint64_t trials,
                                                  std::uint64_t seed) {
  std::vector<std::uint64_t> counts(links.size() * thresholds.size(), 0);
  const std::uint64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  for (std::uint64_t b = 0; b < blocks; ++b) block_hits(links, radio, thresholds, b, trials, seed, counts.data());
  return counts;
}

std::vector<std::uint64_t> count_successes_parallel(std::span<const LinkModel> links,
                                                    const RadioConstants& radio,
                                                    std::span<const double> thresholds, std::uint64_t trials,
                                                    std::uint64_t seed) {
  const std::size_t width = links.size() * thresholds.size();
  std::vector<std::uint64_t> counts(width, 0);
  const std::int64_t blocks = static_cast<std::int64_t>((trials + kTrialBlock - 1) / kTrialBlock);
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(width, 0);
#pragma omp for schedule(dynamic)
    for (std::int64_t b = 0; b < blocks; ++b)
      block_hits(links, radio, thresholds, static_cast<std::uint64_t>(b), trials, seed, local.data());
#pragma omp critical
    for (std::size_t i = 0; i < width; ++i) counts[i] += local[i];
  }
  return counts;
}

std::complex<double> elementwise_draw_serial(std::span<const Position3D> elements, std::span<const double> phases,
                                             const Position3D& bs, const Position3D& dev,
                                             const RadioConstants& radio, int cols, std::uint64_t seed) {
  const double k = 2.0 * std::numbers::pi / radio.wavelength();
  const double fc_ghz = radio.carrier_freq / 1e9;
  const int rows = static_cast<int>(elements.size() / static_cast<std::size_t>(cols));
  std::complex<double> acc{};
  for (int r = 0; r < rows; ++r) acc += row_draw(elements, phases, r, cols, bs, dev, radio, k, fc_ghz, seed);
  return acc;
}

std::complex<double> elementwise_draw_parallel(std::span<const Position3D> elements,
                                               std::span<const double> phases, const Position3D& bs,
                                               const Position3D& dev, const RadioConstants& radio, int cols,
                                               std::uint64_t seed) {
  const double k = 2.0 * std::numbers::pi / radio.wavelength();
  const double fc_ghz = radio.carrier_freq / 1e9;
  const int rows = static_cast<int>(elements.size() / static_cast<std::size_t>(cols));
  std::vector<std::complex<double>> partial(static_cast<std::size_t>(rows));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r)
    partial[static_cast<std::size_t>(r)] = row_draw(elements, phases, r, cols, bs, dev, radio, k, fc_ghz, seed);
  std::complex<double> acc{};
  for (const auto& p : partial) acc += p;
  return acc;
}

}  // namespace e2boost::kernels
