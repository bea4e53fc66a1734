#pragma once

// Data-parallel inner loops. Each kernel has a serial reference and an OpenMP
// version; the pair is kept in sync by tests/test_kernels.cpp and compared in
// bench/bench_kernels.cpp.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "e2boost/channel.hpp"

namespace e2boost::kernels {

/// Block of Monte Carlo trials that shares one RNG stream. The decomposition is
/// fixed so the parallel and serial kernels consume identical random numbers.
inline constexpr std::uint64_t kTrialBlock = 2048;

struct LinkSums {
  std::complex<double> los_sum{};
  double los_magnitude_sum = 0.0;
  double nlos_power = 0.0;
};

LinkSums link_sums_serial(std::span<const Position3D> elements, std::span<const double> phases,
                          const Position3D& bs, const Position3D& dev, const RadioConstants& radio,
                          int cols);
/// Rows are reduced independently and then summed in row order, so the result
/// does not depend on the thread count.
LinkSums link_sums_parallel(std::span<const Position3D> elements, std::span<const double> phases,
                            const Position3D& bs, const Position3D& dev, const RadioConstants& radio,
                            int cols);

/// counts[l * M + m] = number of trials whose SINR on link l reaches thresholds[m].
std::vector<std::uint64_t> count_successes_serial(std::span<const LinkModel> links,
                                                  const RadioConstants& radio,
                                                  std::span<const double> thresholds, std::uint64_t trials,
                                                  std::uint64_t seed);
std::vector<std::uint64_t> count_successes_parallel(std::span<const LinkModel> links,
                                                    const RadioConstants& radio,
                                                    std::span<const double> thresholds, std::uint64_t trials,
                                                    std::uint64_t seed);

/// Element-by-element Rician draw (one scatter term per element), row-blocked RNG streams.
std::complex<double> elementwise_draw_serial(std::span<const Position3D> elements,
                                             std::span<const double> phases, const Position3D& bs,
                                             const Position3D& dev, const RadioConstants& radio, int cols,
                                             std::uint64_t seed);
std::complex<double> elementwise_draw_parallel(std::span<const Position3D> elements,
                                               std::span<const double> phases, const Position3D& bs,
                                               const Position3D& dev, const RadioConstants& radio, int cols,
                                               std::uint64_t seed);

}  // namespace e2boost::kernels
