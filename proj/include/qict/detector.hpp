#pragma once

#include "qict/spectra.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qict {

struct DetectorModel {
  double efficiency = 1.0;
  double dark_rate = 0.0;        ///< counts per second
  double integration_time = 1.0; ///< seconds per scan point
  std::uint64_t rng_seed = 0;
};

void validate(const DetectorModel& det);

/// (rate * rate_scale * efficiency + dark_rate) * integration_time.
double expected_counts(double rate, const DetectorModel& det, double rate_scale);

/// Independent Poisson draws. Draw k depends only on (rng_seed, k), so the
/// result does not depend on evaluation order or thread count.
std::vector<std::int64_t> sample_counts(std::span<const double> means, const DetectorModel& det);

/// One Poisson draw keyed by (seed, index).
std::int64_t poisson_draw(std::uint64_t seed, std::uint64_t index, double mean);

/// Decorrelated child seed for an independent stream (repeat, pixel, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Converts a rate record to mean counts and, if `sample` is set, attaches
/// Poisson-sampled counts.
FringeRecord to_counts(const FringeRecord& rates, const DetectorModel& det, double rate_scale, bool sample);

} // namespace qict
