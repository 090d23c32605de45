#include "qict/detector.hpp"

#include "qict/error.hpp"

#include <cmath>
#include <random>

namespace qict {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

} // namespace

void validate(const DetectorModel& det) {
  if (!(det.efficiency >= 0.0 && det.efficiency <= 1.0)) throw DomainError("detector.efficiency must lie in [0, 1]");
  if (!(det.dark_rate >= 0.0)) throw DomainError("detector.dark_rate must be >= 0");
  if (!(det.integration_time > 0.0)) throw DomainError("detector.integration_time must be > 0");
}

double expected_counts(double rate, const DetectorModel& det, double rate_scale) {
  if (!(rate >= 0.0)) throw DomainError("expected_counts: rate must be >= 0");
  return (rate * rate_scale * det.efficiency + det.dark_rate) * det.integration_time;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

std::int64_t poisson_draw(std::uint64_t seed, std::uint64_t index, double mean) {
  if (!(mean >= 0.0)) throw DomainError("poisson_draw: mean must be >= 0");
  if (mean == 0.0) return 0;
  std::mt19937_64 engine(derive_seed(seed, index));
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(engine);
}

std::vector<std::int64_t> sample_counts(std::span<const double> means, const DetectorModel& det) {
  std::vector<std::int64_t> out(means.size());
  for (std::size_t k = 0; k < means.size(); ++k) out[k] = poisson_draw(det.rng_seed, k, means[k]);
  return out;
}

FringeRecord to_counts(const FringeRecord& rates, const DetectorModel& det, double rate_scale, bool sample) {
  validate(det);
  FringeRecord out = rates;
  out.sampled.reset();
  for (auto& v : out.expected) v = expected_counts(v, det, rate_scale);
  if (sample) {
    const auto draws = sample_counts(out.expected, det);
    out.sampled.emplace(draws.begin(), draws.end());
  }
  return out;
}

} // namespace qict
