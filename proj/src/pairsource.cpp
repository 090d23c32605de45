#include "qict/pairsource.hpp"

#include "qict/error.hpp"

#include <cmath>
#include <string>

namespace qict {

void validate(const PairSourceParams& src) {
  if (std::abs(src.norm() - 1.0) > 1e-12) {
    throw DomainError("pair source not normalized: |p|^2+|q|^2+|r|^2 = " + std::to_string(src.norm()));
  }
}

HeraldingEfficiencies heralding_efficiencies(const PairSourceParams& src) {
  const double pp = std::norm(src.p);
  const double signal_den = pp + std::norm(src.q);
  const double idler_den = pp + std::norm(src.r);
  if (signal_den == 0.0 || idler_den == 0.0) {
    throw UndefinedEfficiencyError("heralding efficiency undefined: source emits no signal or no idler photons");
  }
  return {pp / signal_den, pp / idler_den};
}

PairSourceParams from_efficiencies(double mu_s_to_i, double mu_i_to_s) {
  return from_efficiencies(mu_s_to_i, mu_i_to_s, Complex{1.0 / std::sqrt(2.0), 0.0});
}

PairSourceParams from_efficiencies(double mu_s_to_i, double mu_i_to_s, Complex c_gain) {
  auto in_range = [](double mu) { return mu > 0.0 && mu <= 1.0; };
  if (!in_range(mu_s_to_i) || !in_range(mu_i_to_s)) {
    throw DomainError("heralding efficiencies must lie in (0, 1]");
  }
  // |q|^2 = |p|^2 (1/mu_si - 1), |r|^2 = |p|^2 (1/mu_is - 1), total 1.
  const double pp = 1.0 / (1.0 / mu_s_to_i + 1.0 / mu_i_to_s - 1.0);
  const double qq = pp * (1.0 / mu_s_to_i - 1.0);
  const double rr = pp * (1.0 / mu_i_to_s - 1.0);
  return {c_gain, Complex{std::sqrt(pp), 0.0}, Complex{std::sqrt(qq), 0.0}, Complex{std::sqrt(rr), 0.0}};
}

} // namespace qict
