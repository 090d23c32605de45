#pragma once

#include <complex>

namespace qict {

using Complex = std::complex<double>;

/// Amplitudes of one down-conversion source:
///   C (p s i + q s j + r t i) |0>
/// where (s, i) are the major signal/idler modes, j a lost idler mode and t a
/// lost signal mode. Normalized so |p|^2 + |q|^2 + |r|^2 = 1; the overall
/// pair-generation strength lives in c_gain.
struct PairSourceParams {
  Complex c_gain{1.0, 0.0};
  Complex p{1.0, 0.0};
  Complex q{0.0, 0.0};
  Complex r{0.0, 0.0};

  double norm() const { return std::norm(p) + std::norm(q) + std::norm(r); }
};

struct HeraldingEfficiencies {
  double signal_to_idler = 0.0;
  double idler_to_signal = 0.0;
};

/// Checks the normalization invariant (1e-12). Throws DomainError.
void validate(const PairSourceParams& src);

/// mu_{s->i} = |p|^2/(|p|^2+|q|^2), mu_{i->s} = |p|^2/(|p|^2+|r|^2).
/// Throws UndefinedEfficiencyError if a denominator vanishes.
HeraldingEfficiencies heralding_efficiencies(const PairSourceParams& src);

/// Inverse of heralding_efficiencies under the normalization convention, with
/// zero phases. Both efficiencies must lie in (0, 1].
PairSourceParams from_efficiencies(double mu_s_to_i, double mu_i_to_s);
PairSourceParams from_efficiencies(double mu_s_to_i, double mu_i_to_s, Complex c_gain);

} // namespace qict
