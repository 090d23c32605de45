#pragma once

#include "qict/pairsource.hpp"

#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace qict {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

/// Hybrid two-crystal interferometer. Source 1 signal passes the attenuator
/// eta_s and the variable delay; source 1 idler passes eta_i (or the sample)
/// before seeding source 2. The phase shifter acts on the source-2 signal.
struct InterferometerConfig {
  PairSourceParams src1;
  PairSourceParams src2;
  double eta_s = 1.0;
  double eta_i = 1.0;
  double phi = 0.0;
  double phi0 = 0.0;
  double tau0 = 0.0; ///< idler transit DC1 -> DC2 [s]
  double tau1 = 0.0; ///< s1 transit to the combining splitter [s]
  double tau2 = 0.0; ///< s2 transit to the combining splitter [s]
  double lambda_s0 = 810e-9;
  double lambda_i0 = 1550.1e-9;
  double lambda_pump = 532e-9;
  /// Identify the two sources' idler modes before tracing. Turning this off
  /// makes the idlers distinguishable and removes all interference.
  bool merge_idlers = true;
};

/// Builds a config whose idler wavelength follows from energy conservation.
InterferometerConfig make_config(const PairSourceParams& src1, const PairSourceParams& src2,
                                 double lambda_pump = 532e-9, double lambda_s0 = 810e-9);

double idler_wavelength(double lambda_pump, double lambda_s0);

/// Throws DomainError naming the offending field.
void validate(const InterferometerConfig& cfg);

/// Group-delay mismatch tau0 - (tau1 - tau2) expressed as a length [m].
double delay_mismatch_length(const InterferometerConfig& cfg);

/// Gains (C1, C2) with |C1|^2 + |C2|^2 = 1 that equalize the signal singles
/// of the two sources, |C1|^2 (|p1|^2+|q1|^2) = |C2|^2 (|p2|^2+|q2|^2).
std::pair<Complex, Complex> balanced_gains(const PairSourceParams& src1, const PairSourceParams& src2);

enum class SignalMode { s1, s2, s3, t1, t2 };
enum class IdlerMode { i1, i2, i3, j1, j2 };

std::string_view label(SignalMode mode);
std::string_view label(IdlerMode mode);

/// One two-photon term. Its amplitude is fixed + phased * exp(i phi) where phi
/// is the phase-shifter setting; phi0 is already folded into `phased`.
struct ModeTerm {
  SignalMode signal;
  IdlerMode idler;
  Complex fixed;
  Complex phased;

  Complex amplitude(double phi) const;
};

struct ModeAmplitudeState {
  std::vector<ModeTerm> terms;
  double phi = 0.0; ///< phase-shifter setting the state was expanded at

  const ModeTerm* find(SignalMode s, IdlerMode i) const;
  double total_probability() const { return total_probability(phi); }
  double total_probability(double phi_applied) const;
};

/// Expands the propagated two-photon state into (signal, idler) mode terms,
/// combining equal labels. Contributions with a structurally zero coefficient
/// are dropped.
ModeAmplitudeState expand_final_state(const InterferometerConfig& cfg);

/// phi-independent part of the detected signal rate.
double mean_signal_rate(const InterferometerConfig& cfg);

/// Phase offset phi0' such that signal_rate = mean + A sin(phi + phi0').
double effective_phase_offset(const InterferometerConfig& cfg);

/// Amplitude of the interference term, |C1 C2 p1 p2| sqrt(eta_s eta_i).
double interference_amplitude(const InterferometerConfig& cfg);

/// Closed-form detected rate at phase-shifter setting phi.
double signal_rate(const InterferometerConfig& cfg, double phi);

/// Rate obtained by projecting onto s1 after tracing out every idler mode:
/// sum over idler labels of |amplitude(s1, idler)|^2.
double signal_rate_oracle(const ModeAmplitudeState& state, double phi_applied);

/// Closed-form fringe contrast. Throws UndefinedVisibilityError if both
/// sources are dark at the detector.
double fringe_visibility(const InterferometerConfig& cfg);

enum class Arm { signal, idler };

struct VisibilityPoint {
  double transmission;
  double gamma;
};

/// Visibility while attenuating one arm. With idler_double_pass the idler
/// filter is crossed twice, so the effective eta_i is T^2.
std::vector<VisibilityPoint> sweep_arm_loss(const InterferometerConfig& cfg, Arm arm,
                                            std::span<const double> transmission_grid,
                                            bool idler_double_pass);

} // namespace qict

namespace qict {

/// Sets tau0 = length / c and tau1 = tau2 = 0 so delay_mismatch_length == length.
void set_delay_mismatch(InterferometerConfig& cfg, double length);

} // namespace qict
