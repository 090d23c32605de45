#include "qict/interferometer.hpp"

#include "qict/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qict {
namespace {

void require_unit_interval(double v, const char* field) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(std::string(field) + " must lie in [0, 1]");
  }
}

struct TermBuilder {
  std::vector<ModeTerm> terms;

  void add(SignalMode s, IdlerMode i, Complex fixed, Complex phased) {
    if (fixed == Complex{} && phased == Complex{}) return;
    for (auto& t : terms) {
      if (t.signal == s && t.idler == i) {
        t.fixed += fixed;
        t.phased += phased;
        return;
      }
    }
    terms.push_back({s, i, fixed, phased});
  }
};

} // namespace

double idler_wavelength(double lambda_pump, double lambda_s0) {
  return 1.0 / (1.0 / lambda_pump - 1.0 / lambda_s0);
}

InterferometerConfig make_config(const PairSourceParams& src1, const PairSourceParams& src2,
                                 double lambda_pump, double lambda_s0) {
  InterferometerConfig cfg;
  cfg.src1 = src1;
  cfg.src2 = src2;
  cfg.lambda_pump = lambda_pump;
  cfg.lambda_s0 = lambda_s0;
  cfg.lambda_i0 = idler_wavelength(lambda_pump, lambda_s0);
  return cfg;
}

void validate(const InterferometerConfig& cfg) {
  validate(cfg.src1);
  validate(cfg.src2);
  require_unit_interval(cfg.eta_s, "eta_s");
  require_unit_interval(cfg.eta_i, "eta_i");
  if (!(cfg.lambda_s0 > 0.0 && cfg.lambda_i0 > 0.0 && cfg.lambda_pump > 0.0)) {
    throw DomainError("wavelengths must be positive");
  }
  const double pump = 1.0 / cfg.lambda_pump;
  const double pair = 1.0 / cfg.lambda_s0 + 1.0 / cfg.lambda_i0;
  if (std::abs(pump - pair) > 1e-6 * pump) {
    throw DomainError("lambda_pump/lambda_s0/lambda_i0 violate energy conservation");
  }
  for (double v : {cfg.phi, cfg.phi0, cfg.tau0, cfg.tau1, cfg.tau2}) {
    if (!std::isfinite(v)) throw DomainError("phases and delays must be finite");
  }
}

double delay_mismatch_length(const InterferometerConfig& cfg) {
  return kSpeedOfLight * (cfg.tau0 - (cfg.tau1 - cfg.tau2));
}

std::pair<Complex, Complex> balanced_gains(const PairSourceParams& src1, const PairSourceParams& src2) {
  const double singles1 = std::norm(src1.p) + std::norm(src1.q);
  const double singles2 = std::norm(src2.p) + std::norm(src2.q);
  if (singles1 == 0.0 || singles2 == 0.0) {
    throw DomainError("balanced_gains: a source emits no signal photons");
  }
  // |C1|^2 = s2/(s1+s2), |C2|^2 = s1/(s1+s2)
  const double total = singles1 + singles2;
  return {Complex{std::sqrt(singles2 / total), 0.0}, Complex{std::sqrt(singles1 / total), 0.0}};
}

std::string_view label(SignalMode mode) {
  switch (mode) {
  case SignalMode::s1: return "s1";
  case SignalMode::s2: return "s2";
  case SignalMode::s3: return "s3";
  case SignalMode::t1: return "t1";
  case SignalMode::t2: return "t2";
  }
  return "?";
}

std::string_view label(IdlerMode mode) {
  switch (mode) {
  case IdlerMode::i1: return "i1";
  case IdlerMode::i2: return "i2";
  case IdlerMode::i3: return "i3";
  case IdlerMode::j1: return "j1";
  case IdlerMode::j2: return "j2";
  }
  return "?";
}

Complex ModeTerm::amplitude(double phi) const { return fixed + phased * std::polar(1.0, phi); }

const ModeTerm* ModeAmplitudeState::find(SignalMode s, IdlerMode i) const {
  auto it = std::find_if(terms.begin(), terms.end(),
                         [&](const ModeTerm& t) { return t.signal == s && t.idler == i; });
  return it == terms.end() ? nullptr : &*it;
}

double ModeAmplitudeState::total_probability(double phi_applied) const {
  double sum = 0.0;
  for (const auto& t : terms) sum += std::norm(t.amplitude(phi_applied));
  return sum;
}

ModeAmplitudeState expand_final_state(const InterferometerConfig& cfg) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const double ts = std::sqrt(cfg.eta_s);
  const double ls = std::sqrt(1.0 - cfg.eta_s);
  const double ti = std::sqrt(cfg.eta_i);
  const double li = std::sqrt(1.0 - cfg.eta_i);
  const auto& a = cfg.src1;
  const auto& b = cfg.src2;
  const IdlerMode shared = cfg.merge_idlers ? IdlerMode::i1 : IdlerMode::i2;
  const Complex offset = std::polar(1.0, cfg.phi0);
  const Complex zero{};

  TermBuilder out;
  // Source 1: signal -> attenuator -> {s1, s2} or s3; idler -> eta_i -> i1 or i3.
  const Complex cp = a.c_gain * a.p;
  const Complex cq = a.c_gain * a.q;
  const Complex cr = a.c_gain * a.r;
  for (auto [port, sign] : {std::pair{SignalMode::s1, 1.0}, std::pair{SignalMode::s2, 1.0}}) {
    out.add(port, IdlerMode::i1, cp * (sign * ts * inv_sqrt2 * ti), zero);
    out.add(port, IdlerMode::i3, cp * (sign * ts * inv_sqrt2 * li), zero);
    out.add(port, IdlerMode::j1, cq * (sign * ts * inv_sqrt2), zero);
  }
  out.add(SignalMode::s3, IdlerMode::i1, cp * (ls * ti), zero);
  out.add(SignalMode::s3, IdlerMode::i3, cp * (ls * li), zero);
  out.add(SignalMode::s3, IdlerMode::j1, cq * ls, zero);
  out.add(SignalMode::t1, IdlerMode::i1, cr * ti, zero);
  out.add(SignalMode::t1, IdlerMode::i3, cr * li, zero);

  // Source 2: signal -> phase shifter -> (s1 - s2)/sqrt2; idler shares i1.
  const Complex dp = b.c_gain * b.p * offset;
  const Complex dq = b.c_gain * b.q * offset;
  const Complex dr = b.c_gain * b.r;
  for (auto [port, sign] : {std::pair{SignalMode::s1, 1.0}, std::pair{SignalMode::s2, -1.0}}) {
    out.add(port, shared, zero, dp * (sign * inv_sqrt2));
    out.add(port, IdlerMode::j2, zero, dq * (sign * inv_sqrt2));
  }
  out.add(SignalMode::t2, shared, dr, zero);

  return {std::move(out.terms), cfg.phi};
}

double mean_signal_rate(const InterferometerConfig& cfg) {
  const double c1 = std::norm(cfg.src1.c_gain);
  const double c2 = std::norm(cfg.src2.c_gain);
  return 0.5 * (c1 * std::norm(cfg.src1.p) * cfg.eta_s + c2 * std::norm(cfg.src2.p) +
                c1 * std::norm(cfg.src1.q) * cfg.eta_s + c2 * std::norm(cfg.src2.q));
}

double interference_amplitude(const InterferometerConfig& cfg) {
  if (!cfg.merge_idlers) return 0.0;
  return std::abs(cfg.src1.c_gain * cfg.src2.c_gain * cfg.src1.p * cfg.src2.p) * std::sqrt(cfg.eta_s) *
         std::sqrt(cfg.eta_i);
}

double effective_phase_offset(const InterferometerConfig& cfg) {
  const double theta = std::arg(cfg.src1.c_gain * cfg.src1.p) - std::arg(cfg.src2.c_gain * cfg.src2.p);
  return cfg.phi0 - theta + kPi / 2.0;
}

double signal_rate(const InterferometerConfig& cfg, double phi) {
  return mean_signal_rate(cfg) + interference_amplitude(cfg) * std::sin(phi + effective_phase_offset(cfg));
}

double signal_rate_oracle(const ModeAmplitudeState& state, double phi_applied) {
  double rate = 0.0;
  for (const auto& t : state.terms) {
    if (t.signal == SignalMode::s1) rate += std::norm(t.amplitude(phi_applied));
  }
  return rate;
}

double fringe_visibility(const InterferometerConfig& cfg) {
  const auto& a = cfg.src1;
  const auto& b = cfg.src2;
  const double den = (std::norm(a.p) + std::norm(a.q)) * std::norm(a.c_gain) * cfg.eta_s +
                     (std::norm(b.p) + std::norm(b.q)) * std::norm(b.c_gain);
  if (den == 0.0) throw UndefinedVisibilityError("fringe visibility undefined: no signal photons reach the detector");
  return 2.0 * interference_amplitude(cfg) / den;
}

std::vector<VisibilityPoint> sweep_arm_loss(const InterferometerConfig& cfg, Arm arm,
                                            std::span<const double> transmission_grid,
                                            bool idler_double_pass) {
  std::vector<VisibilityPoint> out;
  out.reserve(transmission_grid.size());
  for (double t : transmission_grid) {
    require_unit_interval(t, "transmission");
    InterferometerConfig c = cfg;
    if (arm == Arm::idler) {
      c.eta_i = idler_double_pass ? t * t : t;
    } else {
      c.eta_s = t;
    }
    out.push_back({t, fringe_visibility(c)});
  }
  return out;
}

} // namespace qict

namespace qict {

void set_delay_mismatch(InterferometerConfig& cfg, double length) {
  cfg.tau0 = length / kSpeedOfLight;
  cfg.tau1 = 0.0;
  cfg.tau2 = 0.0;
}

} // namespace qict
