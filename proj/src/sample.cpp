#include "qict/sample.hpp"

#include "qict/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qict {
namespace {

struct InterfaceCoefficients {
  double r_down; ///< reflection for light travelling down (into the stack)
  double r_up;
  double t_down;
  double t_up;
};

std::vector<InterfaceCoefficients> interface_coefficients(const LayerStack& stack) {
  std::vector<double> n;
  n.reserve(stack.layers.size() + 2);
  n.push_back(stack.ambient_index);
  for (const auto& l : stack.layers) n.push_back(l.fresnel_index());
  n.push_back(stack.substrate_index);

  std::vector<InterfaceCoefficients> out;
  for (std::size_t k = 0; k + 1 < n.size(); ++k) {
    InterfaceCoefficients c{fresnel_reflectivity(n[k], n[k + 1]), fresnel_reflectivity(n[k + 1], n[k]),
                            fresnel_transmission(n[k], n[k + 1]), fresnel_transmission(n[k + 1], n[k])};
    if (k < stack.interface_reflectivity.size() && stack.interface_reflectivity[k]) {
      // Lossless override: keep t_down t_up = 1 - r^2 and r_up = -r_down.
      const double r = *stack.interface_reflectivity[k];
      const double t = std::sqrt(std::max(0.0, 1.0 - r * r));
      c = {r, -r, t, t};
    }
    out.push_back(c);
  }
  return out;
}

struct Walker {
  const std::vector<InterfaceCoefficients>& coeff;
  std::vector<double> layer_opl; ///< one-way n_g d of each layer
  int max_order;
  std::size_t cap;
  double offset;
  std::vector<ReflectionPath> paths;

  // Light travelling down inside medium `medium` (0 = ambient) about to hit
  // interface `medium`.
  void down(std::size_t medium, double amp, double opl, int order) {
    const std::size_t iface = medium;
    if (iface >= coeff.size()) return;
    const auto& c = coeff[iface];
    if (c.r_down != 0.0) up(medium, amp * c.r_down, opl, order);
    if (c.t_down != 0.0 && iface + 1 < coeff.size()) {
      down(medium + 1, amp * c.t_down, opl + layer_opl[medium], order);
    }
  }

  // Light just reflected at the bottom of `medium`, about to climb it.
  void up(std::size_t medium, double amp, double opl, int order) {
    if (medium == 0) {
      emit(amp, opl, order);
      return;
    }
    const auto& c = coeff[medium - 1];
    const double climbed = opl + layer_opl[medium - 1];
    if (c.t_up != 0.0) up(medium - 1, amp * c.t_up, climbed, order);
    if (c.r_up != 0.0 && order < max_order) {
      down(medium, amp * c.r_up, opl + 2.0 * layer_opl[medium - 1], order + 1);
    }
  }

  void emit(double amp, double opl, int order) {
    if (paths.size() >= cap) {
      throw EnumerationLimitError("reflection path enumeration exceeded cap of " + std::to_string(cap) + " paths");
    }
    paths.push_back({opl - offset, amp, order});
  }
};

} // namespace

double fresnel_reflectivity(double n_from, double n_to) { return (n_from - n_to) / (n_from + n_to); }

double fresnel_transmission(double n_from, double n_to) { return 2.0 * n_from / (n_from + n_to); }

void validate(const LayerStack& stack) {
  if (!(stack.ambient_index >= 1.0) || !(stack.substrate_index >= 1.0)) {
    throw DomainError("ambient and substrate indices must be >= 1");
  }
  for (std::size_t k = 0; k < stack.layers.size(); ++k) {
    const auto& l = stack.layers[k];
    const std::string where = "layers[" + std::to_string(k) + "]";
    if (!(l.thickness >= 0.0)) throw DomainError(where + ".thickness must be >= 0");
    if (!(l.group_index >= 1.0)) throw DomainError(where + ".group_index must be >= 1");
    if (!(l.fresnel_index() >= 1.0)) throw DomainError(where + ".phase_index must be >= 1");
  }
  if (!std::isfinite(stack.reference_plane_offset)) throw DomainError("reference_plane_offset must be finite");
  if (stack.interface_reflectivity.size() > stack.interface_count()) {
    throw DomainError("interface_reflectivity has more entries than interfaces");
  }
  for (const auto& r : stack.interface_reflectivity) {
    if (r && !(std::abs(*r) <= 1.0)) throw DomainError("interface_reflectivity must lie in [-1, 1]");
  }
}

std::vector<ReflectionPath> enumerate_paths(const LayerStack& stack, int max_order, std::size_t path_cap) {
  if (max_order < 0) throw DomainError("max_order must be >= 0");
  validate(stack);
  const auto coeff = interface_coefficients(stack);
  Walker w{coeff, {}, max_order, path_cap, stack.reference_plane_offset, {}};
  for (const auto& l : stack.layers) w.layer_opl.push_back(l.group_index * l.thickness);
  w.down(0, 1.0, 0.0, 0);
  std::stable_sort(w.paths.begin(), w.paths.end(), [](const ReflectionPath& a, const ReflectionPath& b) {
    return a.optical_roundtrip < b.optical_roundtrip;
  });
  return std::move(w.paths);
}

std::vector<double> interface_positions(const LayerStack& stack) {
  std::vector<double> out;
  double opl = 0.0;
  out.push_back(-stack.reference_plane_offset);
  for (const auto& l : stack.layers) {
    opl += 2.0 * l.group_index * l.thickness;
    out.push_back(opl - stack.reference_plane_offset);
  }
  return out;
}

} // namespace qict
