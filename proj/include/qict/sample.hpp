#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace qict {

/// A homogeneous slab. phase_index feeds the Fresnel coefficients and
/// defaults to the group index when not known separately.
struct Layer {
  double thickness = 0.0;
  double group_index = 1.0;
  std::optional<double> phase_index;

  double fresnel_index() const { return phase_index.value_or(group_index); }
};

/// Normal-incidence stack in the idler arm: ambient | layers... | substrate.
/// Interface k separates medium k-1 and k (interface 0 faces the ambient).
struct LayerStack {
  double ambient_index = 1.0;
  std::vector<Layer> layers;
  double substrate_index = 1.0;
  /// Optical roundtrip path of the reference plane measured from the first
  /// interface [m]; subtracted from every path.
  double reference_plane_offset = 0.0;
  /// Per-interface amplitude reflectivity replacing the Fresnel value seen
  /// from above (e.g. a metal coating). Empty or shorter vectors mean Fresnel.
  std::vector<std::optional<double>> interface_reflectivity;

  std::size_t interface_count() const { return layers.size() + 1; }
};

struct ReflectionPath {
  double optical_roundtrip = 0.0; ///< sum of n_g d over traversals minus the reference offset [m]
  double amplitude = 0.0;
  int order = 0;                  ///< number of extra internal roundtrips
};

inline constexpr double kDefaultChromeReflectivity = 0.9;
inline constexpr std::size_t kDefaultPathCap = 100000;

/// Normal-incidence amplitude reflectivity for light in n_from hitting n_to.
double fresnel_reflectivity(double n_from, double n_to);

/// Amplitude transmission n_from -> n_to, 2 n_from / (n_from + n_to).
double fresnel_transmission(double n_from, double n_to);

void validate(const LayerStack& stack);

/// Every bounce sequence with at most max_order internal roundtrips and a
/// nonzero amplitude, sorted by optical_roundtrip. Throws
/// EnumerationLimitError when more than path_cap paths would be produced.
std::vector<ReflectionPath> enumerate_paths(const LayerStack& stack, int max_order,
                                            std::size_t path_cap = kDefaultPathCap);

/// Optical roundtrip position of each interface relative to the reference
/// plane (the order-0 path of that interface, whether or not it reflects).
std::vector<double> interface_positions(const LayerStack& stack);

} // namespace qict
