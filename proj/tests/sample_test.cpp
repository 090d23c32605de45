#include "qict/error.hpp"
#include "qict/sample.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace qict;

namespace {

LayerStack sample1() {
  LayerStack s;
  s.layers = {{0.442e-3, 1.77, {}}, {0.431e-3, 1.0, {}}};
  s.substrate_index = 3.61;
  return s;
}

LayerStack slab(double d, double n) {
  LayerStack s;
  s.layers = {{d, n, {}}};
  return s;
}

double r(double a, double b) { return (a - b) / (a + b); }
double t(double a, double b) { return 2.0 * a / (a + b); }

} // namespace

TEST_CASE("Fresnel coefficients") {
  CHECK(fresnel_reflectivity(1.0, 1.0) == 0.0);
  CHECK(fresnel_reflectivity(1.0, 3.61) == doctest::Approx(-2.61 / 4.61).epsilon(1e-15));
  CHECK(fresnel_reflectivity(1.0, 3.61) == doctest::Approx(-0.566).epsilon(1e-3));
  CHECK(fresnel_reflectivity(1.77, 1.0) == doctest::Approx(0.278).epsilon(1e-3));
  for (auto [a, b] : {std::pair{1.0, 3.61}, std::pair{1.77, 1.0}, std::pair{1.5, 2.2}}) {
    const double rr = fresnel_reflectivity(a, b);
    CHECK(fresnel_transmission(a, b) * fresnel_transmission(b, a) == doctest::Approx(1.0 - rr * rr).epsilon(1e-14));
  }
}

TEST_CASE("single mirror at the reference plane") {
  LayerStack mirror;
  mirror.interface_reflectivity = {1.0};
  const auto paths = enumerate_paths(mirror, 2);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].optical_roundtrip == 0.0);
  CHECK(paths[0].amplitude == 1.0);
  CHECK(paths[0].order == 0);
}

TEST_CASE("sample 1 first-order paths") {
  const auto paths = enumerate_paths(sample1(), 0);
  REQUIRE(paths.size() == 3);
  CHECK(paths[0].optical_roundtrip == doctest::Approx(0.0));
  CHECK(paths[1].optical_roundtrip == doctest::Approx(2 * 1.77 * 0.442e-3).epsilon(1e-12));
  CHECK(paths[1].optical_roundtrip == doctest::Approx(1.565e-3).epsilon(1e-3));
  CHECK(paths[2].optical_roundtrip == doctest::Approx(2.427e-3).epsilon(1e-3));
  CHECK(paths[0].amplitude == doctest::Approx(r(1.0, 1.77)).epsilon(1e-14));
  CHECK(paths[1].amplitude == doctest::Approx(t(1.0, 1.77) * r(1.77, 1.0) * t(1.77, 1.0)).epsilon(1e-14));
  CHECK(paths[2].amplitude ==
        doctest::Approx(t(1.0, 1.77) * t(1.77, 1.0) * r(1.0, 3.61) * t(1.0, 1.77) * t(1.77, 1.0)).epsilon(1e-14));
}

TEST_CASE("single slab matches the geometric series") {
  const double d = 0.251e-3, n = 3.61;
  const int order = 4;
  const auto paths = enumerate_paths(slab(d, n), order);
  REQUIRE(paths.size() == static_cast<std::size_t>(order + 2));
  CHECK(paths[0].amplitude == doctest::Approx(r(1.0, n)).epsilon(1e-14));
  const double r_in = r(n, 1.0);
  for (int m = 0; m <= order; ++m) {
    const auto& p = paths[static_cast<std::size_t>(m + 1)];
    CHECK(p.order == m);
    CHECK(p.optical_roundtrip == doctest::Approx(2.0 * n * d * (m + 1)).epsilon(1e-12));
    CHECK(p.amplitude == doctest::Approx(t(1.0, n) * t(n, 1.0) * r_in * std::pow(r_in * r_in, m)).epsilon(1e-12));
  }
}

TEST_CASE("silicon double reflection at 3.624 mm") {
  const auto paths = enumerate_paths(slab(0.251e-3, 3.61), 1);
  const bool found = std::any_of(paths.begin(), paths.end(), [](const ReflectionPath& p) {
    return p.order == 1 && std::abs(p.optical_roundtrip - 2.0 * 2.0 * 3.61 * 0.251e-3) < 1e-12;
  });
  CHECK(found);
  CHECK(2.0 * 2.0 * 3.61 * 0.251e-3 == doctest::Approx(3.624e-3).epsilon(1e-3));
}

TEST_CASE("incoherent energy is bounded and grows with order") {
  LayerStack s = sample1();
  double previous = 0.0;
  for (int order = 0; order <= 6; ++order) {
    const auto paths = enumerate_paths(s, order);
    const double e = std::accumulate(paths.begin(), paths.end(), 0.0,
                                     [](double acc, const ReflectionPath& p) { return acc + p.amplitude * p.amplitude; });
    CHECK(e >= previous - 1e-15);
    CHECK(e <= 1.0);
    previous = e;
    for (const auto& p : paths) CHECK(std::abs(p.amplitude) <= 1.0);
  }
}

TEST_CASE("reference plane shift moves every path") {
  LayerStack s = sample1();
  const auto base = enumerate_paths(s, 2);
  s.reference_plane_offset = 0.3e-3;
  const auto shifted = enumerate_paths(s, 2);
  REQUIRE(base.size() == shifted.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    CHECK(shifted[k].optical_roundtrip == doctest::Approx(base[k].optical_roundtrip - 0.3e-3).epsilon(1e-12));
    CHECK(shifted[k].amplitude == base[k].amplitude);
  }
}

TEST_CASE("order-0 count equals reflecting interfaces") {
  LayerStack s;
  s.layers = {{1e-4, 1.5, {}}, {2e-4, 1.5, {}}, {1e-4, 2.0, {}}};
  s.substrate_index = 2.0;
  // Interfaces: 1|1.5 reflects, 1.5|1.5 not, 1.5|2 reflects, 2|2 not.
  CHECK(enumerate_paths(s, 0).size() == 2);
  // A distinct phase index splits 1.5|1.5 and 1.5|2 into 1.5|1.7 and 1.7|2.
  s.layers[1].phase_index = 1.7;
  CHECK(enumerate_paths(s, 0).size() == 3);
}

TEST_CASE("paths are sorted and interface positions follow the group indices") {
  LayerStack s = sample1();
  s.reference_plane_offset = 0.1e-3;
  const auto paths = enumerate_paths(s, 3);
  CHECK(std::is_sorted(paths.begin(), paths.end(),
                       [](const auto& a, const auto& b) { return a.optical_roundtrip < b.optical_roundtrip; }));
  const auto pos = interface_positions(s);
  REQUIRE(pos.size() == 3);
  CHECK(pos[0] == doctest::Approx(-0.1e-3));
  CHECK(pos[1] == doctest::Approx(2 * 1.77 * 0.442e-3 - 0.1e-3));
  CHECK(pos[2] == doctest::Approx(2 * 1.77 * 0.442e-3 + 2 * 0.431e-3 - 0.1e-3));
}

TEST_CASE("reflectivity override") {
  LayerStack s = slab(0.5e-3, 3.61);
  s.substrate_index = 1.5;
  s.interface_reflectivity = {std::nullopt, 0.9};
  const auto paths = enumerate_paths(s, 0);
  REQUIRE(paths.size() == 2);
  CHECK(paths[1].amplitude == doctest::Approx(t(1.0, 3.61) * 0.9 * t(3.61, 1.0)).epsilon(1e-14));
}

TEST_CASE("enumeration errors") {
  CHECK_THROWS_AS(enumerate_paths(sample1(), -1), DomainError);
  CHECK_THROWS_AS(enumerate_paths(sample1(), 12, 50), EnumerationLimitError);
  LayerStack bad = sample1();
  bad.layers[0].thickness = -1.0;
  CHECK_THROWS_AS(enumerate_paths(bad, 0), DomainError);
  bad = sample1();
  bad.layers[1].group_index = 0.5;
  CHECK_THROWS_AS(enumerate_paths(bad, 0), DomainError);
  bad = sample1();
  bad.interface_reflectivity = {1.5};
  CHECK_THROWS_AS(enumerate_paths(bad, 0), DomainError);
}
