#include "qict/error.hpp"
#include "qict/pairsource.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qict;

TEST_CASE("heralding efficiencies of simple sources") {
  const auto lossless = heralding_efficiencies({Complex{1.0}, 1.0, 0.0, 0.0});
  CHECK(lossless.signal_to_idler == 1.0);
  CHECK(lossless.idler_to_signal == 1.0);

  const double h = std::sqrt(0.5);
  const auto split = heralding_efficiencies({Complex{1.0}, h, h, 0.0});
  CHECK(split.signal_to_idler == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(split.idler_to_signal == 1.0);
}

TEST_CASE("mu_s->i = 0.63 for any scale of |p|^2 : |q|^2 = 0.63 : 0.37") {
  for (double k : {0.1, 0.5, 1.0}) {
    PairSourceParams s{Complex{1.0}, std::sqrt(0.63 * k), std::sqrt(0.37 * k), 0.0};
    CHECK(heralding_efficiencies(s).signal_to_idler == doctest::Approx(0.63).epsilon(1e-14));
  }
}

TEST_CASE("degenerate source reports undefined efficiency") {
  CHECK_THROWS_AS(heralding_efficiencies({Complex{1.0}, 0.0, 0.0, 1.0}), UndefinedEfficiencyError);
  CHECK_THROWS_AS(heralding_efficiencies({Complex{1.0}, 0.0, 1.0, 0.0}), UndefinedEfficiencyError);
}

TEST_CASE("from_efficiencies examples") {
  const auto ideal = from_efficiencies(1.0, 1.0);
  CHECK(std::abs(ideal.p - Complex{1.0}) < 1e-15);
  CHECK(std::abs(ideal.q) == 0.0);
  CHECK(std::abs(ideal.r) == 0.0);

  for (auto [a, b] : {std::pair{0.63, 0.43}, std::pair{0.60, 0.49}}) {
    const auto s = from_efficiencies(a, b);
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
    const auto mu = heralding_efficiencies(s);
    CHECK(std::abs(mu.signal_to_idler - a) < 1e-12);
    CHECK(std::abs(mu.idler_to_signal - b) < 1e-12);
    CHECK(s.p.imag() == 0.0);
    CHECK(s.q.imag() == 0.0);
    CHECK(s.r.imag() == 0.0);
  }
}

TEST_CASE("from_efficiencies rejects values outside (0, 1]") {
  CHECK_THROWS_AS(from_efficiencies(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(from_efficiencies(0.5, 1.2), DomainError);
  CHECK_THROWS_AS(from_efficiencies(-0.1, 0.5), DomainError);
  CHECK_THROWS_AS(from_efficiencies(std::nan(""), 0.5), DomainError);
}

TEST_CASE("round trip on random zero-phase sources") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    double p = u(rng) + 1e-3, q = u(rng), r = u(rng);
    const double norm = std::sqrt(p * p + q * q + r * r);
    PairSourceParams s{Complex{0.7}, p / norm, q / norm, r / norm};
    validate(s);
    const auto mu = heralding_efficiencies(s);
    const auto back = heralding_efficiencies(from_efficiencies(mu.signal_to_idler, mu.idler_to_signal));
    CHECK(std::abs(back.signal_to_idler - mu.signal_to_idler) < 1e-12);
    CHECK(std::abs(back.idler_to_signal - mu.idler_to_signal) < 1e-12);
  }
}

TEST_CASE("increasing |q| at fixed |p| lowers mu_s->i") {
  double previous = 2.0;
  for (double q = 0.0; q < 0.9; q += 0.1) {
    const double mu = heralding_efficiencies({Complex{1.0}, 0.3, q, 0.0}).signal_to_idler;
    CHECK(mu < previous);
    previous = mu;
  }
}

TEST_CASE("validate enforces normalization") {
  CHECK_NOTHROW(validate(from_efficiencies(0.7, 0.8)));
  CHECK_THROWS_AS(validate({Complex{1.0}, 0.5, 0.5, 0.0}), DomainError);
}
