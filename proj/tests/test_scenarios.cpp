#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bellmom/error.hpp"
#include "bellmom/inequalities.hpp"
#include "bellmom/scenarios.hpp"

using namespace bellmom;
using namespace bellmom::scenarios;

TEST_CASE("bell_three_choices geometry") {
  const auto s = bell_three_choices();
  CHECK(s.choices_a() == 3);
  CHECK(s.choices_b() == 3);
  for (const auto* side : {&s.obs_a(), &s.obs_b()})
    for (const auto& o : *side) CHECK(qcore::max_abs_diff(o.op() * o.op(), o.op()) <= 1e-12);
  const double h = 1.0 / std::numbers::sqrt2;
  CHECK(s.state().amplitude(0, 1) == qcore::Complex(h));
  CHECK(s.state().amplitude(1, 0) == qcore::Complex(-h));
  CHECK(s.state().amplitude(0, 0) == qcore::Complex(0.0));
}

TEST_CASE("Bell table is cyclically symmetric") {
  const auto t = ineq::table_from_scenario(bell_three_choices());
  for (int x = 1; x <= 3; ++x)
    for (int y = 1; y <= 3; ++y)
      for (int k = 0; k <= 2; ++k)
        for (int l = 0; l <= 2; ++l)
          CHECK(std::abs(t(x % 3 + 1, y % 3 + 1, k, l) - t(x, y, k, l)) <= 1e-12);
}

TEST_CASE("tilted amplitudes") {
  const auto m = tilted_amplitudes(std::numbers::pi / 4);
  CHECK(std::abs(m.alpha - 1.0 / std::numbers::sqrt2) < 1e-15);
  CHECK(std::abs(m.beta - 1.0 / std::numbers::sqrt2) < 1e-15);
  const auto p = tilted_amplitudes(0.0);
  CHECK(p.alpha == 0.0);
  CHECK(p.beta == 1.0);
  // sin^4 + cos^4 at pi/6 is 1/16 + 9/16 = 5/8.
  const auto t = tilted_amplitudes(std::numbers::pi / 6);
  CHECK(std::abs(t.alpha * t.alpha - (1.0 / 16.0) / (5.0 / 8.0)) < 1e-15);
  CHECK(std::abs(t.alpha * t.alpha - 0.1) < 1e-15);
}

TEST_CASE("tilted_two_choices validation and idempotence") {
  CHECK_THROWS_AS(tilted_two_choices(-0.1), Error);
  CHECK_THROWS_AS(tilted_two_choices(std::numbers::pi / 2), Error);
  const auto s = tilted_two_choices(0.4);
  double norm = 0.0;
  for (auto z : s.state().amplitudes()) norm += std::norm(z);
  CHECK(std::abs(norm - 1.0) <= 1e-12);
  for (const auto* side : {&s.obs_a(), &s.obs_b()})
    for (const auto& o : *side) CHECK(qcore::max_abs_diff(o.op() * o.op(), o.op()) <= 1e-12);
}

TEST_CASE("sweep_ine22 follows alpha^2 (1 - 2 cos^2 phi)") {
  const auto grid = linspace(0.0, std::numbers::pi / 2 * (1 - 1e-9), 1000);
  const auto pts = sweep_ine22(grid);
  REQUIRE(pts.size() == 1000);
  const double quarter = std::numbers::pi / 4;
  for (const auto& p : pts) {
    const double a2 = std::pow(tilted_amplitudes(p.phi).alpha, 2);
    const double c2 = std::cos(p.phi) * std::cos(p.phi);
    CHECK(std::abs(p.margin - a2 * (1 - 2 * c2)) <= 1e-12);
    CHECK(std::abs(p.lhs - a2 * (2 * c2 + 1)) <= 1e-12);
    if (p.phi > 1e-6 && p.phi < quarter - 1e-6) CHECK(p.margin < 0.0);
    if (p.phi >= quarter) CHECK(p.margin >= -1e-10);
  }
  CHECK(std::abs(pts.front().margin) <= 1e-10);
  CHECK(std::abs(sweep_ine22({quarter})[0].margin) <= 1e-10);
  CHECK(std::abs(sweep_ine22({std::numbers::pi / 6})[0].margin + 0.05) <= 1e-12);
}

TEST_CASE("scenario validation") {
  using namespace qcore;
  const auto st = BipartiteState::normalized(2, 2, {1, 0, 0, 1});
  std::vector<Observable> a{Observable(Party::A, 1, ComplexMatrix::identity(2))};
  std::vector<Observable> b{Observable(Party::B, 2, ComplexMatrix::identity(2))};
  CHECK_THROWS_AS(BipartiteScenario(st, a, b), Error);
  std::vector<Observable> b3{Observable(Party::B, 1, ComplexMatrix::identity(3))};
  CHECK_THROWS_AS(BipartiteScenario(st, a, b3), Error);
  CHECK_THROWS_AS(BipartiteScenario(st, a, a), Error);
  CHECK_THROWS_AS(linspace(0, 1, 1), Error);
}
