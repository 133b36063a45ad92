#include "bellmom/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bellmom/error.hpp"
#include "bellmom/inequalities.hpp"

namespace bellmom::scenarios {

using qcore::Complex;
using qcore::ComplexMatrix;
using qcore::Observable;
using qcore::Party;

namespace {

ComplexMatrix projector_onto(Complex c0, Complex c1) {
  const Complex v[2] = {c0, c1};
  return ComplexMatrix::outer(v);
}

qcore::BipartiteState bell_state() {
  const double h = 1.0 / std::numbers::sqrt2;
  return qcore::BipartiteState(2, 2, {0.0, h, -h, 0.0});
}

}  // namespace

ComplexMatrix equatorial_projector(int x) {
  const Complex e = std::polar(1.0, 2.0 * std::numbers::pi * x / 3.0);
  return ComplexMatrix{{0.5, 0.5 * e}, {0.5 * std::conj(e), 0.5}};
}

BipartiteScenario bell_three_choices() {
  std::vector<Observable> a, b;
  for (int x = 1; x <= 3; ++x) {
    a.emplace_back(Party::A, x, equatorial_projector(x));
    b.emplace_back(Party::B, x, equatorial_projector(x));
  }
  return BipartiteScenario(bell_state(), std::move(a), std::move(b));
}

BipartiteScenario bell_three_choices_complemented() {
  const auto id = ComplexMatrix::identity(2);
  std::vector<Observable> a, b;
  for (int x = 1; x <= 3; ++x) {
    a.emplace_back(Party::A, x, x == 1 ? id - equatorial_projector(x) : equatorial_projector(x));
    b.emplace_back(Party::B, x, x == 2 ? id - equatorial_projector(x) : equatorial_projector(x));
  }
  return BipartiteScenario(bell_state(), std::move(a), std::move(b));
}

TiltedAmplitudes tilted_amplitudes(double phi) {
  if (!(phi >= 0.0 && phi < std::numbers::pi / 2))
    throw Error(ErrorCode::PhiOutOfRange, "phi must be in [0, pi/2), got " + std::to_string(phi));
  const double s2 = std::sin(phi) * std::sin(phi);
  const double c2 = std::cos(phi) * std::cos(phi);
  const double norm = std::sqrt(s2 * s2 + c2 * c2);
  return {s2 / norm, c2 / norm};
}

BipartiteScenario tilted_two_choices(double phi) {
  const auto [alpha, beta] = tilted_amplitudes(phi);
  const double c = std::cos(phi), s = std::sin(phi);
  const auto plus = projector_onto(1.0, 0.0);
  std::vector<Observable> a, b;
  a.emplace_back(Party::A, 1, plus);
  a.emplace_back(Party::A, 2, projector_onto(c, s));
  b.emplace_back(Party::B, 1, plus);
  b.emplace_back(Party::B, 2, projector_onto(c, -s));
  return BipartiteScenario(qcore::BipartiteState::normalized(2, 2, {alpha, 0.0, 0.0, beta}),
                           std::move(a), std::move(b));
}

std::vector<SweepPoint> sweep_ine22(const std::vector<double>& phi_grid) {
  std::vector<SweepPoint> out;
  out.reserve(phi_grid.size());
  for (double phi : phi_grid) {
    const auto r = ineq::eval_ine22(ineq::table_from_scenario(tilted_two_choices(phi)));
    out.push_back({phi, r.lhs, r.rhs, r.margin});
  }
  return out;
}

std::vector<double> linspace(double start, double end, int steps) {
  if (steps < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 steps");
  std::vector<double> v(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i)
    v[i] = i == steps - 1 ? end : start + (end - start) * i / (steps - 1);
  return v;
}

}  // namespace bellmom::scenarios
