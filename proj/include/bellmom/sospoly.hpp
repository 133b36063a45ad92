#pragma once

// The quartic W(A1, A2, B1, B2): nonnegative on R^4 but not a sum of squares.

#include <array>
#include <cstdint>
#include <vector>

#include "bellmom/inequalities.hpp"
#include "bellmom/scenario.hpp"

namespace bellmom::sos {

struct PolyPoint {
  double a1 = 0.0;
  double a2 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;

  std::array<double, 4> array() const { return {a1, a2, b1, b2}; }
  static PolyPoint from(const std::array<double, 4>& v) { return {v[0], v[1], v[2], v[3]}; }
  friend bool operator==(const PolyPoint&, const PolyPoint&) = default;
};

/// 3 sqrt(3) / 4
inline constexpr double kCrossCoefficient = 1.299038105676658;

double eval_w(const PolyPoint& p);
std::array<double, 4> gradient_w(const PolyPoint& p);

/// sqrt(2) A+- = A1 +- A2, sqrt(2) B+- = B1 +- B2.
struct RotatedPoint {
  double a_plus, a_minus, b_plus, b_minus;
};
RotatedPoint rotate(const PolyPoint& p);
/// W written in rotated coordinates; equals eval_w up to rounding.
double eval_w_rotated(const RotatedPoint& r);

struct DescentOptions {
  int max_iterations = 20000;
  double gradient_tolerance = 1e-12;
  int grid_points = 13;  ///< per axis, over [-grid_bound, grid_bound]^4
  double grid_bound = 3.0;
};

struct DescentRun {
  int restart = 0;
  PolyPoint start;
  PolyPoint argmin;
  double value = 0.0;
  int iterations = 0;
};

/// Gradient descent with Armijo backtracking.
DescentRun descend(const PolyPoint& start, const DescentOptions& options = {});

struct MinResult {
  double value = 0.0;
  PolyPoint argmin;
  double grid_value = 0.0;
  PolyPoint grid_argmin;
  std::vector<DescentRun> runs;  ///< one per restart
};

/// Coarse grid over [-3, 3]^4, then `restarts` descents. Restart 0 starts at
/// the grid minimum, the others at uniform points of the grid box.
/// Throws InvalidArgument for restarts < 1.
MinResult min_w(int restarts, std::uint64_t seed, const DescentOptions& options = {},
                unsigned threads = 0);

/// Infeasibility of the coefficient constraints a matching sum of squares
/// would need: alpha + gamma = s, delta + xi = s, alpha^2 <= 1, delta^2 <= 1,
/// gamma^2 + xi^2 <= 1.
struct CertificateReport {
  double s = 0.0;
  double lower_bound = 0.0;  ///< (alpha+gamma)^2/2 + (delta+xi)^2/2 = s^2
  double upper_bound = 3.0;  ///< from the three inequality constraints
  bool infeasible = false;   ///< lower_bound > upper_bound
  /// min over (alpha, delta) of the largest constraint violation, with
  /// gamma = s - alpha and xi = s - delta. <= 0 means a feasible point exists.
  double min_violation = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
};

/// (3/2)^(3/2)
double certificate_s();
CertificateReport non_sos_certificate(double s = certificate_s());
double constraint_violation(double alpha, double gamma, double delta, double xi);

struct TMaximum {
  double t = 0.0;
  double value = 0.0;
};
/// max over t >= 0 of t^2 (2 - t) (negative for t > 2), located by bisection
/// on the derivative.
TMaximum t_subcheck();

/// <W> from the monomial expansion over choices 1 and 2 of each party.
/// Throws NotEnoughChoices.
double avg_w(const ineq::MomentTable& t);
double quantum_avg_w(const BipartiteScenario& s);

}  // namespace bellmom::sos
