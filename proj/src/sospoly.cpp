#include "bellmom/sospoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bellmom/error.hpp"
#include "bellmom/kernels.hpp"
#include "bellmom/parallel.hpp"
#include "bellmom/random_instances.hpp"

namespace bellmom::sos {

double eval_w(const PolyPoint& p) {
  const double sa1 = p.a1 * p.a1, sa2 = p.a2 * p.a2;
  const double sb1 = p.b1 * p.b1, sb2 = p.b2 * p.b2;
  const double sa = sa1 + sa2, sb = sb1 + sb2;
  const double cross = (sa1 - sa2) * (p.b1 + p.b2) + (sb1 - sb2) * (p.a1 + p.a2);
  return sa + sb + sa * sb - kCrossCoefficient * cross;
}

std::array<double, 4> gradient_w(const PolyPoint& p) {
  const double c = kCrossCoefficient;
  const double sa = p.a1 * p.a1 + p.a2 * p.a2;
  const double sb = p.b1 * p.b1 + p.b2 * p.b2;
  const double bs = p.b1 + p.b2, as = p.a1 + p.a2;
  const double db = p.b1 * p.b1 - p.b2 * p.b2, da = p.a1 * p.a1 - p.a2 * p.a2;
  return {
      2 * p.a1 * (1 + sb) - c * (2 * p.a1 * bs + db),
      2 * p.a2 * (1 + sb) - c * (-2 * p.a2 * bs + db),
      2 * p.b1 * (1 + sa) - c * (da + 2 * p.b1 * as),
      2 * p.b2 * (1 + sa) - c * (da - 2 * p.b2 * as),
  };
}

RotatedPoint rotate(const PolyPoint& p) {
  const double r = 1.0 / std::sqrt(2.0);
  return {r * (p.a1 + p.a2), r * (p.a1 - p.a2), r * (p.b1 + p.b2), r * (p.b1 - p.b2)};
}

double eval_w_rotated(const RotatedPoint& r) {
  const double sa = r.a_plus * r.a_plus + r.a_minus * r.a_minus;
  const double sb = r.b_plus * r.b_plus + r.b_minus * r.b_minus;
  return sa + sb + sa * sb -
         3.0 * std::sqrt(1.5) * r.a_plus * r.b_plus * (r.a_minus + r.b_minus);
}

DescentRun descend(const PolyPoint& start, const DescentOptions& options) {
  DescentRun run;
  run.start = start;
  std::array<double, 4> x = start.array();
  double f = eval_w(start);
  double step = 1.0;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const auto g = gradient_w(PolyPoint::from(x));
    double gg = 0.0;
    for (double v : g) gg += v * v;
    if (std::sqrt(gg) < options.gradient_tolerance) break;
    // Armijo backtracking; the trial step grows again after each success.
    step = std::min(1.0, step * 2.0);
    bool accepted = false;
    while (step > 1e-20) {
      std::array<double, 4> y;
      for (int i = 0; i < 4; ++i) y[i] = x[i] - step * g[i];
      const double fy = eval_w(PolyPoint::from(y));
      if (fy <= f - 1e-4 * step * gg) {
        x = y;
        f = fy;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  run.argmin = PolyPoint::from(x);
  run.value = f;
  run.iterations = it;
  return run;
}

MinResult min_w(int restarts, std::uint64_t seed, const DescentOptions& options,
                unsigned threads) {
  if (restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be >= 1");
  if (options.grid_points < 2) throw Error(ErrorCode::InvalidArgument, "grid_points must be >= 2");

  const int g = options.grid_points;
  const std::size_t n = static_cast<std::size_t>(g) * g * g * g;
  std::vector<double> axis(g);
  for (int i = 0; i < g; ++i)
    axis[i] = -options.grid_bound + 2.0 * options.grid_bound * i / (g - 1);
  std::vector<double> a1(n), a2(n), b1(n), b2(n), w(n);
  std::size_t k = 0;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      for (int l = 0; l < g; ++l)
        for (int m = 0; m < g; ++m, ++k) {
          a1[k] = axis[i];
          a2[k] = axis[j];
          b1[k] = axis[l];
          b2[k] = axis[m];
        }
  kernels::eval_w_batch(a1, a2, b1, b2, w);
  const std::size_t best = std::min_element(w.begin(), w.end()) - w.begin();

  MinResult result;
  result.grid_value = w[best];
  result.grid_argmin = {a1[best], a2[best], b1[best], b2[best]};

  result.runs.resize(restarts);
  parallel_for(restarts, resolve_threads(threads), [&](std::size_t r) {
    PolyPoint start = result.grid_argmin;
    if (r > 0) {
      Rng rng = make_stream(seed, r, 3);
      std::uniform_real_distribution<double> u(-options.grid_bound, options.grid_bound);
      start = {u(rng), u(rng), u(rng), u(rng)};
    }
    result.runs[r] = descend(start, options);
    result.runs[r].restart = static_cast<int>(r);
  });

  result.value = result.grid_value;
  result.argmin = result.grid_argmin;
  for (const auto& run : result.runs) {
    if (run.value < result.value) {
      result.value = run.value;
      result.argmin = run.argmin;
    }
  }
  return result;
}

double certificate_s() { return std::pow(1.5, 1.5); }

double constraint_violation(double alpha, double gamma, double delta, double xi) {
  return std::max({alpha * alpha - 1.0, delta * delta - 1.0, gamma * gamma + xi * xi - 1.0});
}

CertificateReport non_sos_certificate(double s) {
  CertificateReport rep;
  rep.s = s;
  rep.lower_bound = s * s / 2.0 + s * s / 2.0;
  rep.upper_bound = 3.0;
  rep.infeasible = rep.lower_bound > rep.upper_bound;

  // The violation is a max of convex functions of (alpha, delta), so a
  // zooming grid converges to the global minimum.
  const auto f = [s](double a, double d) { return constraint_violation(a, s - a, d, s - d); };
  double ca = 0.0, cd = 0.0;
  double half = std::abs(s) + 2.0;
  double best = f(ca, cd);
  const int m = 40;
  for (int round = 0; round < 80 && half > 1e-13; ++round) {
    double ba = ca, bd = cd;
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j) {
        const double a = ca - half + 2.0 * half * i / m;
        const double d = cd - half + 2.0 * half * j / m;
        const double v = f(a, d);
        if (v < best) {
          best = v;
          ba = a;
          bd = d;
        }
      }
    ca = ba;
    cd = bd;
    half *= 0.25;
  }
  rep.min_violation = best;
  rep.alpha = ca;
  rep.delta = cd;
  return rep;
}

TMaximum t_subcheck() {
  // Bisection on the derivative 4t - 3t^2: it is positive at 1/2 and negative
  // at 2, and the flat maximum would only fix t to ~sqrt(eps) from f itself.
  const auto f = [](double t) { return t * t * (2.0 - t); };
  const auto df = [](double t) { return t * (4.0 - 3.0 * t); };
  double lo = 0.5, hi = 2.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (df(mid) > 0.0 ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  // Guard: the stationary point must beat both ends of [0, 2] and a coarse scan.
  double best = std::max(f(0.0), f(2.0));
  for (int i = 0; i <= 2000; ++i) best = std::max(best, f(2.0 * i / 2000));
  if (f(t) + 1e-12 < best) throw Error(ErrorCode::NoConvergence, "t_subcheck: not the maximum");
  return {t, f(t)};
}

double avg_w(const ineq::MomentTable& t) {
  if (t.choices_a() < 2 || t.choices_b() < 2)
    throw Error(ErrorCode::NotEnoughChoices, "W needs 2 choices per party");
  double w = 0.0;
  for (int x = 1; x <= 2; ++x) w += t(x, 1, 2, 0);
  for (int y = 1; y <= 2; ++y) w += t(1, y, 0, 2);
  for (int x = 1; x <= 2; ++x)
    for (int y = 1; y <= 2; ++y) w += t(x, y, 2, 2);
  double cross = 0.0;
  for (int y = 1; y <= 2; ++y) cross += t(1, y, 2, 1) - t(2, y, 2, 1);
  for (int x = 1; x <= 2; ++x) cross += t(x, 1, 1, 2) - t(x, 2, 1, 2);
  return w - kCrossCoefficient * cross;
}

double quantum_avg_w(const BipartiteScenario& s) { return avg_w(ineq::table_from_scenario(s)); }

}  // namespace bellmom::sos
