#include "bellmom/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "bellmom/error.hpp"
#include "bellmom/parallel.hpp"
#include "bellmom/random_instances.hpp"

namespace bellmom::search {

using qcore::Complex;
using qcore::ComplexMatrix;
using qcore::Observable;
using qcore::Party;

namespace {

const ComplexMatrix& pauli(int i) {
  static const ComplexMatrix p[3] = {
      ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}},
      ComplexMatrix{{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}},
      ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}},
  };
  return p[i];
}

ComplexMatrix qubit_operator(std::span<const double> p, bool projector) {
  double offset = p[0], n[3] = {p[1], p[2], p[3]};
  if (projector) {
    const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (len > 0.0) {
      for (double& v : n) v /= len;
    } else {
      n[0] = n[1] = 0.0;
      n[2] = 1.0;
    }
    offset = 0.5;
    for (double& v : n) v *= 0.5;
  }
  ComplexMatrix m = ComplexMatrix::identity(2) * Complex(offset);
  for (int i = 0; i < 3; ++i) m = m + pauli(i) * Complex(n[i]);
  return m;
}

// Unitary whose columns are the Schmidt vectors, completed for product states.
ComplexMatrix local_unitary(const std::vector<std::vector<Complex>>& basis) {
  ComplexMatrix u(2);
  const auto& v = basis[0];
  const std::vector<Complex> w =
      basis.size() > 1 ? basis[1] : std::vector<Complex>{-std::conj(v[1]), std::conj(v[0])};
  for (int r = 0; r < 2; ++r) {
    u(r, 0) = v[r];
    u(r, 1) = w[r];
  }
  return u;
}

void check_params(const SearchSpace& space, std::span<const double> params) {
  if (space.choices_a < 1 || space.choices_b < 1)
    throw Error(ErrorCode::InvalidArgument, "search space needs at least one choice per party");
  if (params.size() != space.dim())
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(space.dim()) +
                                              " parameters, got " + std::to_string(params.size()));
}

double diameter(const std::vector<std::vector<double>>& simplex) {
  double d = 0.0;
  for (std::size_t i = 1; i < simplex.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < simplex[0].size(); ++k) {
      const double t = simplex[i][k] - simplex[0][k];
      s += t * t;
    }
    d = std::max(d, std::sqrt(s));
  }
  return d;
}

}  // namespace

SearchSpace SearchSpace::for_inequality(ineq::InequalityName name, bool projectors_only) {
  const int m = ineq::required_choices(name);
  return {m, m, projectors_only};
}

BipartiteScenario build_scenario(const SearchSpace& space, std::span<const double> params) {
  check_params(space, params);
  const double th = params[0];
  qcore::BipartiteState st(2, 2, {std::cos(th), 0.0, 0.0, std::sin(th)});
  std::vector<Observable> a, b;
  std::size_t k = 1;
  for (int x = 1; x <= space.choices_a; ++x, k += 4)
    a.emplace_back(Party::A, x, qubit_operator(params.subspan(k, 4), space.projectors_only));
  for (int y = 1; y <= space.choices_b; ++y, k += 4)
    b.emplace_back(Party::B, y, qubit_operator(params.subspan(k, 4), space.projectors_only));
  return BipartiteScenario(std::move(st), std::move(a), std::move(b));
}

std::vector<double> encode(const SearchSpace& space, const BipartiteScenario& s) {
  if (s.state().dim_a() != 2 || s.state().dim_b() != 2)
    throw Error(ErrorCode::DimensionMismatch, "search encodes two-qubit scenarios only");
  if (s.choices_a() != space.choices_a || s.choices_b() != space.choices_b)
    throw Error(ErrorCode::ShapeMismatch, "scenario choices differ from the search space");

  // psi = (U (x) V) (c0|00> + c1|11>), so the observables become U^+ A U, V^+ B V.
  const auto sd = qcore::schmidt(s.state());
  const ComplexMatrix u = local_unitary(sd.basis_a);
  const ComplexMatrix v = local_unitary(sd.basis_b);
  const double c1 = sd.coefficients.size() > 1 ? sd.coefficients[1] : 0.0;

  std::vector<double> p;
  p.reserve(space.dim());
  p.push_back(std::atan2(c1, sd.coefficients[0]));
  const auto push = [&](const ComplexMatrix& op, const ComplexMatrix& w) {
    const ComplexMatrix r = w.adjoint() * op * w;
    p.push_back(0.5 * (r(0, 0) + r(1, 1)).real());
    for (int i = 0; i < 3; ++i) {
      const ComplexMatrix pr = pauli(i) * r;
      p.push_back(0.5 * (pr(0, 0) + pr(1, 1)).real());
    }
  };
  for (const auto& o : s.obs_a()) push(o.op(), u);
  for (const auto& o : s.obs_b()) push(o.op(), v);
  return p;
}

double objective(const SearchSpace& space, std::span<const double> params,
                 ineq::InequalityName name) {
  const auto t = ineq::table_from_scenario(build_scenario(space, params));
  return ineq::evaluate(name, t, ineq::SqrtPolicy::ClampNegative).margin;
}

NelderMeadOptions NelderMeadOptions::adaptive(std::size_t dim) {
  NelderMeadOptions o;
  const double n = static_cast<double>(std::max<std::size_t>(dim, 2));
  o.expansion = 1.0 + 2.0 / n;
  o.contraction = 0.75 - 0.5 / n;
  o.shrink = 1.0 - 1.0 / n;
  return o;
}

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const NelderMeadOptions& o) {
  const std::size_t n = x0.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "nelder_mead: empty start");
  if (!(o.initial_step > 0.0))
    throw Error(ErrorCode::InvalidArgument, "nelder_mead: initial_step must be > 0");
  if (o.max_evaluations < static_cast<int>(n) + 1)
    throw Error(ErrorCode::InvalidArgument, "nelder_mead: budget below dim + 1");

  NelderMeadResult res;
  const auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  std::vector<std::vector<double>> sx(n + 1);
  std::vector<double> fx(n + 1);
  std::vector<std::size_t> order(n + 1);
  const auto build = [&](const std::vector<double>& base, double fbase, bool have_fbase) {
    sx[0] = base;
    fx[0] = have_fbase ? fbase : eval(base);
    for (std::size_t i = 0; i < n; ++i) {
      sx[i + 1] = base;
      sx[i + 1][i] += o.initial_step;
      fx[i + 1] = eval(sx[i + 1]);
    }
  };
  const auto sort = [&]() {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    std::vector<std::vector<double>> s2(n + 1);
    std::vector<double> f2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s2[i] = std::move(sx[order[i]]);
      f2[i] = fx[order[i]];
    }
    sx.swap(s2);
    fx.swap(f2);
  };

  build(x0, 0.0, false);
  int restarts_left = o.restarts;
  bool converged = false;
  std::vector<double> c(n), xr(n), xt(n);
  const auto along = [&](double t, const std::vector<double>& from, std::vector<double>& out) {
    for (std::size_t k = 0; k < n; ++k) out[k] = c[k] + t * (from[k] - c[k]);
  };

  while (true) {
    sort();
    res.trace.push_back(fx[0]);
    if (diameter(sx) < o.diameter_tolerance) {
      if (restarts_left > 0 && res.evaluations + static_cast<int>(n) <= o.max_evaluations) {
        --restarts_left;
        build(sx[0], fx[0], true);
        continue;
      }
      converged = true;
      break;
    }
    if (res.evaluations >= o.max_evaluations) break;
    ++res.iterations;

    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) c[k] += sx[i][k] / static_cast<double>(n);

    along(-o.reflection, sx[n], xr);
    const double fr = eval(xr);
    if (fr < fx[0]) {
      along(o.expansion, xr, xt);
      const double fe = eval(xt);
      if (fe < fr) {
        sx[n] = xt;
        fx[n] = fe;
      } else {
        sx[n] = xr;
        fx[n] = fr;
      }
      continue;
    }
    if (fr < fx[n - 1]) {
      sx[n] = xr;
      fx[n] = fr;
      continue;
    }
    bool shrink = false;
    if (fr < fx[n]) {
      along(o.contraction, xr, xt);
      const double fc = eval(xt);
      if (fc <= fr) {
        sx[n] = xt;
        fx[n] = fc;
      } else {
        shrink = true;
      }
    } else {
      along(o.contraction, sx[n], xt);
      const double fc = eval(xt);
      if (fc < fx[n]) {
        sx[n] = xt;
        fx[n] = fc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t k = 0; k < n; ++k) sx[i][k] = sx[0][k] + o.shrink * (sx[i][k] - sx[0][k]);
        fx[i] = eval(sx[i]);
      }
    }
  }
  res.x = sx[0];
  res.value = fx[0];
  res.budget_exhausted = !converged;
  return res;
}

std::vector<double> random_start(const SearchSpace& space, std::uint64_t seed, std::size_t i) {
  Rng rng = make_stream(seed, i, 4);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> off(-2.0, 2.0), bloch(-1.0, 1.0);
  std::vector<double> p(space.dim());
  p[0] = angle(rng);
  for (std::size_t k = 1; k < p.size(); k += 4) {
    p[k] = off(rng);
    for (int j = 1; j <= 3; ++j) p[k + j] = bloch(rng);
  }
  return p;
}

SearchResult multi_start(const SearchSpace& space, ineq::InequalityName name, int n_starts,
                         std::uint64_t seed, const NelderMeadOptions& options,
                         std::span<const std::vector<double>> extra_starts, unsigned threads) {
  if (n_starts < 1) throw Error(ErrorCode::InvalidArgument, "n_starts must be >= 1");
  std::vector<std::vector<double>> starts(extra_starts.begin(), extra_starts.end());
  for (int i = 0; i < n_starts; ++i) starts.push_back(random_start(space, seed, i));
  for (const auto& s : starts) check_params(space, s);

  SearchResult out;
  out.name = name;
  out.seed = seed;
  out.starts.resize(starts.size());
  const Objective f = [&](std::span<const double> x) { return objective(space, x, name); };
  parallel_for(starts.size(), resolve_threads(threads), [&](std::size_t i) {
    out.starts[i].index = i;
    out.starts[i].start = starts[i];
    out.starts[i].run = nelder_mead(f, starts[i], options);
  });

  out.best_margin = std::numeric_limits<double>::infinity();
  for (const auto& s : out.starts) {
    out.evaluations += s.run.evaluations;
    if (s.run.value < out.best_margin) {
      out.best_margin = s.run.value;
      out.best_params = s.run.x;
      out.best_start = s.index;
    }
  }
  return out;
}

}  // namespace bellmom::search
