// Acceptance checks: one PASS/FAIL line per criterion, with measured values
// and wall time. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "bellmom/cli.hpp"
#include "bellmom/error.hpp"
#include "bellmom/lhv.hpp"
#include "bellmom/random_instances.hpp"
#include "bellmom/scenarios.hpp"
#include "bellmom/search.hpp"
#include "bellmom/serialize.hpp"
#include "bellmom/sospoly.hpp"
#include "bellmom/weakmeas.hpp"
#include "classical_samples.hpp"

using namespace bellmom;
using ineq::InequalityName;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += "[failed: " + what + "] ";
    }
  }
  void note(const std::string& s) { detail += s + " "; }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double time_limit, const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail += std::string("[exception: ") + e.what() + "] ";
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit > 0 && dt >= time_limit) {
    o.pass = false;
    o.detail += "[over time limit " + num(time_limit) + " s] ";
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s | %s| %.2f s\n", o.pass ? "PASS" : "FAIL", id, title,
              o.detail.c_str(), dt);
  std::fflush(stdout);
}

// Random Hermitian observables, or rank-1 projectors, which sit closer to the
// boundary of the inequalities.
BipartiteScenario random_qubit_scenario(Rng& rng, int choices, bool projectors) {
  const auto op = [&] { return projectors ? random::projector(2, rng) : random::hermitian(2, rng); };
  std::vector<qcore::Observable> a, b;
  for (int x = 1; x <= choices; ++x) a.emplace_back(qcore::Party::A, x, op());
  for (int y = 1; y <= choices; ++y) b.emplace_back(qcore::Party::B, y, op());
  return BipartiteScenario(random::state(2, 2, rng), std::move(a), std::move(b));
}

}  // namespace

int main() {
  criterion(1, "exact in33 violation on the three-projector Bell scenario", 1.0, [] {
    Outcome o;
    std::ostringstream out, err;
    const int code = cli::run({"verify", "in33", "--format", "json"}, out, err);
    const auto j = io::Json::parse(out.str());
    const double lhs = j["report"]["lhs"].get<double>(), rhs = j["report"]["rhs"].get<double>();
    o.note("lhs=" + num(lhs) + " rhs=" + num(rhs) + " margin=" + num(lhs - rhs) +
           " exit=" + std::to_string(code));
    o.require(code == 0, "exit code 0");
    o.require(std::abs(lhs - 9.0 / 8.0) <= 1e-12, "lhs = 9/8 within 1e-12");
    o.require(std::abs(rhs - 10.0 / 8.0) <= 1e-12, "rhs = 10/8 within 1e-12");
    o.require(std::abs(lhs - rhs + 0.125) <= 1e-12, "margin = -1/8");
    return o;
  });

  criterion(2, "Bell correlators <A_x B_y> = (1 - cos(2 pi (x-y)/3))/4", 0, [] {
    Outcome o;
    const auto t = ineq::table_from_scenario(scenarios::bell_three_choices());
    double worst = 0.0;
    for (int x = 1; x <= 3; ++x)
      for (int y = 1; y <= 3; ++y) {
        const double expect = (1.0 - std::cos(2.0 * std::numbers::pi * (x - y) / 3.0)) / 4.0;
        worst = std::max(worst, std::abs(t(x, y, 1, 1) - expect));
      }
    o.note("max error=" + num(worst));
    o.require(worst <= 1e-12, "all 9 pairs within 1e-12");
    return o;
  });

  criterion(3, "ine22 violation window over 1000 phi points", 5.0, [] {
    Outcome o;
    const double q = std::numbers::pi / 4;
    const auto pts = scenarios::sweep_ine22(scenarios::linspace(0.0, q, 1000));
    bool interior = true;
    double worst_interior = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      interior = interior && pts[i].margin < 0.0;
      worst_interior = std::max(worst_interior, pts[i].margin);
    }
    o.require(interior, "margin < 0 at every interior point");
    o.require(std::abs(pts.front().margin) <= 1e-10 && std::abs(pts.back().margin) <= 1e-10,
              "endpoint margins within 1e-10");
    // Outside the window (cos^2 phi < 1/2) no violation.
    const auto outer = scenarios::sweep_ine22(scenarios::linspace(q, 1.5, 1000));
    double lowest_outer = std::numeric_limits<double>::infinity();
    for (const auto& p : outer) lowest_outer = std::min(lowest_outer, p.margin);
    o.require(lowest_outer >= -1e-10, "no violation on [pi/4, 1.5]");
    const auto at = scenarios::sweep_ine22({std::numbers::pi / 6})[0];
    o.require(std::abs(at.margin + 0.05) <= 1e-12, "margin(pi/6) = -0.05 within 1e-12");
    o.note("max interior margin=" + num(worst_interior) + " endpoints=" + num(pts.front().margin) +
           "," + num(pts.back().margin) + " min outside=" + num(lowest_outer) +
           " margin(pi/6)=" + num(at.margin));
    return o;
  });

  criterion(4, "null events (r = 0.01): in33 satisfied, in33r violated", 0, [] {
    Outcome o;
    const double r = 0.01;
    const auto a = ineq::eval_in33(
        ineq::null_mix(ineq::table_from_scenario(scenarios::bell_three_choices()), r));
    const auto b = ineq::eval_in33r(ineq::null_mix(
        ineq::table_from_scenario(scenarios::bell_three_choices_complemented()), r));
    o.note("in33 margin=" + num(a.margin) + " in33r margin=" + num(b.margin));
    o.require(a.satisfied, "in33 satisfied");
    o.require(!b.satisfied, "in33r violated");
    return o;
  });

  criterion(5, "CFRD and random Salles-class instances hold on 500 random qubit scenarios", 30.0, [] {
    Outcome o;
    double lowest = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
      Rng rng = make_stream(seed, 901);
      const auto t = ineq::table_from_scenario(random_qubit_scenario(rng, 3, seed % 2 == 1));
      lowest = std::min(lowest, ineq::eval_cfrd(t).margin);
      for (int k = 0; k < 3; ++k) {
        const auto c = random::salles_coefficients(1 + k, 3, 3, rng);
        lowest = std::min(lowest, ineq::eval_salles_class(t, c).margin);
      }
    }
    o.note("lowest margin=" + num(lowest));
    o.require(lowest >= -1e-9, "margin >= -1e-9");
    return o;
  });

  criterion(6, "classical soundness over 1e5 random assignments", 60.0, [] {
    Outcome o;
    double worst_rel = std::numeric_limits<double>::infinity();
    std::size_t checks = 0;
    for (std::uint64_t seed = 0; seed < 100000; ++seed) {
      Rng rng = make_stream(seed, 902);
      const auto s = testing::random_classical(rng, 3);
      const auto t = ineq::table_from_lhv_samples(s);
      std::vector<ineq::InequalityReport> reps{ineq::eval_cfrd(t), ineq::eval_in33(t),
                                               ineq::eval_in33r(t), ineq::eval_ine22(t)};
      reps.push_back(ineq::eval_salles_class(t, random::salles_coefficients(2, 3, 3, rng)));
      for (const auto& r : reps) {
        ++checks;
        const double scale = std::max(1.0, std::abs(r.lhs) + std::abs(r.rhs));
        worst_rel = std::min(worst_rel, r.margin / scale);
        if (r.margin < testing::margin_floor(r)) o.require(false, r.name + " seed " + std::to_string(seed));
      }
      double wscale = 1.0;
      for (int x = 1; x <= 2; ++x)
        for (int y = 1; y <= 2; ++y) wscale += t(x, y, 2, 2) + t(x, y, 2, 0) + t(x, y, 0, 2);
      const double w = sos::avg_w(t);
      ++checks;
      worst_rel = std::min(worst_rel, w / wscale);
      if (w < -1e-9 * wscale) o.require(false, "<W> seed " + std::to_string(seed));
    }
    o.note(std::to_string(checks) + " evaluations, lowest margin/scale=" + num(worst_rel) +
           " (floor -1e-9 * max(1, |lhs|+|rhs|))");
    return o;
  });

  criterion(7, "weak-measurement recovery, g = 0.5, n = 1e6 (subtract and twin)", 120.0, [] {
    Outcome o;
    for (auto scheme : {weak::Scheme::Subtract, weak::Scheme::Twin}) {
      weak::WeakConfig cfg;
      cfg.g = 0.5;
      cfg.scheme = scheme;
      cfg.samples = 1000000;
      cfg.seed = 2024;
      const auto wt = weak::table_from_weak(scenarios::bell_three_choices(), cfg, 0);
      const auto& p = wt.pair(1, 2);
      const double est = p(2, 2), se = p.error(2, 2);
      const auto v = weak::evaluate_weak(wt, InequalityName::In33);
      const std::string tag(weak::to_string(scheme));
      o.note(tag + ": <A1^2B2^2>=" + num(est) + "+-" + num(se) + " in33 margin=" +
             num(v.report.margin) + "+-" + num(v.sigma) + ";");
      o.require(std::abs(est - 0.375) <= 5 * se, tag + " <A1^2B2^2> within 5 SE of 0.375");
      o.require(std::isfinite(v.sigma) && std::abs(v.report.margin + 0.125) <= 5 * v.sigma,
                tag + " in33 margin within 5 sigma of -0.125");
    }
    return o;
  });

  criterion(8, "two-choice LHV construction reproduces quantum moments (500 instances)", 120.0, [] {
    Outcome o;
    double worst = 0.0;
    bool semi = true;
    std::size_t c_branch = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
      Rng rng = make_stream(seed, 903);
      const int N = 2 + static_cast<int>(seed % 3);
      const std::size_t da = N + (seed / 3) % 3, db = N + (seed / 9) % 3;
      const auto in = lhv::random_input(N, da, db, 1 + seed % 3, rng, seed % 2 == 0);
      const auto c = lhv::check(in);
      worst = std::max(worst, c.max_discrepancy);
      semi = semi && c.semipositive;
      c_branch += c.c_positive_branch ? 1 : 0;
    }
    o.note("max discrepancy=" + num(worst) + " c>0 branch in " + std::to_string(c_branch) +
           " instances");
    o.require(worst <= 1e-9, "moments within 1e-9");
    o.require(semi, "weights and variances nonnegative");
    return o;
  });

  criterion(9, "positive non-SOS polynomial suite", 0, [] {
    Outcome o;
    const auto m = sos::min_w(100, 1);
    o.require(m.value >= -1e-8, "min_w >= -1e-8");
    Rng rng = make_stream(1, 904);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double rot = 0.0;
    bool chain = true, amgm = true;
    const double k = std::pow(2.0 / 3.0, 1.5);
    for (int i = 0; i < 100000; ++i) {
      const sos::PolyPoint p{u(rng), u(rng), u(rng), u(rng)};
      const auto r = sos::rotate(p);
      rot = std::max(rot, std::abs(sos::eval_w(p) - sos::eval_w_rotated(r)));
      const double a = std::hypot(r.a_plus, r.a_minus), b = std::hypot(r.b_plus, r.b_minus);
      const double ab = a * b * std::sqrt(a * a + b * b);
      chain = chain && std::abs(r.a_plus * r.b_plus * (r.a_minus + r.b_minus)) <= k * ab * (1 + 1e-12);
      amgm = amgm && a * a + b * b + a * a * b * b >= 2 * ab * (1 - 1e-12);
    }
    o.require(rot <= 1e-10, "rotated form within 1e-10");
    o.require(chain, "|A+B+(A-+B-)| <= (2/3)^(3/2) A B sqrt(A^2+B^2)");
    o.require(amgm, "A^2+B^2+A^2B^2 >= 2 sqrt(A^2+B^2) A B");
    const auto cert = sos::non_sos_certificate();
    o.require(std::abs(cert.lower_bound - 3.375) <= 1e-12 && cert.upper_bound == 3.0,
              "bound pair (3.375, 3)");
    o.require(cert.infeasible, "verdict Infeasible");
    o.require(cert.min_violation > 0.1, "min constraint violation > 0.1");
    const auto tm = sos::t_subcheck();
    o.require(std::abs(tm.t - 4.0 / 3.0) <= 1e-10 && std::abs(tm.value - 32.0 / 27.0) <= 1e-10,
              "max t^2(2-t) = 32/27 at t = 4/3");
    o.note("min_w=" + num(m.value) + " rotated max diff=" + num(rot) + " bounds=(" +
           num(cert.lower_bound) + ", " + num(cert.upper_bound) + ") " +
           (cert.infeasible ? "Infeasible" : "Feasible") + " min violation=" +
           num(cert.min_violation) + " t*=" + num(tm.t) + " max=" + num(tm.value));
    return o;
  });

  criterion(10, "multi-start search regressions (100 random starts each)", 300.0, [] {
    Outcome o;
    const auto run = [](InequalityName name) {
      const auto sp = search::SearchSpace::for_inequality(name, true);
      return search::multi_start(sp, name, 100, 1, search::NelderMeadOptions::adaptive(sp.dim()),
                                 {}, 0);
    };
    const auto in33 = run(InequalityName::In33);
    const auto ine22 = run(InequalityName::Ine22);
    const auto cfrd = run(InequalityName::Cfrd);
    o.note("in33 best=" + num(in33.best_margin) + " ine22 best=" + num(ine22.best_margin) +
           " cfrd best=" + num(cfrd.best_margin));
    o.require(in33.best_margin <= -0.125 + 1e-6, "in33 <= -0.125 + 1e-6");
    o.require(ine22.best_margin <= -0.05 + 1e-6, "ine22 <= -0.05 + 1e-6");
    o.require(cfrd.best_margin >= -1e-6, "cfrd >= -1e-6");
    return o;
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
