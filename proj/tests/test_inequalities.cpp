#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bellmom/error.hpp"
#include "bellmom/inequalities.hpp"
#include "bellmom/random_instances.hpp"
#include "bellmom/scenarios.hpp"
#include "classical_samples.hpp"

using namespace bellmom;
using namespace bellmom::ineq;

namespace {

MomentTable null_table(int ma, int mb) {
  std::vector<double> v(MomentTable::size_for(ma, mb), 0.0);
  for (std::size_t i = 0; i < v.size(); i += 9) v[i] = 1.0;
  return MomentTable(ma, mb, std::move(v));
}

MomentTable bell_table() { return table_from_scenario(scenarios::bell_three_choices()); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

// in33 written out over per-sample values, for a single deterministic sample.
double in33_margin_direct(const double* a, const double* b) {
  auto s = [&](int x, int y) { return a[x - 1] * a[x - 1] * b[y - 1] * b[y - 1]; };
  const double lhs = s(1, 2) + s(2, 3) + s(3, 1) + 2 * std::sqrt(s(1, 3) * s(2, 2)) +
                     2 * std::sqrt(s(2, 1) * s(3, 3)) + 2 * std::sqrt(s(3, 2) * s(1, 1));
  const double rhs = 2 * (a[0] * b[1] + a[1] * b[2] + a[2] * b[0]) - 1;
  return lhs - rhs;
}

}  // namespace

TEST_CASE("table_from_scenario: Bell correlators") {
  const auto t = bell_table();
  for (int x = 1; x <= 3; ++x)
    for (int y = 1; y <= 3; ++y) {
      const double expect = (1.0 - std::cos(2.0 * std::numbers::pi * (x - y) / 3.0)) / 4.0;
      CHECK(std::abs(t(x, y, 1, 1) - expect) <= 1e-12);
      CHECK(std::abs(t(x, y, 2, 2) - expect) <= 1e-12);
      CHECK(t(x, y, 0, 0) == 1.0);
    }
  CHECK(std::abs(t(1, 2, 1, 1) - 0.375) <= 1e-12);
  CHECK(std::abs(t(2, 2, 1, 1)) <= 1e-12);
}

TEST_CASE("table_from_scenario: product state and tilted state") {
  using namespace qcore;
  const Complex z[2] = {1.0, 0.0};
  const auto p0 = ComplexMatrix::outer(z);
  std::vector<Observable> a{Observable(Party::A, 1, p0)};
  std::vector<Observable> b{Observable(Party::B, 1, p0)};
  const auto t = table_from_scenario(BipartiteScenario(BipartiteState::product(z, z), a, b));
  for (int k = 0; k <= 2; ++k)
    for (int l = 0; l <= 2; ++l) CHECK(t(1, 1, k, l) == doctest::Approx(1.0).epsilon(1e-15));

  const double phi = std::numbers::pi / 6;
  const auto tt = table_from_scenario(scenarios::tilted_two_choices(phi));
  const double expect = 0.1 * std::cos(phi) * std::cos(phi);
  CHECK(std::abs(expect - 3.0 / 40.0) < 1e-15);
  for (int k = 1; k <= 2; ++k)
    for (int l = 1; l <= 2; ++l) CHECK(std::abs(tt(1, 2, k, l) - expect) <= 1e-12);
}

TEST_CASE("table_from_lhv_samples") {
  HiddenVariableSamples ones(3, 3);
  const double one[3] = {1, 1, 1};
  ones.add(one, one);
  const auto all_ones = table_from_lhv_samples(ones);
  for (double v : all_ones.entries()) CHECK(v == 1.0);

  HiddenVariableSamples det(2, 2);
  const double a[2] = {2, 0}, b[2] = {0, 3};
  det.add(a, b);
  CHECK(table_from_lhv_samples(det)(1, 2, 2, 2) == 36.0);
  CHECK(table_from_lhv_samples(det)(2, 2, 2, 2) == 0.0);

  Rng rng = make_stream(3, 0);
  std::bernoulli_distribution coin;
  const int n = 20000;
  HiddenVariableSamples pm(2, 2);
  double av[2], bv[2];
  for (int i = 0; i < n; ++i) {
    for (auto& v : av) v = coin(rng) ? 1.0 : -1.0;
    for (auto& v : bv) v = coin(rng) ? 1.0 : -1.0;
    pm.add(av, bv);
  }
  const auto t = table_from_lhv_samples(pm);
  for (int x = 1; x <= 2; ++x)
    for (int y = 1; y <= 2; ++y) {
      CHECK(std::abs(t(x, y, 1, 1)) <= 5.0 / std::sqrt(n));
      CHECK(t(x, y, 2, 2) == 1.0);
    }

  CHECK(code_of([] { (void)table_from_lhv_samples(HiddenVariableSamples(2, 2)); }) ==
        ErrorCode::EmptySample);
}

TEST_CASE("weighted samples equal repeated samples") {
  Rng rng = make_stream(4, 0);
  std::uniform_real_distribution<double> u(-1, 1);
  HiddenVariableSamples w(2, 2), rep(2, 2);
  for (int i = 0; i < 30; ++i) {
    const double a[2] = {u(rng), u(rng)}, b[2] = {u(rng), u(rng)};
    const int copies = 1 + i % 3;
    w.add(a, b, copies);
    for (int c = 0; c < copies; ++c) rep.add(a, b);
  }
  const auto tw = table_from_lhv_samples(w), tr = table_from_lhv_samples(rep);
  for (std::size_t i = 0; i < tw.entries().size(); ++i)
    CHECK(tw.entries()[i] == doctest::Approx(tr.entries()[i]).epsilon(1e-13));
}

TEST_CASE("MomentTable validation") {
  const auto bell = bell_table();
  const auto v = bell.entries();
  std::vector<double> bad(v.begin(), v.end());
  bad[MomentTable(3, 3, std::vector<double>(v.begin(), v.end())).index(1, 2, 1, 0)] += 1e-6;
  CHECK_THROWS_AS(MomentTable(3, 3, bad), Error);
  CHECK_NOTHROW(MomentTable(3, 3, bad, TableCheck::Statistical));
  CHECK(code_of([&] { MomentTable(3, 2, std::vector<double>(v.begin(), v.end())); }) ==
        ErrorCode::ShapeMismatch);
  std::vector<double> unnorm(v.begin(), v.end());
  unnorm[0] = 0.5;
  CHECK(code_of([&] { MomentTable(3, 3, unnorm, TableCheck::Statistical); }) ==
        ErrorCode::NotNormalized);
}

TEST_CASE("eval_cfrd") {
  const auto r = eval_cfrd(bell_table());
  CHECK(r.satisfied);
  CHECK(std::abs(r.lhs - 0.75) <= 1e-12);
  CHECK(std::abs(r.rhs - 9.0 / 16.0) <= 1e-12);
  const auto z = eval_cfrd(null_table(2, 2));
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.satisfied);
  CHECK(code_of([] { (void)eval_cfrd(null_table(1, 2)); }) == ErrorCode::NotEnoughChoices);
}

TEST_CASE("eval_salles_class") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng = make_stream(seed, 21);
    using namespace qcore;
    std::vector<Observable> a, b;
    for (int x = 1; x <= 2; ++x) {
      a.emplace_back(Party::A, x, random::hermitian(2, rng));
      b.emplace_back(Party::B, x, random::hermitian(2, rng));
    }
    const auto t = table_from_scenario(BipartiteScenario(random::state(2, 2, rng), a, b));
    const auto s = eval_salles_class(t, SallesCoefficients::cfrd());
    const auto c = eval_cfrd(t);
    CHECK(s.lhs == c.lhs);
    CHECK(std::abs(s.rhs - c.rhs) <= 1e-15 * std::max(1.0, c.rhs));
    CHECK(s.satisfied);
    const auto rnd = eval_salles_class(t, random::salles_coefficients(1 + seed % 3, 2, 2, rng));
    CHECK(rnd.margin >= -1e-9);
  }
  const SallesCoefficients zero{2, 2, 2, std::vector<double>(8, 0.0)};
  const auto z = eval_salles_class(table_from_scenario(scenarios::tilted_two_choices(0.3)), zero);
  CHECK(z.rhs == 0.0);
  CHECK(z.satisfied);
  CHECK(code_of([&] { (void)eval_salles_class(bell_table(), zero); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("eval_in33 on the Bell scenario") {
  const auto r = eval_in33(bell_table());
  CHECK(std::abs(r.lhs - 9.0 / 8.0) <= 1e-12);
  CHECK(std::abs(r.rhs - 10.0 / 8.0) <= 1e-12);
  CHECK(std::abs(r.margin + 1.0 / 8.0) <= 1e-12);
  CHECK_FALSE(r.satisfied);
  const auto z = eval_in33(null_table(3, 3));
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == -1.0);
  CHECK(z.satisfied);
  CHECK(code_of([] { (void)eval_in33(null_table(2, 3)); }) == ErrorCode::NotEnoughChoices);
}

TEST_CASE("eval_in33 matches the per-sample formula") {
  Rng rng = make_stream(5, 0);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 1000; ++trial) {
    double a[3], b[3];
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    HiddenVariableSamples s(3, 3);
    s.add(a, b);
    const double m = eval_in33(table_from_lhv_samples(s)).margin;
    CHECK(m == doctest::Approx(in33_margin_direct(a, b)).epsilon(1e-12));
    CHECK(m >= -1e-9);
  }
}

TEST_CASE("square-root clamp policy") {
  const MomentTable ref = null_table(3, 3);
  std::vector<double> e(ref.entries().begin(), ref.entries().end());
  e[ref.index(1, 3, 2, 2)] = -1e-13;
  CHECK_NOTHROW(eval_in33(MomentTable(3, 3, e, TableCheck::Statistical)));
  e[ref.index(1, 3, 2, 2)] = -1e-6;
  const MomentTable noisy(3, 3, e, TableCheck::Statistical);
  CHECK(code_of([&] { (void)eval_in33(noisy); }) == ErrorCode::NegativeSecondMoment);
  CHECK_NOTHROW(eval_in33(noisy, SqrtPolicy::ClampNegative));
}

TEST_CASE("null_mix") {
  const auto t = bell_table();
  CHECK(null_mix(t, 1.0) == t);
  const auto h = null_mix(t, 0.5);
  CHECK(h(1, 2, 1, 1) == doctest::Approx(3.0 / 16.0).epsilon(1e-14));
  CHECK(h(1, 2, 0, 0) == 1.0);
  CHECK(code_of([&] { (void)null_mix(t, 0.0); }) == ErrorCode::RateOutOfRange);
  CHECK(code_of([&] { (void)null_mix(t, 1.5); }) == ErrorCode::RateOutOfRange);
  for (double r : {1e-9, 1e-4, 0.3, 0.77, 1.0}) {
    const auto m = null_mix(t, r);
    CHECK(m.choices_a() == 3);
    // in33 under null mixing: lhs 9r/8, rhs 9r/4 - 1.
    CHECK(std::abs(eval_in33(m).margin - (1.0 - 9.0 * r / 8.0)) <= 1e-12);
  }
  CHECK(eval_in33(null_mix(t, 1e-12)).margin == doctest::Approx(1.0));
}

TEST_CASE("in33 null-rate crossover") {
  const auto t = bell_table();
  double lo = 0.01, hi = 1.0;  // satisfied at lo, violated at hi
  REQUIRE(eval_in33(null_mix(t, lo)).satisfied);
  REQUIRE_FALSE(eval_in33(null_mix(t, hi)).satisfied);
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (eval_in33(null_mix(t, mid)).margin >= 0.0 ? lo : hi) = mid;
  }
  CHECK(lo == doctest::Approx(8.0 / 9.0).epsilon(1e-10));
  for (double r : {0.5, 0.1, 0.01}) CHECK(eval_in33(null_mix(t, r)).satisfied);
}

TEST_CASE("complement is an involution") {
  Rng rng = make_stream(6, 0);
  const auto t = table_from_lhv_samples(testing::random_classical(rng));
  const int a[] = {1, 3}, b[] = {2};
  const auto back = complement(complement(t, a, b), a, b);
  for (std::size_t i = 0; i < t.entries().size(); ++i)
    CHECK(back.entries()[i] == doctest::Approx(t.entries()[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("complemented Bell scenario equals complemented table") {
  const auto direct = table_from_scenario(scenarios::bell_three_choices_complemented());
  const auto derived = complement_for_in33r(bell_table());
  for (std::size_t i = 0; i < direct.entries().size(); ++i)
    CHECK(std::abs(direct.entries()[i] - derived.entries()[i]) <= 1e-12);
}

TEST_CASE("eval_in33r on the null-mixed complemented Bell table") {
  const auto measured = table_from_scenario(scenarios::bell_three_choices_complemented());
  for (double r : {1.0, 0.5, 0.1, 0.01}) {
    const auto rep = eval_in33r(null_mix(measured, r));
    // Hand expansion: lhs - 1 = r/8, rhs - 1 = r/4.
    CHECK(std::abs(rep.lhs - r / 8.0) <= 1e-12);
    CHECK(std::abs(rep.rhs - r / 4.0) <= 1e-12);
    CHECK_FALSE(rep.satisfied);
    const auto plain = eval_in33(null_mix(bell_table(), r));
    if (r == 1.0) CHECK(std::abs(rep.margin - plain.margin) <= 1e-12);
    if (r <= 0.5) CHECK(plain.satisfied);
  }
}

TEST_CASE("eval_in33r equals eval_in33 on the complemented variables") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng = make_stream(seed, 22);
    const auto t = table_from_lhv_samples(testing::random_classical(rng));
    const auto direct = eval_in33r(t);
    const auto via = eval_in33(complement_for_in33r(t));
    const double scale = std::max(1.0, std::abs(via.lhs));
    CHECK(std::abs(direct.lhs - (via.lhs - 1.0)) <= 1e-10 * scale);
    CHECK(std::abs(direct.rhs - (via.rhs - 1.0)) <= 1e-10 * scale);
  }
}

TEST_CASE("eval_ine22 on the tilted scenario") {
  const auto r = eval_ine22(table_from_scenario(scenarios::tilted_two_choices(std::numbers::pi / 6)));
  CHECK(std::abs(r.lhs - 0.25) <= 1e-12);
  CHECK(std::abs(r.rhs - 0.3) <= 1e-12);
  CHECK(std::abs(r.margin + 0.05) <= 1e-12);
  CHECK_FALSE(r.satisfied);
  const auto m = eval_ine22(table_from_scenario(scenarios::tilted_two_choices(std::numbers::pi / 4)));
  CHECK(std::abs(m.margin) <= 1e-10);
}

TEST_CASE("classical soundness of every evaluator") {
  for (std::uint64_t seed = 0; seed < 5000; ++seed) {
    Rng rng = make_stream(seed, 23);
    const auto t = table_from_lhv_samples(testing::random_classical(rng));
    for (const auto& r : {eval_cfrd(t), eval_in33(t), eval_in33r(t), eval_ine22(t),
                          eval_salles_class(t, random::salles_coefficients(1 + seed % 4, 3, 3, rng))})
      CHECK_MESSAGE(r.margin >= testing::margin_floor(r), r.name << " seed " << seed);
  }
}

TEST_CASE("names") {
  for (auto n : {InequalityName::Cfrd, InequalityName::In33, InequalityName::In33r,
                 InequalityName::Ine22})
    CHECK(parse_inequality(to_string(n)) == n);
  CHECK(code_of([] { (void)parse_inequality("chsh"); }) == ErrorCode::UnknownInequality);
  CHECK(required_choices(InequalityName::In33r) == 3);
  CHECK(required_choices(InequalityName::Ine22) == 2);
}
