#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bellmom/error.hpp"
#include "bellmom/kernels.hpp"
#include "bellmom/random_instances.hpp"

using namespace bellmom;
using namespace bellmom::kernels;

namespace {

std::vector<double> draws(std::size_t n, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

bool near(double a, double b, double scale) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, scale);
}

const std::size_t kSizes[] = {0, 1, 3, 4, 5, 7, 8, 17, 1000, 4099};

}  // namespace

TEST_CASE("power_sums: brute-force oracle") {
  Rng rng = make_stream(1, 0);
  const auto a = draws(33, rng), b = draws(33, rng);
  auto w = draws(33, rng);
  for (auto& x : w) x = std::abs(x);
  for (Isa isa : {Isa::Scalar, Isa::Avx2}) {
    if (!isa_available(isa)) continue;
    const auto s = power_sums(isa, a, b, w);
    for (int k = 0; k <= 2; ++k)
      for (int l = 0; l <= 2; ++l) {
        double ref = 0.0, mag = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
          const double t = w[i] * std::pow(a[i], k) * std::pow(b[i], l);
          ref += t;
          mag += std::abs(t);
        }
        CHECK(near(s[3 * k + l], ref, mag));
      }
  }
}

TEST_CASE("AVX2 kernels match the scalar reference") {
  if (!isa_available(Isa::Avx2)) {
    MESSAGE("AVX2 not available; equivalence not exercised");
    return;
  }
  Rng rng = make_stream(2, 0);
  for (std::size_t n : kSizes) {
    const auto a = draws(n, rng, 2.0), ap = draws(n, rng, 2.0);
    const auto b = draws(n, rng, 2.0), bp = draws(n, rng, 2.0);
    auto w = draws(n, rng);
    for (auto& x : w) x = std::abs(x);

    for (bool weighted : {false, true}) {
      const std::span<const double> ws = weighted ? std::span<const double>(w) : std::span<const double>();
      const auto s0 = power_sums(Isa::Scalar, a, b, ws);
      const auto s1 = power_sums(Isa::Avx2, a, b, ws);
      const auto mag = power_sums(Isa::Scalar, a, b, ws)[8] + 1.0;
      for (int k = 0; k < 9; ++k) CHECK(near(s0[k], s1[k], mag * 16));
    }

    EstimatorSums e0, e1, t0, t1;
    subtract_estimators(Isa::Scalar, a, b, 0.5, e0);
    subtract_estimators(Isa::Avx2, a, b, 0.5, e1);
    twin_estimators(Isa::Scalar, a, ap, b, bp, t0);
    twin_estimators(Isa::Avx2, a, ap, b, bp, t1);
    CHECK(e0.count == n);
    CHECK(e1.count == n);
    CHECK(t1.count == n);
    for (int k = 0; k < 8; ++k) {
      CHECK(near(e0.sum[k], e1.sum[k], e0.sumsq[k] + 1.0));
      CHECK(near(e0.sumsq[k], e1.sumsq[k], e0.sumsq[k]));
      CHECK(near(t0.sum[k], t1.sum[k], t0.sumsq[k] + 1.0));
      CHECK(near(t0.sumsq[k], t1.sumsq[k], t0.sumsq[k]));
    }

    std::vector<double> w0(n), w1(n);
    eval_w_batch(Isa::Scalar, a, ap, b, bp, w0);
    eval_w_batch(Isa::Avx2, a, ap, b, bp, w1);
    for (std::size_t i = 0; i < n; ++i) {
      const double scale = (a[i] * a[i] + ap[i] * ap[i]) * (b[i] * b[i] + bp[i] * bp[i]) + 1.0;
      CHECK(near(w0[i], w1[i], scale * 16));
    }
  }
}

TEST_CASE("estimator sums are additive over chunks") {
  Rng rng = make_stream(3, 0);
  const auto a = draws(1001, rng), b = draws(1001, rng);
  EstimatorSums whole, parts;
  subtract_estimators(a, b, 0.25, whole);
  for (std::size_t lo = 0; lo < a.size(); lo += 97) {
    const std::size_t len = std::min<std::size_t>(97, a.size() - lo);
    subtract_estimators(std::span(a).subspan(lo, len), std::span(b).subspan(lo, len), 0.25, parts);
  }
  CHECK(whole.count == parts.count);
  for (int k = 0; k < 8; ++k) CHECK(near(whole.sum[k], parts.sum[k], whole.sumsq[k]));
  EstimatorSums diff = whole;
  diff -= parts;
  CHECK(diff.count == 0);
}

TEST_CASE("dispatch override") {
  const Isa before = active_isa();
  set_isa(Isa::Scalar);
  CHECK(active_isa() == Isa::Scalar);
  reset_isa();
  CHECK(active_isa() == before);
  if (!isa_available(Isa::Avx2)) CHECK_THROWS_AS(set_isa(Isa::Avx2), Error);
  CHECK(to_string(Isa::Avx2) == "avx2");
}

TEST_CASE("kernel shape checks") {
  const std::vector<double> a(3), b(4);
  CHECK_THROWS_AS(power_sums(a, b), Error);
  EstimatorSums acc;
  CHECK_THROWS_AS(subtract_estimators(a, b, 0.0, acc), Error);
  std::vector<double> out(2);
  CHECK_THROWS_AS(eval_w_batch(a, a, a, a, out), Error);
}
