#include "bellmom/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bellmom/constants.hpp"
#include "bellmom/error.hpp"
#include "bellmom/kernels.hpp"

namespace bellmom::ineq {

namespace {

std::string pos(int x, int y, int k, int l) {
  return "[" + std::to_string(x) + "][" + std::to_string(y) + "][" + std::to_string(k) + "][" +
         std::to_string(l) + "]";
}

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

constexpr double kCancellationUlps = 64.0;

// `scale` is the magnitude of the terms that produced `v`; rounding dust of
// that size is clamped to zero.
double clamp_nonnegative(double v, double scale, SqrtPolicy policy, const char* what) {
  // Cancellation residue of a difference of terms of size `scale`.
  if (std::abs(v) <= kCancellationUlps * std::numeric_limits<double>::epsilon() * scale) return 0.0;
  if (v >= 0.0) return v;
  if (v >= -tol::sqrt_clamp * std::max(1.0, scale) || policy == SqrtPolicy::ClampNegative)
    return 0.0;
  throw Error(ErrorCode::NegativeSecondMoment,
              std::string(what) + " = " + std::to_string(v) + " under a square root");
}

void require_choices(const MomentTable& t, int need, const char* name) {
  if (t.choices_a() < need || t.choices_b() < need)
    throw Error(ErrorCode::NotEnoughChoices, std::string(name) + " needs " +
                                                 std::to_string(need) + " choices per party");
}

// (1 - u)^k = sum_j kComplementCoeff[k][j] u^j
constexpr double kComplementCoeff[3][3] = {{1, 0, 0}, {1, -1, 0}, {1, -2, 1}};

}  // namespace

MomentTable::MomentTable(int choices_a, int choices_b, std::vector<double> entries,
                         TableCheck check)
    : ma_(choices_a), mb_(choices_b), v_(std::move(entries)), check_(check) {
  if (ma_ < 1 || mb_ < 1)
    throw Error(ErrorCode::InvalidArgument, "moment table needs >= 1 choice per party");
  if (v_.size() != size_for(ma_, mb_))
    throw Error(ErrorCode::ShapeMismatch, "moment table has " + std::to_string(v_.size()) +
                                              " entries, expected " +
                                              std::to_string(size_for(ma_, mb_)));
  for (double v : v_)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite moment");

  for (int x = 1; x <= ma_; ++x)
    for (int y = 1; y <= mb_; ++y) {
      const double norm = (*this)(x, y, 0, 0);
      if (std::abs(norm - 1.0) > tol::normalization)
        throw Error(ErrorCode::NotNormalized, "entry " + pos(x, y, 0, 0) + " must be 1");
    }
  if (check == TableCheck::Statistical) return;

  const double marginal_tol =
      check == TableCheck::Exact ? tol::marginal_exact : tol::marginal_sampled;
  for (int x = 1; x <= ma_; ++x)
    for (int y = 1; y <= mb_; ++y)
      for (int p = 1; p <= 2; ++p) {
        if (!close((*this)(x, y, p, 0), (*this)(x, 1, p, 0), marginal_tol))
          throw Error(ErrorCode::InvalidArgument,
                      "A marginal " + pos(x, y, p, 0) + " depends on the B choice");
        if (!close((*this)(x, y, 0, p), (*this)(1, y, 0, p), marginal_tol))
          throw Error(ErrorCode::InvalidArgument,
                      "B marginal " + pos(x, y, 0, p) + " depends on the A choice");
      }
  for (int x = 1; x <= ma_; ++x)
    for (int y = 1; y <= mb_; ++y)
      if ((*this)(x, y, 2, 0) < -tol::sqrt_clamp || (*this)(x, y, 0, 2) < -tol::sqrt_clamp)
        throw Error(ErrorCode::NegativeSecondMoment, "negative second moment at " + pos(x, y, 2, 0));
}

HiddenVariableSamples::HiddenVariableSamples(int choices_a, int choices_b)
    : a(static_cast<std::size_t>(std::max(choices_a, 0))),
      b(static_cast<std::size_t>(std::max(choices_b, 0))) {
  if (choices_a < 1 || choices_b < 1)
    throw Error(ErrorCode::InvalidArgument, "samples need >= 1 choice per party");
}

void HiddenVariableSamples::add(std::span<const double> a_values,
                                std::span<const double> b_values, double weight) {
  if (a_values.size() != a.size() || b_values.size() != b.size())
    throw Error(ErrorCode::ShapeMismatch, "sample tuple has the wrong number of choices");
  if (!(weight >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative sample weight");
  if (weight != 1.0 && weights.empty()) weights.assign(size(), 1.0);
  for (std::size_t x = 0; x < a.size(); ++x) a[x].push_back(a_values[x]);
  for (std::size_t y = 0; y < b.size(); ++y) b[y].push_back(b_values[y]);
  if (!weights.empty()) weights.push_back(weight);
}

InequalityReport InequalityReport::make(std::string name, double lhs, double rhs) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = lhs - rhs;
  r.satisfied = r.margin >= -tol::satisfied;
  return r;
}

SallesCoefficients SallesCoefficients::cfrd() {
  // t_1 = ((1, 0), (0, -1)), t_2 = ((0, 1), (1, 0))
  return SallesCoefficients{2, 2, 2, {1, 0, 0, -1, 0, 1, 1, 0}};
}

std::string_view to_string(InequalityName name) {
  switch (name) {
    case InequalityName::Cfrd: return "cfrd";
    case InequalityName::In33: return "in33";
    case InequalityName::In33r: return "in33r";
    case InequalityName::Ine22: return "ine22";
  }
  return "unknown";
}

InequalityName parse_inequality(std::string_view text) {
  if (text == "cfrd") return InequalityName::Cfrd;
  if (text == "in33") return InequalityName::In33;
  if (text == "in33r") return InequalityName::In33r;
  if (text == "ine22") return InequalityName::Ine22;
  throw Error(ErrorCode::UnknownInequality, std::string(text));
}

int required_choices(InequalityName name) {
  return (name == InequalityName::In33 || name == InequalityName::In33r) ? 3 : 2;
}

MomentTable table_from_scenario(const BipartiteScenario& s) {
  const int ma = s.choices_a();
  const int mb = s.choices_b();
  std::vector<double> v(MomentTable::size_for(ma, mb));
  std::size_t idx = 0;
  for (int x = 1; x <= ma; ++x)
    for (int y = 1; y <= mb; ++y)
      for (int k = 0; k <= 2; ++k)
        for (int l = 0; l <= 2; ++l)
          v[idx++] = (k == 0 && l == 0)
                         ? 1.0
                         : qcore::moment(s.state(), s.obs_a()[x - 1], s.obs_b()[y - 1], k, l);
  return MomentTable(ma, mb, std::move(v), TableCheck::Exact);
}

MomentTable table_from_lhv_samples(const HiddenVariableSamples& samples) {
  const int ma = static_cast<int>(samples.a.size());
  const int mb = static_cast<int>(samples.b.size());
  const std::size_t n = samples.size();
  if (n == 0) throw Error(ErrorCode::EmptySample, "no samples");
  for (const auto& col : samples.a)
    if (col.size() != n) throw Error(ErrorCode::ShapeMismatch, "ragged A samples");
  for (const auto& col : samples.b)
    if (col.size() != n) throw Error(ErrorCode::ShapeMismatch, "ragged B samples");
  if (!samples.weights.empty()) {
    if (samples.weights.size() != n) throw Error(ErrorCode::ShapeMismatch, "weights size");
    for (double w : samples.weights)
      if (!(w >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative sample weight");
  }

  std::vector<double> v(MomentTable::size_for(ma, mb));
  std::size_t idx = 0;
  for (int x = 1; x <= ma; ++x)
    for (int y = 1; y <= mb; ++y) {
      const auto s = kernels::power_sums(samples.a[x - 1], samples.b[y - 1], samples.weights);
      const double total = s[0];
      if (!(total > 0.0)) throw Error(ErrorCode::EmptySample, "total sample weight is zero");
      for (int kl = 0; kl < 9; ++kl) v[idx++] = kl == 0 ? 1.0 : s[kl] / total;
    }
  return MomentTable(ma, mb, std::move(v), TableCheck::Sampled);
}

InequalityReport eval_cfrd(const MomentTable& t) {
  require_choices(t, 2, "cfrd");
  double lhs = 0.0;
  for (int x = 1; x <= 2; ++x)
    for (int y = 1; y <= 2; ++y) lhs += t(x, y, 2, 2);
  const double u = t(1, 1, 1, 1) - t(2, 2, 1, 1);
  const double w = t(1, 2, 1, 1) + t(2, 1, 1, 1);
  return InequalityReport::make("cfrd", lhs, u * u + w * w);
}

InequalityReport eval_salles_class(const MomentTable& t, const SallesCoefficients& c) {
  if (c.choices_a != t.choices_a() || c.choices_b != t.choices_b() || c.terms < 0 ||
      c.values.size() != static_cast<std::size_t>(c.terms) * c.choices_a * c.choices_b)
    throw Error(ErrorCode::ShapeMismatch, "coefficient shape does not match the moment table");
  for (double v : c.values)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite coefficient");
  double lhs = 0.0;
  for (int x = 1; x <= t.choices_a(); ++x)
    for (int y = 1; y <= t.choices_b(); ++y) lhs += t(x, y, 2, 2);
  double rhs = 0.0;
  for (int i = 0; i < c.terms; ++i) {
    double lin = 0.0;
    for (int x = 1; x <= t.choices_a(); ++x)
      for (int y = 1; y <= t.choices_b(); ++y) lin += c(i, x, y) * t(x, y, 1, 1);
    rhs += lin * lin;
  }
  return InequalityReport::make("salles", lhs, rhs);
}

InequalityReport eval_in33(const MomentTable& t, SqrtPolicy policy) {
  require_choices(t, 3, "in33");
  auto sq = [&](int x, int y) { return clamp_nonnegative(t(x, y, 2, 2), 0.0, policy, "<A^2B^2>"); };
  const double lhs = sq(1, 2) + sq(2, 3) + sq(3, 1) + 2.0 * std::sqrt(sq(1, 3) * sq(2, 2)) +
                     2.0 * std::sqrt(sq(2, 1) * sq(3, 3)) + 2.0 * std::sqrt(sq(3, 2) * sq(1, 1));
  const double rhs = 2.0 * (t(1, 2, 1, 1) + t(2, 3, 1, 1) + t(3, 1, 1, 1)) - 1.0;
  return InequalityReport::make("in33", lhs, rhs);
}

InequalityReport eval_in33r(const MomentTable& t, SqrtPolicy policy) {
  require_choices(t, 3, "in33r");
  auto m = [&](int x, int y, int k, int l) { return t(x, y, k, l); };
  // Moments of (1 - X)^2 Y^2 style factors, c0 - 2 c1 + c2.
  auto comp2 = [&](double c0, double c1, double c2, const char* what) {
    const double scale = std::abs(c0) + 2.0 * std::abs(c1) + std::abs(c2);
    return clamp_nonnegative(c0 - 2.0 * c1 + c2, scale, policy, what);
  };

  // P = A1', Q = B2' live at choice pair (1, 2).
  const double p = m(1, 2, 1, 0), q = m(1, 2, 0, 1);
  const double p2 = m(1, 2, 2, 0), q2 = m(1, 2, 0, 2);
  const double pq = m(1, 2, 1, 1), p2q = m(1, 2, 2, 1), pq2 = m(1, 2, 1, 2);
  const double p2q2 = m(1, 2, 2, 2);
  // <(1-P)^2 (1-Q)^2> - 1
  const double first = -2.0 * p - 2.0 * q + p2 + q2 + 4.0 * pq - 2.0 * p2q - 2.0 * pq2 + p2q2;

  auto sq = [&](int x, int y) { return clamp_nonnegative(t(x, y, 2, 2), 0.0, policy, "<A^2B^2>"); };
  const double a1b3 = comp2(m(1, 3, 0, 2), m(1, 3, 1, 2), m(1, 3, 2, 2), "<(1-A1')^2 B3^2>");
  const double a2b2 = comp2(m(2, 2, 2, 0), m(2, 2, 2, 1), m(2, 2, 2, 2), "<A2^2 (1-B2')^2>");
  const double a3b2 = comp2(m(3, 2, 2, 0), m(3, 2, 2, 1), m(3, 2, 2, 2), "<A3^2 (1-B2')^2>");
  const double a1b1 = comp2(m(1, 1, 0, 2), m(1, 1, 1, 2), m(1, 1, 2, 2), "<(1-A1')^2 B1^2>");

  const double lhs = first + sq(2, 3) + sq(3, 1) + 2.0 * std::sqrt(a1b3 * a2b2) +
                     2.0 * std::sqrt(sq(2, 1) * sq(3, 3)) + 2.0 * std::sqrt(a3b2 * a1b1);
  // 2(<(1-P)(1-Q)> + <A2B3> + <A3B1>) - 1, minus the same constant 1.
  const double rhs = 2.0 * (-p - q + pq) + 2.0 * (m(2, 3, 1, 1) + m(3, 1, 1, 1));
  return InequalityReport::make("in33r", lhs, rhs);
}

InequalityReport eval_ine22(const MomentTable& t, SqrtPolicy policy) {
  require_choices(t, 2, "ine22");
  auto sq = [&](int x, int y) { return clamp_nonnegative(t(x, y, 2, 2), 0.0, policy, "<A^2B^2>"); };
  const double a2 = t(1, 1, 2, 0), b2 = t(1, 1, 0, 2), ab = t(1, 1, 1, 1);
  const double sum_sq = a2 + 2.0 * ab + b2;
  const double diff_sq = clamp_nonnegative(a2 - 2.0 * ab + b2, a2 + 2.0 * std::abs(ab) + b2,
                                           policy, "<(A1-B1)^2>");
  const double lhs = sq(1, 2) + sq(2, 1) + 0.25 * sum_sq +
                     std::sqrt(diff_sq) * (std::sqrt(sq(1, 2)) + std::sqrt(sq(2, 1))) +
                     2.0 * std::sqrt(sq(1, 1) * sq(2, 2));
  const double rhs = 2.0 * (t(1, 2, 2, 1) + t(2, 1, 1, 2));
  return InequalityReport::make("ine22", lhs, rhs);
}

InequalityReport evaluate(InequalityName name, const MomentTable& t, SqrtPolicy policy) {
  switch (name) {
    case InequalityName::Cfrd: return eval_cfrd(t);
    case InequalityName::In33: return eval_in33(t, policy);
    case InequalityName::In33r: return eval_in33r(t, policy);
    case InequalityName::Ine22: return eval_ine22(t, policy);
  }
  throw Error(ErrorCode::UnknownInequality, "unhandled inequality");
}

MomentTable null_mix(const MomentTable& t, double r) {
  if (!(r > 0.0 && r <= 1.0))
    throw Error(ErrorCode::RateOutOfRange, "null-mix rate must be in (0, 1], got " +
                                               std::to_string(r));
  std::vector<double> v(t.entries().begin(), t.entries().end());
  for (std::size_t i = 0; i < v.size(); ++i)
    if (i % 9 != 0) v[i] *= r;
  return MomentTable(t.choices_a(), t.choices_b(), std::move(v), t.check());
}

MomentTable complement(const MomentTable& t, std::span<const int> a_choices,
                       std::span<const int> b_choices) {
  auto listed = [](std::span<const int> list, int c) {
    return std::find(list.begin(), list.end(), c) != list.end();
  };
  for (int x : a_choices)
    if (x < 1 || x > t.choices_a()) throw Error(ErrorCode::InvalidArgument, "bad A choice");
  for (int y : b_choices)
    if (y < 1 || y > t.choices_b()) throw Error(ErrorCode::InvalidArgument, "bad B choice");

  std::vector<double> v(t.entries().size());
  for (int x = 1; x <= t.choices_a(); ++x) {
    const bool fa = listed(a_choices, x);
    for (int y = 1; y <= t.choices_b(); ++y) {
      const bool fb = listed(b_choices, y);
      for (int k = 0; k <= 2; ++k)
        for (int l = 0; l <= 2; ++l) {
          double acc = 0.0;
          for (int j = 0; j <= 2; ++j) {
            const double ca = fa ? kComplementCoeff[k][j] : (j == k ? 1.0 : 0.0);
            if (ca == 0.0) continue;
            for (int i = 0; i <= 2; ++i) {
              const double cb = fb ? kComplementCoeff[l][i] : (i == l ? 1.0 : 0.0);
              if (cb != 0.0) acc += ca * cb * t(x, y, j, i);
            }
          }
          v[t.index(x, y, k, l)] = acc;
        }
    }
  }
  const TableCheck check = t.check() == TableCheck::Exact ? TableCheck::Sampled : t.check();
  return MomentTable(t.choices_a(), t.choices_b(), std::move(v), check);
}

MomentTable complement_for_in33r(const MomentTable& t) {
  const int a[] = {1};
  const int b[] = {2};
  return complement(t, a, b);
}

}  // namespace bellmom::ineq
