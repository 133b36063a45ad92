#pragma once

// Moment tables <A_x^k B_y^l> (k, l <= 2) and evaluators for the
// second-second order local-realism inequalities.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bellmom/scenario.hpp"

namespace bellmom::ineq {

/// How strictly MomentTable validates its invariants.
///  Exact:       marginals no-signaling within 1e-10, second moments >= -1e-12.
///  Sampled:     marginals within 1e-6, second moments >= -1e-12.
///  Statistical: only the [0][0] = 1 normalization is enforced (noisy estimates).
enum class TableCheck { Exact, Sampled, Statistical };

class MomentTable {
 public:
  /// `entries` in the layout of index(); choice indices are 1-based.
  MomentTable(int choices_a, int choices_b, std::vector<double> entries,
              TableCheck check = TableCheck::Exact);

  int choices_a() const noexcept { return ma_; }
  int choices_b() const noexcept { return mb_; }
  TableCheck check() const noexcept { return check_; }

  /// <A_x^k B_y^l>
  double operator()(int x, int y, int k, int l) const { return v_[index(x, y, k, l)]; }
  std::span<const double> entries() const noexcept { return v_; }

  std::size_t index(int x, int y, int k, int l) const {
    return ((static_cast<std::size_t>(x - 1) * mb_ + (y - 1)) * 3 + k) * 3 + l;
  }
  static std::size_t size_for(int choices_a, int choices_b) {
    return static_cast<std::size_t>(choices_a) * choices_b * 9;
  }

  friend bool operator==(const MomentTable&, const MomentTable&) = default;

 private:
  int ma_;
  int mb_;
  std::vector<double> v_;
  TableCheck check_;
};

/// Values of the hidden variables A_x, B_y, one entry per sample.
struct HiddenVariableSamples {
  std::vector<std::vector<double>> a;  ///< a[x-1][i]
  std::vector<std::vector<double>> b;  ///< b[y-1][i]
  std::vector<double> weights;         ///< empty = uniform

  HiddenVariableSamples(int choices_a, int choices_b);
  void add(std::span<const double> a_values, std::span<const double> b_values,
           double weight = 1.0);
  std::size_t size() const { return a.empty() ? 0 : a.front().size(); }
};

struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  ///< lhs - rhs; negative = violation
  bool satisfied = true;

  static InequalityReport make(std::string name, double lhs, double rhs);
};

/// Treatment of square-root arguments below -1e-12.
enum class SqrtPolicy {
  Strict,         ///< throw NegativeSecondMoment
  ClampNegative,  ///< clamp to zero (for noisy estimated tables)
};

/// Coefficients t_{i,x,y} of sum_i (sum_xy t_ixy <A_x B_y>)^2 <= sum_xy <A_x^2 B_y^2>.
struct SallesCoefficients {
  int terms = 0;
  int choices_a = 0;
  int choices_b = 0;
  std::vector<double> values;  ///< [(i*choices_a + x-1)*choices_b + y-1]

  double operator()(int i, int x, int y) const {
    return values[(static_cast<std::size_t>(i) * choices_a + (x - 1)) * choices_b + (y - 1)];
  }
  static SallesCoefficients cfrd();
};

enum class InequalityName { Cfrd, In33, In33r, Ine22 };

std::string_view to_string(InequalityName name);
/// Throws UnknownInequality.
InequalityName parse_inequality(std::string_view text);
/// Minimum choices per party the inequality reads.
int required_choices(InequalityName name);

MomentTable table_from_scenario(const BipartiteScenario& scenario);
/// Throws EmptySample for no samples (or zero total weight).
MomentTable table_from_lhv_samples(const HiddenVariableSamples& samples);

InequalityReport eval_cfrd(const MomentTable& t);
InequalityReport eval_salles_class(const MomentTable& t, const SallesCoefficients& coeffs);
InequalityReport eval_in33(const MomentTable& t, SqrtPolicy policy = SqrtPolicy::Strict);
/// `t` holds the measured table in which choice A1 and B2 are the complementary
/// variables A1' = 1 - A1, B2' = 1 - B2 (see complement()). The constant terms,
/// equal on both sides, are dropped from lhs and rhs.
InequalityReport eval_in33r(const MomentTable& t, SqrtPolicy policy = SqrtPolicy::Strict);
InequalityReport eval_ine22(const MomentTable& t, SqrtPolicy policy = SqrtPolicy::Strict);

InequalityReport evaluate(InequalityName name, const MomentTable& t,
                          SqrtPolicy policy = SqrtPolicy::Strict);

/// Mixes in the null event A = B = 0 with probability 1 - r: every entry with
/// k + l >= 1 is scaled by r. Throws RateOutOfRange unless r in (0, 1].
MomentTable null_mix(const MomentTable& t, double r);

/// Moments after substituting X -> 1 - X for the listed A and B choices.
/// The substitution is an involution.
MomentTable complement(const MomentTable& t, std::span<const int> a_choices,
                       std::span<const int> b_choices);
/// complement() for the choices used by eval_in33r: A1 and B2.
MomentTable complement_for_in33r(const MomentTable& t);

}  // namespace bellmom::ineq
