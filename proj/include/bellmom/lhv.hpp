#pragma once

// Explicit local-hidden-variable model reproducing every moment up to
// second-second order for a maximally entangled state when A has two choices
// A+ and A- and B has arbitrarily many.

#include <cstdint>
#include <vector>

#include "bellmom/inequalities.hpp"
#include "bellmom/qcore.hpp"
#include "bellmom/random_instances.hpp"
#include "bellmom/scenario.hpp"

namespace bellmom::lhv {

/// Distribution of b_y given the cell (a+, a-).
struct Conditional {
  enum class Kind { Gaussian, Delta };
  Kind kind = Kind::Delta;
  double mean = 0.0;
  double variance = 0.0;  ///< 0 for Delta
};

struct Cell {
  std::size_t index_plus = 0;   ///< eigenvector index in A+
  std::size_t index_minus = 0;  ///< eigenvector index in A-
  double weight = 0.0;          ///< p(a+, a-)
  double a_plus = 0.0;
  double a_minus = 0.0;
  std::vector<Conditional> b;  ///< one per B choice
  /// Unnormalized <b>_{a+,a-} and <b^2>_{a+,a-} per B choice, kept for audits.
  std::vector<double> b1, b2;
};

struct Diagnostics {
  std::size_t dropped_cells = 0;
  /// Sum of <b^2>_{a+,a-} over dropped cells (p <= 1e-15), maximized over B
  /// choices. Nonzero means the construction does not reproduce <B^2>; this
  /// happens when the overlap <a+|1_N|a-> vanishes while
  /// <a-|1_N B* 1_N|a+> or the padded-block terms do not (e.g. A+ = A-).
  double lost_second_moment = 0.0;
  double weight_sum = 0.0;
  double min_raw_variance = 0.0;
  /// max over cells and B of <b>^2 - <b^2> p (<= 0 when the CBS step holds).
  double max_cbs_excess = 0.0;
  std::vector<double> c_plus;   ///< sum_{a+} c(a+) per B choice
  std::vector<double> c_minus;  ///< sum_{a-} c(a-) per B choice
  std::size_t c_positive = 0;   ///< B choices that took the c > 0 branch
};

struct LhvModel {
  int N = 0;
  std::size_t choices_b = 0;
  std::vector<Cell> cells;  ///< cells with p > 1e-15
  Diagnostics diagnostics;
};

/// psi = sum_{j<N} |j>|j> / sqrt(N) in dim_a x dim_b. Throws
/// NotMaximallyEntangledContext unless 1 <= N <= min(dim_a, dim_b).
qcore::BipartiteState maximally_entangled(int N, std::size_t dim_a, std::size_t dim_b);

/// The construction, step by step: eigendecompose A+-, weights
/// |<a+|1_N|a->|^2 / N, first and second conditional moments, padded-block
/// correction c(a+)c(a-)/c, Gaussian (or Delta) conditionals, product over B.
/// Throws NegativeVariance if a conditional variance is below -1e-12 (relative
/// to the scale of <b^2>/p), NotMaximallyEntangledContext for bad N or dims.
LhvModel build_lhv(int N, std::size_t dim_a, const qcore::Observable& a_plus,
                   const qcore::Observable& a_minus, const std::vector<qcore::Observable>& bs);

/// Same with explicit eigendecompositions, so that the choice of basis inside
/// degenerate eigenspaces can be varied.
LhvModel build_lhv_from_eigen(int N, const qcore::EigenDecomposition& a_plus,
                              const qcore::EigenDecomposition& a_minus,
                              const std::vector<qcore::ComplexMatrix>& bs);

/// Closed-form moments; choice 1 is A+, choice 2 is A-.
ineq::MomentTable lhv_moments(const LhvModel& model);

/// n draws: cell by weight, then independent conditional draws per B choice.
ineq::HiddenVariableSamples sample_lhv(const LhvModel& model, std::size_t n, std::uint64_t seed);

/// Scenario of the quantum moments the model is meant to reproduce.
BipartiteScenario quantum_scenario(int N, const qcore::Observable& a_plus,
                                   const qcore::Observable& a_minus,
                                   const std::vector<qcore::Observable>& bs);

struct Input {
  int N = 2;
  qcore::Observable a_plus;
  qcore::Observable a_minus;
  std::vector<qcore::Observable> bs;
};

/// Random A+- (Hermitian, or rank-1 projectors when `projectors`) on dim_a and
/// `choices_b` random Hermitian B observables on dim_b.
Input random_input(int N, std::size_t dim_a, std::size_t dim_b, std::size_t choices_b, Rng& rng,
                   bool projectors);

struct Check {
  double max_discrepancy = 0.0;  ///< max |lhv moment - quantum moment|
  bool semipositive = true;      ///< weights and variances >= 0 after clamping
  bool c_positive_branch = false;
  Diagnostics diagnostics;
};

/// Builds the model for `in` and compares with the quantum moments.
Check check(const Input& in);

}  // namespace bellmom::lhv
