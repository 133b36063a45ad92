#pragma once

// Derivative-free search for inequality violations over two-qubit states
// cos(theta)|00> + sin(theta)|11> and qubit observables.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bellmom/inequalities.hpp"
#include "bellmom/scenario.hpp"

namespace bellmom::search {

/// Parameter layout: [theta, then (offset, nx, ny, nz) per observable, A
/// choices first]. An observable is offset I + n.sigma, or with
/// projectors_only the rank-1 projector (I + n.sigma / |n|) / 2, in which case
/// the offset entry is ignored.
struct SearchSpace {
  int choices_a = 3;
  int choices_b = 3;
  bool projectors_only = false;

  std::size_t dim() const { return 1 + 4 * static_cast<std::size_t>(choices_a + choices_b); }

  /// Smallest space the inequality can be evaluated on.
  static SearchSpace for_inequality(ineq::InequalityName name, bool projectors_only = false);
};

BipartiteScenario build_scenario(const SearchSpace& space, std::span<const double> params);

/// Parameters of a two-qubit scenario with choices matching `space`, via its
/// Schmidt basis and the Pauli decomposition of the rotated observables.
/// Throws DimensionMismatch (not qubits) or ShapeMismatch (choice counts).
std::vector<double> encode(const SearchSpace& space, const BipartiteScenario& s);

/// Margin of `name` on the scenario's table; square roots of negative
/// arguments are clamped, so the search can cross such regions.
double objective(const SearchSpace& space, std::span<const double> params,
                 ineq::InequalityName name);

struct NelderMeadOptions {
  double initial_step = 0.5;
  int max_evaluations = 20000;
  double diameter_tolerance = 1e-10;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  /// Fresh simplices built around the best point once one has converged.
  int restarts = 2;

  /// Dimension-dependent coefficients (expansion 1 + 2/n, contraction
  /// 0.75 - 1/2n, shrink 1 - 1/n), which hold up better for n >~ 10.
  static NelderMeadOptions adaptive(std::size_t dim);
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool budget_exhausted = false;  ///< stopped on the budget, x is the best so far
  std::vector<double> trace;      ///< best value after each iteration
};

using Objective = std::function<double(std::span<const double>)>;

/// Throws InvalidArgument for an empty x0, a nonpositive step or a budget
/// below dim + 1.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const NelderMeadOptions& options = {});

struct StartResult {
  std::size_t index = 0;
  std::vector<double> start;
  NelderMeadResult run;
};

struct SearchResult {
  ineq::InequalityName name = ineq::InequalityName::In33;
  std::uint64_t seed = 0;
  double best_margin = 0.0;
  std::vector<double> best_params;
  std::size_t best_start = 0;
  long long evaluations = 0;
  std::vector<StartResult> starts;
};

/// Uniform random start: theta in [0, 2 pi), offsets in [-2, 2], Bloch
/// components in [-1, 1]. Start i depends only on (seed, i).
std::vector<double> random_start(const SearchSpace& space, std::uint64_t seed, std::size_t i);

/// Runs nelder_mead from `extra_starts` followed by n_starts random starts.
/// The best margin wins, ties going to the lowest start index.
/// Throws InvalidArgument for n_starts < 1.
SearchResult multi_start(const SearchSpace& space, ineq::InequalityName name, int n_starts,
                         std::uint64_t seed, const NelderMeadOptions& options = {},
                         std::span<const std::vector<double>> extra_starts = {},
                         unsigned threads = 0);

}  // namespace bellmom::search
