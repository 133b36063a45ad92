#pragma once

// Weak Gaussian measurements: projective outcomes in the joint eigenbasis plus
// detection noise of variance 1/4g, and recovery of the intrinsic moments by
// noise subtraction or from twin detectors.

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "bellmom/inequalities.hpp"
#include "bellmom/kernels.hpp"
#include "bellmom/random_instances.hpp"
#include "bellmom/scenario.hpp"

namespace bellmom::weak {

enum class Scheme { Subtract, Twin };

std::string_view to_string(Scheme scheme);
/// "subtract" or "twin"; throws InvalidArgument.
Scheme parse_scheme(std::string_view text);

struct WeakConfig {
  double g = 0.5;
  Scheme scheme = Scheme::Twin;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;

  /// Throws InvalidArgument unless g > 0 (finite) and samples >= 1.
  void validate() const;
  double noise_variance() const { return 1.0 / (4.0 * g); }
};

/// Eigenvalue pairs (A, B) drawn from the joint projective distribution.
struct ProjectiveSamples {
  std::vector<double> a;
  std::vector<double> b;
};

/// Noisy detector outputs, stored column-wise. a_prime / b_prime are empty
/// for the Subtract scheme.
struct OutcomeRecords {
  Scheme scheme = Scheme::Subtract;
  std::vector<double> a, a_prime, b, b_prime;

  std::size_t size() const { return a.size(); }
};

/// Joint outcome law of A (x) B on `state`. Eigenvalues closer than the
/// degenerate-cluster tolerance are merged so each outcome value appears once.
class JointDistribution {
 public:
  JointDistribution(const qcore::BipartiteState& state, const qcore::Observable& a,
                    const qcore::Observable& b);

  const std::vector<double>& values_a() const { return va_; }
  const std::vector<double>& values_b() const { return vb_; }
  /// P(A = values_a[i], B = values_b[j]) at [i * values_b.size() + j].
  const std::vector<double>& probabilities() const { return p_; }

  /// Appends n draws. `rng` is advanced deterministically.
  void sample(std::size_t n, Rng& rng, ProjectiveSamples& out) const;

 private:
  std::vector<double> va_, vb_, p_, cdf_;
};

/// n i.i.d. draws; stream selects an independent RNG substream of `seed`.
ProjectiveSamples sample_projective(const qcore::BipartiteState& state, const qcore::Observable& a,
                                    const qcore::Observable& b, std::size_t n, std::uint64_t seed,
                                    std::uint64_t stream = 0);

/// Subtract: a = A + xi, b = B + zeta. Twin: four independent noises.
/// All noises are N(0, 1/4g).
OutcomeRecords add_detection_noise(const ProjectiveSamples& pairs, const WeakConfig& cfg,
                                   std::uint64_t stream = 0);
/// Same, drawing from an explicit engine.
OutcomeRecords add_detection_noise(const ProjectiveSamples& pairs, const WeakConfig& cfg,
                                   Rng& rng);

/// Moment estimates for one (x, y) pair, indexed [3k + l].
struct EstimatedMoments {
  std::array<double, 9> value{};
  std::array<double, 9> stderr_{};
  std::size_t count = 0;
  /// Fewer than two records: standard errors are undefined (+inf in stderr_).
  bool stderr_degenerate = false;

  double operator()(int k, int l) const { return value[3 * k + l]; }
  double error(int k, int l) const { return stderr_[3 * k + l]; }
};

/// Accumulates the per-record estimators of records matching cfg.scheme.
/// Throws SchemeMismatch if the record shape does not fit the scheme.
void accumulate(const OutcomeRecords& records, const WeakConfig& cfg, kernels::EstimatorSums& acc);

/// Means and standard errors (sample sd / sqrt(n)) of the per-record
/// estimators. Because every estimator is linear in the records, this equals
/// the delete-one jackknife error.
EstimatedMoments finalize(const kernels::EstimatorSums& acc);

EstimatedMoments estimate_moments(const OutcomeRecords& records, const WeakConfig& cfg);

/// Jackknife groups per (x, y) pair used for inequality error bars.
inline constexpr int kJackknifeGroups = 20;

struct WeakTable {
  WeakConfig config;
  ineq::MomentTable table;
  std::vector<EstimatedMoments> pairs;  ///< [(x-1) * mB + y-1]
  /// Estimator sums of each jackknife group, [pair][group].
  std::vector<std::vector<kernels::EstimatorSums>> groups;

  const EstimatedMoments& pair(int x, int y) const {
    return pairs[static_cast<std::size_t>(x - 1) * table.choices_b() + (y - 1)];
  }
};

/// Records of one (x, y) pair exactly as table_from_weak generates them
/// (group by group). Memory grows with cfg.samples.
OutcomeRecords simulate_pair(const BipartiteScenario& s, int x, int y, const WeakConfig& cfg);

/// Independent simulation of every (x, y) pair, streamed in chunks, parallel
/// across pairs and jackknife groups. Output is independent of `threads`.
WeakTable table_from_weak(const BipartiteScenario& s, const WeakConfig& cfg, unsigned threads = 0);

struct WeakVerdict {
  ineq::InequalityReport report;
  /// Grouped delete-one-group jackknife error of the margin; NaN if fewer
  /// than two groups hold data.
  double sigma = std::numeric_limits<double>::quiet_NaN();
};

/// Evaluates `name` on the estimated table with square roots clamped.
WeakVerdict evaluate_weak(const WeakTable& t, ineq::InequalityName name);

}  // namespace bellmom::weak
