#include "bellmom/weakmeas.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "bellmom/constants.hpp"
#include "bellmom/error.hpp"
#include "bellmom/parallel.hpp"
#include "bellmom/random_instances.hpp"

namespace bellmom::weak {

namespace {

constexpr std::uint64_t kPurposeOutcome = 1;
constexpr std::uint64_t kPurposeNoise = 2;
constexpr std::size_t kChunk = std::size_t{1} << 16;

std::uint64_t pair_stream(int x, int y, int group) {
  return (static_cast<std::uint64_t>(x) * 64 + static_cast<std::uint64_t>(y)) * 256 +
         static_cast<std::uint64_t>(group);
}

// Eigenvalues merged into clusters; returns (cluster values, index -> cluster).
std::pair<std::vector<double>, std::vector<std::size_t>> cluster(const std::vector<double>& v) {
  std::vector<double> values;
  std::vector<std::size_t> of(v.size());
  std::size_t start = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > start && v[i] - v[start] > tol::degenerate_cluster) {
      double mean = 0.0;
      for (std::size_t j = start; j < i; ++j) mean += v[j];
      values.push_back(mean / static_cast<double>(i - start));
      start = i;
    }
    of[i] = values.size();
  }
  double mean = 0.0;
  for (std::size_t j = start; j < v.size(); ++j) mean += v[j];
  values.push_back(mean / static_cast<double>(v.size() - start));
  return {values, of};
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

std::size_t group_begin(std::size_t n, int g) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(n) * g) / kJackknifeGroups);
}

// Generates records [group_begin(g), group_begin(g+1)) of pair (x, y) chunk by
// chunk; `sink` receives each chunk.
template <typename Sink>
void generate_group(const JointDistribution& dist, int x, int y, int g, const WeakConfig& cfg,
                    Sink&& sink) {
  const std::size_t len = group_begin(cfg.samples, g + 1) - group_begin(cfg.samples, g);
  Rng outcome_rng = make_stream(cfg.seed, pair_stream(x, y, g), kPurposeOutcome);
  Rng noise_rng = make_stream(cfg.seed, pair_stream(x, y, g), kPurposeNoise);
  ProjectiveSamples chunk;
  for (std::size_t done = 0; done < len; done += kChunk) {
    chunk.a.clear();
    chunk.b.clear();
    dist.sample(std::min(kChunk, len - done), outcome_rng, chunk);
    sink(add_detection_noise(chunk, cfg, noise_rng));
  }
}

void append(OutcomeRecords& dst, const OutcomeRecords& src) {
  dst.a.insert(dst.a.end(), src.a.begin(), src.a.end());
  dst.b.insert(dst.b.end(), src.b.begin(), src.b.end());
  dst.a_prime.insert(dst.a_prime.end(), src.a_prime.begin(), src.a_prime.end());
  dst.b_prime.insert(dst.b_prime.end(), src.b_prime.begin(), src.b_prime.end());
}

ineq::MomentTable assemble(int ma, int mb, const std::vector<EstimatedMoments>& pairs) {
  std::vector<double> v(ineq::MomentTable::size_for(ma, mb));
  for (std::size_t p = 0; p < pairs.size(); ++p)
    for (int kl = 0; kl < 9; ++kl) v[p * 9 + kl] = kl == 0 ? 1.0 : pairs[p].value[kl];
  return ineq::MomentTable(ma, mb, std::move(v), ineq::TableCheck::Statistical);
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::Twin ? "twin" : "subtract";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "twin") return Scheme::Twin;
  if (text == "subtract") return Scheme::Subtract;
  throw Error(ErrorCode::InvalidArgument, "unknown scheme '" + std::string(text) + "'");
}

void WeakConfig::validate() const {
  if (!(g > 0.0) || !std::isfinite(g))
    throw Error(ErrorCode::InvalidArgument, "measurement strength g must be > 0");
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be >= 1");
}

JointDistribution::JointDistribution(const qcore::BipartiteState& state,
                                     const qcore::Observable& a, const qcore::Observable& b) {
  if (a.dim() != state.dim_a() || b.dim() != state.dim_b())
    throw Error(ErrorCode::DimensionMismatch, "observable and state dimensions differ");
  const auto ea = qcore::hermitian_eigen(a.op(), qcore::observable_tolerance(a.op()));
  const auto eb = qcore::hermitian_eigen(b.op(), qcore::observable_tolerance(b.op()));
  auto [va, of_a] = cluster(ea.values);
  auto [vb, of_b] = cluster(eb.values);
  va_ = std::move(va);
  vb_ = std::move(vb);
  p_.assign(va_.size() * vb_.size(), 0.0);

  const std::size_t da = state.dim_a(), db = state.dim_b();
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < db; ++j) {
      qcore::Complex amp{};
      for (std::size_t r = 0; r < da; ++r) {
        qcore::Complex row{};
        for (std::size_t c = 0; c < db; ++c)
          row += std::conj(eb.vectors(c, j)) * state.amplitude(r, c);
        amp += std::conj(ea.vectors(r, i)) * row;
      }
      p_[of_a[i] * vb_.size() + of_b[j]] += std::norm(amp);
    }
  double total = 0.0;
  for (double p : p_) total += p;
  cdf_.resize(p_.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < p_.size(); ++k) {
    p_[k] /= total;
    acc += p_[k];
    cdf_[k] = acc;
  }
}

void JointDistribution::sample(std::size_t n, Rng& rng, ProjectiveSamples& out) const {
  // Last outcome with nonzero probability absorbs rounding in the CDF tail.
  std::size_t last = p_.size() - 1;
  while (last > 0 && p_[last] == 0.0) --last;
  const std::size_t nb = vb_.size();
  out.a.reserve(out.a.size() + n);
  out.b.reserve(out.b.size() + n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    std::size_t k = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) -
                                             cdf_.begin());
    k = std::min(k, last);
    out.a.push_back(va_[k / nb]);
    out.b.push_back(vb_[k % nb]);
  }
}

ProjectiveSamples sample_projective(const qcore::BipartiteState& state, const qcore::Observable& a,
                                    const qcore::Observable& b, std::size_t n, std::uint64_t seed,
                                    std::uint64_t stream) {
  const JointDistribution dist(state, a, b);
  Rng rng = make_stream(seed, stream, kPurposeOutcome);
  ProjectiveSamples out;
  dist.sample(n, rng, out);
  return out;
}

OutcomeRecords add_detection_noise(const ProjectiveSamples& pairs, const WeakConfig& cfg,
                                   std::uint64_t stream) {
  Rng rng = make_stream(cfg.seed, stream, kPurposeNoise);
  return add_detection_noise(pairs, cfg, rng);
}

OutcomeRecords add_detection_noise(const ProjectiveSamples& pairs, const WeakConfig& cfg,
                                   Rng& rng) {
  cfg.validate();
  if (pairs.a.size() != pairs.b.size())
    throw Error(ErrorCode::ShapeMismatch, "projective samples of unequal length");
  std::normal_distribution<double> noise(0.0, std::sqrt(cfg.noise_variance()));
  const std::size_t n = pairs.a.size();
  OutcomeRecords r;
  r.scheme = cfg.scheme;
  r.a.resize(n);
  r.b.resize(n);
  if (cfg.scheme == Scheme::Subtract) {
    for (std::size_t i = 0; i < n; ++i) {
      r.a[i] = pairs.a[i] + noise(rng);
      r.b[i] = pairs.b[i] + noise(rng);
    }
  } else {
    r.a_prime.resize(n);
    r.b_prime.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      r.a[i] = pairs.a[i] + noise(rng);
      r.a_prime[i] = pairs.a[i] + noise(rng);
      r.b[i] = pairs.b[i] + noise(rng);
      r.b_prime[i] = pairs.b[i] + noise(rng);
    }
  }
  return r;
}

void accumulate(const OutcomeRecords& records, const WeakConfig& cfg, kernels::EstimatorSums& acc) {
  const std::size_t n = records.size();
  if (records.b.size() != n) throw Error(ErrorCode::ShapeMismatch, "a and b lengths differ");
  const bool twin_shape = records.a_prime.size() == n && records.b_prime.size() == n && n > 0;
  const bool subtract_shape = records.a_prime.empty() && records.b_prime.empty();
  if (cfg.scheme == Scheme::Twin) {
    if (records.scheme != Scheme::Twin || !(twin_shape || n == 0))
      throw Error(ErrorCode::SchemeMismatch, "twin estimator needs a' and b' outcomes");
    kernels::twin_estimators(records.a, records.a_prime, records.b, records.b_prime, acc);
  } else {
    if (records.scheme != Scheme::Subtract || !subtract_shape)
      throw Error(ErrorCode::SchemeMismatch, "subtract estimator expects single-detector records");
    kernels::subtract_estimators(records.a, records.b, cfg.noise_variance(), acc);
  }
}

EstimatedMoments finalize(const kernels::EstimatorSums& acc) {
  EstimatedMoments m;
  m.count = acc.count;
  m.value[0] = 1.0;
  if (acc.count == 0) throw Error(ErrorCode::EmptySample, "no records");
  const double n = static_cast<double>(acc.count);
  m.stderr_degenerate = acc.count < 2;
  for (std::size_t e = 0; e < kernels::estimator_powers.size(); ++e) {
    const auto [k, l] = kernels::estimator_powers[e];
    const int idx = 3 * k + l;
    const double mean = acc.sum[e] / n;
    m.value[idx] = mean;
    if (m.stderr_degenerate) {
      m.stderr_[idx] = std::numeric_limits<double>::infinity();
    } else {
      const double var = std::max(0.0, acc.sumsq[e] - acc.sum[e] * mean) / (n - 1.0);
      m.stderr_[idx] = std::sqrt(var / n);
    }
  }
  return m;
}

EstimatedMoments estimate_moments(const OutcomeRecords& records, const WeakConfig& cfg) {
  kernels::EstimatorSums acc;
  accumulate(records, cfg, acc);
  return finalize(acc);
}

OutcomeRecords simulate_pair(const BipartiteScenario& s, int x, int y, const WeakConfig& cfg) {
  cfg.validate();
  if (x < 1 || x > s.choices_a() || y < 1 || y > s.choices_b())
    throw Error(ErrorCode::InvalidArgument, "choice pair out of range");
  const JointDistribution dist(s.state(), s.obs_a()[x - 1], s.obs_b()[y - 1]);
  OutcomeRecords all;
  all.scheme = cfg.scheme;
  for (int g = 0; g < kJackknifeGroups; ++g)
    generate_group(dist, x, y, g, cfg, [&](const OutcomeRecords& r) { append(all, r); });
  return all;
}

WeakTable table_from_weak(const BipartiteScenario& s, const WeakConfig& cfg, unsigned threads) {
  cfg.validate();
  const int ma = s.choices_a(), mb = s.choices_b();
  const std::size_t npairs = static_cast<std::size_t>(ma) * mb;

  std::vector<JointDistribution> dists;
  dists.reserve(npairs);
  for (int x = 1; x <= ma; ++x)
    for (int y = 1; y <= mb; ++y) dists.emplace_back(s.state(), s.obs_a()[x - 1], s.obs_b()[y - 1]);

  std::vector<std::vector<kernels::EstimatorSums>> groups(
      npairs, std::vector<kernels::EstimatorSums>(kJackknifeGroups));
  parallel_for(npairs * kJackknifeGroups, threads, [&](std::size_t task) {
    const std::size_t p = task / kJackknifeGroups;
    const int g = static_cast<int>(task % kJackknifeGroups);
    const int x = static_cast<int>(p) / mb + 1, y = static_cast<int>(p) % mb + 1;
    generate_group(dists[p], x, y, g, cfg,
                   [&](const OutcomeRecords& r) { accumulate(r, cfg, groups[p][g]); });
  });

  std::vector<EstimatedMoments> pairs;
  pairs.reserve(npairs);
  for (const auto& gs : groups) {
    kernels::EstimatorSums total;
    for (const auto& g : gs) total += g;
    pairs.push_back(finalize(total));
  }
  auto table = assemble(ma, mb, pairs);
  return WeakTable{cfg, std::move(table), std::move(pairs), std::move(groups)};
}

WeakVerdict evaluate_weak(const WeakTable& t, ineq::InequalityName name) {
  WeakVerdict v;
  v.report = ineq::evaluate(name, t.table, ineq::SqrtPolicy::ClampNegative);

  const int ma = t.table.choices_a(), mb = t.table.choices_b();
  std::vector<double> replicas;
  for (int g = 0; g < kJackknifeGroups; ++g) {
    if (t.groups.empty() || t.groups.front()[g].count == 0) continue;
    std::vector<EstimatedMoments> loo;
    loo.reserve(t.groups.size());
    bool ok = true;
    for (const auto& gs : t.groups) {
      kernels::EstimatorSums rest;
      for (int h = 0; h < kJackknifeGroups; ++h)
        if (h != g) rest += gs[h];
      if (rest.count == 0) {
        ok = false;
        break;
      }
      loo.push_back(finalize(rest));
    }
    if (!ok) continue;
    replicas.push_back(
        ineq::evaluate(name, assemble(ma, mb, loo), ineq::SqrtPolicy::ClampNegative).margin);
  }
  if (replicas.size() >= 2) {
    double mean = 0.0;
    for (double r : replicas) mean += r;
    mean /= static_cast<double>(replicas.size());
    double ss = 0.0;
    for (double r : replicas) ss += (r - mean) * (r - mean);
    const double k = static_cast<double>(replicas.size());
    v.sigma = std::sqrt((k - 1.0) / k * ss);
  }
  return v;
}

}  // namespace bellmom::weak
