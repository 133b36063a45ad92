#include "bellmom/lhv.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "bellmom/constants.hpp"
#include "bellmom/error.hpp"
#include "bellmom/random_instances.hpp"

namespace bellmom::lhv {

using qcore::Complex;
using qcore::ComplexMatrix;

namespace {

void check_context(int N, std::size_t dim, const char* what) {
  if (N < 1)
    throw Error(ErrorCode::NotMaximallyEntangledContext, "Schmidt dimension must be >= 1");
  if (dim < static_cast<std::size_t>(N))
    throw Error(ErrorCode::NotMaximallyEntangledContext,
                std::string(what) + " dimension " + std::to_string(dim) + " is below N = " +
                    std::to_string(N));
}

struct BlockTerms {
  ComplexMatrix m;  // 1_N B* 1_N on the N block
  ComplexMatrix c;  // B_e^T B_e^* = (1_N B*^2 1_N - (1_N B* 1_N)^2) on the N block
};

BlockTerms block_terms(const ComplexMatrix& b, std::size_t n) {
  BlockTerms t{ComplexMatrix(n), ComplexMatrix(n)};
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      t.m(r, c) = std::conj(b(r, c));
      Complex acc{};
      for (std::size_t k = n; k < b.dim(); ++k) acc += std::conj(b(r, k) * b(k, c));
      t.c(r, c) = acc;
    }
  return t;
}

// <u| X |v> with X acting on the first n coordinates.
Complex block_form(const std::vector<Complex>& u, const ComplexMatrix& x,
                   const std::vector<Complex>& v) {
  Complex acc{};
  for (std::size_t r = 0; r < x.dim(); ++r) {
    Complex row{};
    for (std::size_t c = 0; c < x.dim(); ++c) row += x(r, c) * v[c];
    acc += std::conj(u[r]) * row;
  }
  return acc;
}

}  // namespace

qcore::BipartiteState maximally_entangled(int N, std::size_t dim_a, std::size_t dim_b) {
  check_context(N, dim_a, "A");
  check_context(N, dim_b, "B");
  std::vector<Complex> amp(dim_a * dim_b, 0.0);
  const double v = 1.0 / std::sqrt(static_cast<double>(N));
  for (int j = 0; j < N; ++j) amp[static_cast<std::size_t>(j) * dim_b + j] = v;
  return qcore::BipartiteState(dim_a, dim_b, std::move(amp));
}

LhvModel build_lhv(int N, std::size_t dim_a, const qcore::Observable& a_plus,
                   const qcore::Observable& a_minus, const std::vector<qcore::Observable>& bs) {
  check_context(N, dim_a, "A");
  if (a_plus.dim() != dim_a || a_minus.dim() != dim_a)
    throw Error(ErrorCode::DimensionMismatch, "A+ and A- must act on the A space");
  if (a_plus.party() != qcore::Party::A || a_minus.party() != qcore::Party::A)
    throw Error(ErrorCode::InvalidArgument, "A+ and A- must be A observables");
  std::vector<ComplexMatrix> ops;
  for (const auto& b : bs) {
    if (b.party() != qcore::Party::B)
      throw Error(ErrorCode::InvalidArgument, "B list holds a non-B observable");
    ops.push_back(b.op());
  }
  return build_lhv_from_eigen(N,
                              qcore::hermitian_eigen(a_plus.op(),
                                                     qcore::observable_tolerance(a_plus.op())),
                              qcore::hermitian_eigen(a_minus.op(),
                                                     qcore::observable_tolerance(a_minus.op())),
                              ops);
}

LhvModel build_lhv_from_eigen(int N, const qcore::EigenDecomposition& ep,
                              const qcore::EigenDecomposition& em,
                              const std::vector<ComplexMatrix>& bs) {
  const std::size_t dim_a = ep.values.size();
  check_context(N, dim_a, "A");
  if (em.values.size() != dim_a)
    throw Error(ErrorCode::DimensionMismatch, "A+ and A- dimensions differ");
  if (bs.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one B observable");
  const std::size_t n = static_cast<std::size_t>(N);
  const double inv_n = 1.0 / N;

  std::vector<std::vector<Complex>> vp(dim_a), vm(dim_a);
  for (std::size_t i = 0; i < dim_a; ++i) {
    vp[i] = ep.vector(i);
    vm[i] = em.vector(i);
  }

  LhvModel model;
  model.N = N;
  model.choices_b = bs.size();
  auto& diag = model.diagnostics;
  diag.c_plus.assign(bs.size(), 0.0);
  diag.c_minus.assign(bs.size(), 0.0);

  std::vector<BlockTerms> blocks;
  std::vector<std::vector<double>> cp(bs.size()), cm(bs.size());  // c(a+), c(a-)
  for (std::size_t y = 0; y < bs.size(); ++y) {
    check_context(N, bs[y].dim(), "B");
    if (!bs[y].is_hermitian(qcore::observable_tolerance(bs[y])))
      throw Error(ErrorCode::NotHermitian, "B observable is not Hermitian");
    blocks.push_back(block_terms(bs[y], n));
    cp[y].resize(dim_a);
    cm[y].resize(dim_a);
    for (std::size_t i = 0; i < dim_a; ++i) {
      cp[y][i] = block_form(vp[i], blocks[y].c, vp[i]).real() * inv_n;
      cm[y][i] = block_form(vm[i], blocks[y].c, vm[i]).real() * inv_n;
      diag.c_plus[y] += cp[y][i];
      diag.c_minus[y] += cm[y][i];
    }
    if (diag.c_plus[y] > tol::lhv_c_zero) ++diag.c_positive;
  }

  std::vector<double> lost(bs.size(), 0.0);
  for (std::size_t i = 0; i < dim_a; ++i)
    for (std::size_t j = 0; j < dim_a; ++j) {
      Complex overlap{};  // <a+|1_N|a->
      for (std::size_t r = 0; r < n; ++r) overlap += std::conj(vp[i][r]) * vm[j][r];
      double w = std::norm(overlap) * inv_n;
      if (w < 0.0 && w >= -tol::lhv_weight_clamp) w = 0.0;
      diag.weight_sum += w;

      Cell cell;
      cell.index_plus = i;
      cell.index_minus = j;
      cell.weight = w;
      cell.a_plus = ep.values[i];
      cell.a_minus = em.values[j];
      for (std::size_t y = 0; y < bs.size(); ++y) {
        // <a-|1_N B* 1_N|a+>; the mirrored term is its conjugate times conj(overlap).
        const Complex m = block_form(vm[j], blocks[y].m, vp[i]);
        const double b1 = (overlap * m).real() * inv_n;
        double b2 = std::norm(m) * inv_n;
        const double c = diag.c_plus[y];
        if (c > tol::lhv_c_zero) b2 += cp[y][i] * cm[y][j] / c;
        cell.b1.push_back(b1);
        cell.b2.push_back(b2);
        diag.max_cbs_excess = std::max(diag.max_cbs_excess, b1 * b1 - b2 * w);
      }
      if (w <= tol::lhv_zero_weight) {
        ++diag.dropped_cells;
        for (std::size_t y = 0; y < bs.size(); ++y) lost[y] += cell.b2[y];
        continue;
      }
      for (std::size_t y = 0; y < bs.size(); ++y) {
        const double mean = cell.b1[y] / w;
        double var = (cell.b2[y] * w - cell.b1[y] * cell.b1[y]) / (w * w);
        diag.min_raw_variance = std::min(diag.min_raw_variance, var);
        if (var < 0.0) {
          const double scale = std::max(1.0, cell.b2[y] / w);
          if (var < -tol::lhv_variance_clamp * scale)
            throw Error(ErrorCode::NegativeVariance,
                        "conditional variance " + std::to_string(var) + " in cell (" +
                            std::to_string(i) + ", " + std::to_string(j) + ")");
          var = 0.0;
        }
        Conditional cond;
        cond.mean = mean;
        if (var <= tol::lhv_delta_variance) {
          cond.kind = Conditional::Kind::Delta;
        } else {
          cond.kind = Conditional::Kind::Gaussian;
          cond.variance = var;
        }
        cell.b.push_back(cond);
      }
      model.cells.push_back(std::move(cell));
    }
  diag.lost_second_moment = *std::max_element(lost.begin(), lost.end());
  return model;
}

ineq::MomentTable lhv_moments(const LhvModel& model) {
  const int mb = static_cast<int>(model.choices_b);
  std::vector<double> v(ineq::MomentTable::size_for(2, mb), 0.0);
  const ineq::MomentTable shape(2, mb, std::vector<double>(v.size(), 1.0),
                                ineq::TableCheck::Statistical);
  for (const auto& cell : model.cells)
    for (int x = 1; x <= 2; ++x) {
      const double a = x == 1 ? cell.a_plus : cell.a_minus;
      const double ak[3] = {1.0, a, a * a};
      for (int y = 1; y <= mb; ++y) {
        const auto& c = cell.b[y - 1];
        const double bl[3] = {cell.weight, cell.weight * c.mean,
                              cell.weight * (c.mean * c.mean + c.variance)};
        for (int k = 0; k <= 2; ++k)
          for (int l = 0; l <= 2; ++l) v[shape.index(x, y, k, l)] += ak[k] * bl[l];
      }
    }
  // Normalization to the retained weight (1 up to dropped measure-zero cells).
  for (int x = 1; x <= 2; ++x)
    for (int y = 1; y <= mb; ++y) v[shape.index(x, y, 0, 0)] = 1.0;
  return ineq::MomentTable(2, mb, std::move(v), ineq::TableCheck::Sampled);
}

ineq::HiddenVariableSamples sample_lhv(const LhvModel& model, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  if (model.cells.empty()) throw Error(ErrorCode::EmptySample, "model has no cells");
  std::vector<double> cdf;
  double acc = 0.0;
  for (const auto& c : model.cells) cdf.push_back(acc += c.weight);
  Rng cell_rng = make_stream(seed, 0, 1);
  Rng b_rng = make_stream(seed, 0, 2);
  std::normal_distribution<double> n01;
  ineq::HiddenVariableSamples out(2, static_cast<int>(model.choices_b));
  std::vector<double> a(2), b(model.choices_b);
  for (std::size_t s = 0; s < n; ++s) {
    const double u = static_cast<double>(cell_rng() >> 11) * 0x1p-53 * acc;
    const std::size_t k = std::min<std::size_t>(
        static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()),
        cdf.size() - 1);
    const auto& cell = model.cells[k];
    a[0] = cell.a_plus;
    a[1] = cell.a_minus;
    for (std::size_t y = 0; y < b.size(); ++y) {
      const auto& c = cell.b[y];
      b[y] = c.kind == Conditional::Kind::Delta ? c.mean
                                                : c.mean + std::sqrt(c.variance) * n01(b_rng);
    }
    out.add(a, b);
  }
  return out;
}

BipartiteScenario quantum_scenario(int N, const qcore::Observable& a_plus,
                                   const qcore::Observable& a_minus,
                                   const std::vector<qcore::Observable>& bs) {
  if (bs.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one B observable");
  const auto state = maximally_entangled(N, a_plus.dim(), bs.front().dim());
  std::vector<qcore::Observable> obs_a{qcore::Observable(qcore::Party::A, 1, a_plus.op()),
                                       qcore::Observable(qcore::Party::A, 2, a_minus.op())};
  return BipartiteScenario(state, std::move(obs_a), bs);
}

Input random_input(int N, std::size_t dim_a, std::size_t dim_b, std::size_t choices_b, Rng& rng,
                   bool projectors) {
  using qcore::Observable;
  using qcore::Party;
  auto a_op = [&] { return projectors ? random::projector(dim_a, rng) : random::hermitian(dim_a, rng); };
  Input in{N, Observable(Party::A, 1, a_op()), Observable(Party::A, 2, a_op()), {}};
  for (std::size_t y = 0; y < choices_b; ++y)
    in.bs.emplace_back(Party::B, static_cast<int>(y + 1), random::hermitian(dim_b, rng));
  return in;
}

Check check(const Input& in) {
  const auto model = build_lhv(in.N, in.a_plus.dim(), in.a_plus, in.a_minus, in.bs);
  const auto lt = lhv_moments(model);
  const auto qt = ineq::table_from_scenario(quantum_scenario(in.N, in.a_plus, in.a_minus, in.bs));
  Check c;
  for (std::size_t i = 0; i < qt.entries().size(); ++i)
    c.max_discrepancy = std::max(c.max_discrepancy, std::abs(lt.entries()[i] - qt.entries()[i]));
  for (const auto& cell : model.cells) {
    if (cell.weight < 0.0) c.semipositive = false;
    for (const auto& b : cell.b)
      if (b.variance < 0.0) c.semipositive = false;
  }
  c.c_positive_branch = model.diagnostics.c_positive > 0;
  c.diagnostics = model.diagnostics;
  return c;
}

}  // namespace bellmom::lhv
