#include "bellmom/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bellmom/constants.hpp"
#include "bellmom/error.hpp"

namespace bellmom::qcore {

namespace {

std::string dims_str(std::size_t a, std::size_t b) {
  return std::to_string(a) + " vs " + std::to_string(b);
}

// Row-major dimA x dimB matrix view of a state or intermediate vector.
using Rect = std::vector<Complex>;

// (x (x) y) psi in matrix form: x Psi y^T. Null operators mean identity.
Rect apply_product(const ComplexMatrix* x, const ComplexMatrix* y, std::span<const Complex> psi,
                   std::size_t da, std::size_t db) {
  Rect left(psi.begin(), psi.end());
  if (x != nullptr) {
    Rect tmp(da * db, Complex{});
    for (std::size_t i = 0; i < da; ++i) {
      for (std::size_t k = 0; k < da; ++k) {
        const Complex xik = (*x)(i, k);
        if (xik == Complex{}) continue;
        for (std::size_t j = 0; j < db; ++j) tmp[i * db + j] += xik * left[k * db + j];
      }
    }
    left.swap(tmp);
  }
  if (y != nullptr) {
    Rect tmp(da * db, Complex{});
    for (std::size_t i = 0; i < da; ++i) {
      for (std::size_t j = 0; j < db; ++j) {
        Complex acc{};
        for (std::size_t l = 0; l < db; ++l) acc += (*y)(j, l) * left[i * db + l];
        tmp[i * db + j] = acc;
      }
    }
    left.swap(tmp);
  }
  return left;
}

Complex inner(std::span<const Complex> u, std::span<const Complex> w) {
  Complex acc{};
  for (std::size_t i = 0; i < u.size(); ++i) acc += std::conj(u[i]) * w[i];
  return acc;
}

double checked_real(Complex value, double scale) {
  if (std::abs(value.imag()) > tol::imaginary_residual * std::max(1.0, scale)) {
    throw Error(ErrorCode::NotHermitian,
                "expectation has imaginary residual " + std::to_string(value.imag()));
  }
  return value.real();
}

double operator_scale(const ComplexMatrix& m) {
  return m.max_abs() * static_cast<double>(m.dim());
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, Complex{}) {
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "matrix dimension must be >= 1");
}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), data_(std::move(entries)) {
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "matrix dimension must be >= 1");
  if (data_.size() != dim * dim) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(dim * dim) + " entries, got " +
                    std::to_string(data_.size()));
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : dim_(rows.size()) {
  if (dim_ == 0) throw Error(ErrorCode::InvalidArgument, "matrix dimension must be >= 1");
  data_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "matrix must be square");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> v) {
  ComplexMatrix m(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
  return m;
}

double ComplexMatrix::max_abs() const {
  double best = 0.0;
  for (const auto& z : data_) best = std::max(best, std::abs(z));
  return best;
}

bool ComplexMatrix::is_hermitian(double tol) const {
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j)
      if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
  return true;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = std::conj((*this)(j, i));
  return m;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix m(dim_);
  for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = std::conj(data_[i]);
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(j, i);
  return m;
}

std::vector<Complex> ComplexMatrix::apply(std::span<const Complex> v) const {
  if (v.size() != dim_)
    throw Error(ErrorCode::DimensionMismatch, "apply: " + dims_str(v.size(), dim_));
  std::vector<Complex> out(dim_, Complex{});
  for (std::size_t i = 0; i < dim_; ++i) {
    Complex acc{};
    for (std::size_t j = 0; j < dim_; ++j) acc += (*this)(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (other.dim_ != dim_) throw Error(ErrorCode::DimensionMismatch, dims_str(dim_, other.dim_));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (other.dim_ != dim_) throw Error(ErrorCode::DimensionMismatch, dims_str(dim_, other.dim_));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, dims_str(a.dim(), b.dim()));
  const std::size_t n = a.dim();
  ComplexMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, dims_str(a.dim(), b.dim()));
  double best = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    best = std::max(best, std::abs(a.entries()[i] - b.entries()[i]));
  return best;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t da = a.dim();
  const std::size_t db = b.dim();
  ComplexMatrix out(da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j)
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l) out(i * db + k, j * db + l) = a(i, j) * b(k, l);
  return out;
}

ComplexMatrix power(const ComplexMatrix& m, int k) {
  if (k < 0) throw Error(ErrorCode::PowerOutOfRange, "negative power");
  ComplexMatrix out = ComplexMatrix::identity(m.dim());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

double observable_tolerance(const ComplexMatrix& m) {
  return std::max(tol::hermitian * m.max_abs(), tol::hermitian);
}

Observable::Observable(Party party, int choice, ComplexMatrix op)
    : party_(party), choice_(choice), op_(std::move(op)) {
  if (choice < 1) throw Error(ErrorCode::InvalidArgument, "choice index must be >= 1");
  if (!op_.is_hermitian(observable_tolerance(op_)))
    throw Error(ErrorCode::NotHermitian, "observable operator is not Hermitian");
}

BipartiteState::BipartiteState(std::size_t dim_a, std::size_t dim_b,
                               std::vector<Complex> amplitudes)
    : dim_a_(dim_a), dim_b_(dim_b), amp_(std::move(amplitudes)) {
  if (dim_a == 0 || dim_b == 0)
    throw Error(ErrorCode::InvalidArgument, "state dimensions must be >= 1");
  if (amp_.size() != dim_a * dim_b)
    throw Error(ErrorCode::DimensionMismatch,
                "amplitudes: " + dims_str(amp_.size(), dim_a * dim_b));
  double norm2 = 0.0;
  for (const auto& z : amp_) norm2 += std::norm(z);
  if (std::abs(norm2 - 1.0) > tol::normalization)
    throw Error(ErrorCode::NotNormalized, "state norm^2 = " + std::to_string(norm2));
}

BipartiteState BipartiteState::normalized(std::size_t dim_a, std::size_t dim_b,
                                          std::vector<Complex> amplitudes) {
  double norm2 = 0.0;
  for (const auto& z : amplitudes) norm2 += std::norm(z);
  if (!(norm2 > 0.0)) throw Error(ErrorCode::NotNormalized, "zero state vector");
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& z : amplitudes) z *= inv;
  return BipartiteState(dim_a, dim_b, std::move(amplitudes));
}

BipartiteState BipartiteState::product(std::span<const Complex> a, std::span<const Complex> b) {
  std::vector<Complex> amp(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) amp[i * b.size() + j] = a[i] * b[j];
  return normalized(a.size(), b.size(), std::move(amp));
}

std::vector<Complex> EigenDecomposition::vector(std::size_t j) const {
  std::vector<Complex> v(vectors.dim());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = vectors(i, j);
  return v;
}

EigenDecomposition hermitian_eigen(const ComplexMatrix& m, double tol) {
  if (!m.is_hermitian(tol)) throw Error(ErrorCode::NotHermitian, "hermitian_eigen input");
  const std::size_t n = m.dim();

  ComplexMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
  ComplexMatrix w = ComplexMatrix::identity(n);

  double frob2 = 0.0;
  for (const auto& z : a.entries()) frob2 += std::norm(z);
  const double frob = std::sqrt(frob2);

  const std::size_t budget = 100 * n * n;
  std::size_t rotations = 0;
  while (true) {
    double off2 = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off2 += std::norm(a(p, q));
    if (off2 == 0.0 || std::sqrt(2.0 * off2) <= 1e-15 * frob) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag == 0.0) continue;
        if (++rotations > budget)
          throw Error(ErrorCode::NoConvergence,
                      "Jacobi exceeded " + std::to_string(budget) + " rotations");
        const Complex phase = a(p, q) / mag;
        const Complex phase_c = std::conj(phase);
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        // V = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q); A <- V^dag A V.
        for (std::size_t k = 0; k < n; ++k) {
          const Complex x = a(k, p);
          const Complex y = a(k, q);
          a(k, p) = c * x - s * phase_c * y;
          a(k, q) = s * x + c * phase_c * y;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex x = a(p, k);
          const Complex y = a(q, k);
          a(p, k) = c * x - s * phase * y;
          a(q, k) = s * x + c * phase * y;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex x = w(k, p);
          const Complex y = w(k, q);
          w(k, p) = c * x - s * phase_c * y;
          w(k, q) = s * x + c * phase_c * y;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = w(i, order[j]);
  }
  return out;
}

double expectation(const BipartiteState& state, const ComplexMatrix& op_a,
                   const ComplexMatrix& op_b) {
  if (op_a.dim() != state.dim_a())
    throw Error(ErrorCode::DimensionMismatch, "opA: " + dims_str(op_a.dim(), state.dim_a()));
  if (op_b.dim() != state.dim_b())
    throw Error(ErrorCode::DimensionMismatch, "opB: " + dims_str(op_b.dim(), state.dim_b()));
  const auto w = apply_product(&op_a, &op_b, state.amplitudes(), state.dim_a(), state.dim_b());
  return checked_real(inner(state.amplitudes(), w), operator_scale(op_a) * operator_scale(op_b));
}

double operator_moment(const BipartiteState& state, const ComplexMatrix& a,
                       const ComplexMatrix& b, int k, int l) {
  if (k < 0 || k > 2 || l < 0 || l > 2)
    throw Error(ErrorCode::PowerOutOfRange,
                "powers must be in {0,1,2}, got " + std::to_string(k) + "," + std::to_string(l));
  if (a.dim() != state.dim_a())
    throw Error(ErrorCode::DimensionMismatch, "A: " + dims_str(a.dim(), state.dim_a()));
  if (b.dim() != state.dim_b())
    throw Error(ErrorCode::DimensionMismatch, "B: " + dims_str(b.dim(), state.dim_b()));

  // <psi| A^k B^l |psi> = <(A^k1 B^l1) psi | (A^k2 B^l2) psi> with k1 = k/2.
  const int k1 = k / 2, k2 = k - k1;
  const int l1 = l / 2, l2 = l - l1;
  const auto da = state.dim_a();
  const auto db = state.dim_b();
  const auto right =
      apply_product(k2 ? &a : nullptr, l2 ? &b : nullptr, state.amplitudes(), da, db);
  Complex value;
  if (k1 == k2 && l1 == l2) {
    double acc = 0.0;
    for (const auto& z : right) acc += std::norm(z);
    value = acc;
  } else {
    const auto left =
        apply_product(k1 ? &a : nullptr, l1 ? &b : nullptr, state.amplitudes(), da, db);
    value = inner(left, right);
  }
  const double scale = std::pow(operator_scale(a), k) * std::pow(operator_scale(b), l);
  return checked_real(value, scale);
}

double moment(const BipartiteState& state, const Observable& a, const Observable& b, int k,
              int l) {
  if (a.party() != Party::A || b.party() != Party::B)
    throw Error(ErrorCode::InvalidArgument, "moment expects an A observable and a B observable");
  return operator_moment(state, a.op(), b.op(), k, l);
}

std::vector<Complex> SchmidtDecomposition::reconstruct() const {
  if (coefficients.empty()) return {};
  const std::size_t da = basis_a.front().size();
  const std::size_t db = basis_b.front().size();
  std::vector<Complex> amp(da * db, Complex{});
  for (std::size_t k = 0; k < coefficients.size(); ++k)
    for (std::size_t i = 0; i < da; ++i)
      for (std::size_t j = 0; j < db; ++j)
        amp[i * db + j] += coefficients[k] * basis_a[k][i] * basis_b[k][j];
  return amp;
}

SchmidtDecomposition schmidt(const BipartiteState& state) {
  const std::size_t da = state.dim_a();
  const std::size_t db = state.dim_b();
  const auto m = state.amplitudes();

  ComplexMatrix gram(da);  // M M^dag
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t k = 0; k < da; ++k) {
      Complex acc{};
      for (std::size_t j = 0; j < db; ++j) acc += m[i * db + j] * std::conj(m[k * db + j]);
      gram(i, k) = acc;
    }
  const auto eig = hermitian_eigen(gram, 1e-10);

  // sigma_k = |M^T conj(u_k)| rather than sqrt(eigenvalue): the square root
  // of a rounded Gram eigenvalue loses half the digits of small coefficients.
  struct Term {
    double sigma;
    std::vector<Complex> u, v;
  };
  std::vector<Term> terms;
  for (std::size_t idx = 0; idx < da; ++idx) {
    auto u = eig.vector(idx);
    std::vector<Complex> v(db, Complex{});
    double norm2 = 0.0;
    for (std::size_t j = 0; j < db; ++j) {
      Complex acc{};
      for (std::size_t i = 0; i < da; ++i) acc += m[i * db + j] * std::conj(u[i]);
      v[j] = acc;
      norm2 += std::norm(acc);
    }
    const double sigma = std::sqrt(norm2);
    if (sigma <= tol::schmidt_cutoff) continue;
    for (auto& c : v) c /= sigma;
    terms.push_back({sigma, std::move(u), std::move(v)});
  }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& a, const Term& b) { return a.sigma > b.sigma; });

  SchmidtDecomposition out;
  for (auto& t : terms) {
    out.coefficients.push_back(t.sigma);
    out.basis_a.push_back(std::move(t.u));
    out.basis_b.push_back(std::move(t.v));
  }
  return out;
}

}  // namespace bellmom::qcore
