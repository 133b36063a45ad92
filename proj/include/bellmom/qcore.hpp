#pragma once

// Small dense complex linear algebra, bipartite pure states and exact
// quantum moments <psi| A^k (x) B^l |psi>.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace bellmom::qcore {

using Complex = std::complex<double>;

/// Dense square complex matrix, row-major.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(std::size_t dim);
  ComplexMatrix(std::size_t dim, std::vector<Complex> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> values);
  /// |v><v|
  static ComplexMatrix outer(std::span<const Complex> v);

  std::size_t dim() const noexcept { return dim_; }
  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  std::span<const Complex> entries() const noexcept { return data_; }

  double max_abs() const;
  bool is_hermitian(double tol) const;

  ComplexMatrix adjoint() const;
  ComplexMatrix conjugate() const;
  ComplexMatrix transpose() const;

  /// M v
  std::vector<Complex> apply(std::span<const Complex> v) const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

 private:
  std::size_t dim_;
  std::vector<Complex> data_;
};

/// max_ij |a_ij - b_ij|
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product; (a (x) b)[i*dimB + k, j*dimB + l] = a[i][j] b[k][l].
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

/// m^k for k >= 0.
ComplexMatrix power(const ComplexMatrix& m, int k);

/// Hermiticity tolerance used for observables: 1e-12 relative, floored at 1e-12.
double observable_tolerance(const ComplexMatrix& m);

enum class Party { A, B };

class Observable {
 public:
  Observable(Party party, int choice, ComplexMatrix op);

  Party party() const noexcept { return party_; }
  int choice() const noexcept { return choice_; }
  const ComplexMatrix& op() const noexcept { return op_; }
  std::size_t dim() const noexcept { return op_.dim(); }

 private:
  Party party_;
  int choice_;
  ComplexMatrix op_;
};

/// Pure state sum_ij c_ij |i>_A |j>_B; amplitudes stored row-major (i*dimB + j).
class BipartiteState {
 public:
  BipartiteState(std::size_t dim_a, std::size_t dim_b, std::vector<Complex> amplitudes);

  /// Rescales to unit norm before validating.
  static BipartiteState normalized(std::size_t dim_a, std::size_t dim_b,
                                   std::vector<Complex> amplitudes);
  static BipartiteState product(std::span<const Complex> a, std::span<const Complex> b);

  std::size_t dim_a() const noexcept { return dim_a_; }
  std::size_t dim_b() const noexcept { return dim_b_; }
  const Complex& amplitude(std::size_t i, std::size_t j) const { return amp_[i * dim_b_ + j]; }
  std::span<const Complex> amplitudes() const noexcept { return amp_; }

 private:
  std::size_t dim_a_;
  std::size_t dim_b_;
  std::vector<Complex> amp_;
};

struct EigenDecomposition {
  std::vector<double> values;  ///< ascending
  ComplexMatrix vectors;       ///< column j is the eigenvector of values[j]

  std::vector<Complex> vector(std::size_t j) const;
};

/// Cyclic complex Jacobi. Throws NotHermitian if `m` is not Hermitian within
/// `tol`, NoConvergence if 100*dim^2 rotations do not converge.
EigenDecomposition hermitian_eigen(const ComplexMatrix& m, double tol);

/// <psi|(opA (x) opB)|psi>. The imaginary residual is checked against 1e-10
/// (scaled by the operator norms) and dropped.
double expectation(const BipartiteState& state, const ComplexMatrix& op_a,
                   const ComplexMatrix& op_b);

/// <A^k B^l> for k, l in {0, 1, 2}.
double moment(const BipartiteState& state, const Observable& a, const Observable& b, int k,
              int l);

/// Same as moment() but directly on operators; even powers are evaluated as
/// squared norms so they stay nonnegative to rounding.
double operator_moment(const BipartiteState& state, const ComplexMatrix& a,
                       const ComplexMatrix& b, int k, int l);

struct SchmidtDecomposition {
  std::vector<double> coefficients;            ///< descending, > schmidt_cutoff
  std::vector<std::vector<Complex>> basis_a;   ///< one vector per coefficient
  std::vector<std::vector<Complex>> basis_b;

  /// sum_k c_k |a_k> |b_k> as row-major amplitudes.
  std::vector<Complex> reconstruct() const;
};

SchmidtDecomposition schmidt(const BipartiteState& state);

}  // namespace bellmom::qcore
