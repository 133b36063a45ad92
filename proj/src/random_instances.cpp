#include "bellmom/random_instances.hpp"

#include <cmath>

namespace bellmom {

Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(purpose), 0x6d6f6d73u};
  return Rng(seq);
}

namespace random {

using qcore::Complex;
using qcore::ComplexMatrix;

qcore::ComplexMatrix hermitian(std::size_t dim, Rng& rng, double scale) {
  std::normal_distribution<double> n01;
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m(i, i) = scale * n01(rng);
    for (std::size_t j = i + 1; j < dim; ++j) {
      const Complex z(scale * n01(rng), scale * n01(rng));
      m(i, j) = z / std::sqrt(2.0);
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

qcore::ComplexMatrix unitary(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> n01;
  std::vector<std::vector<Complex>> cols(dim, std::vector<Complex>(dim));
  for (auto& c : cols)
    for (auto& z : c) z = Complex(n01(rng), n01(rng));
  // Modified Gram-Schmidt, twice for orthogonality at rounding level.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < dim; ++j) {
      for (std::size_t k = 0; k < j; ++k) {
        Complex proj{};
        for (std::size_t i = 0; i < dim; ++i) proj += std::conj(cols[k][i]) * cols[j][i];
        for (std::size_t i = 0; i < dim; ++i) cols[j][i] -= proj * cols[k][i];
      }
      double norm2 = 0.0;
      for (const auto& z : cols[j]) norm2 += std::norm(z);
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& z : cols[j]) z *= inv;
    }
  }
  ComplexMatrix u(dim);
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t i = 0; i < dim; ++i) u(i, j) = cols[j][i];
  return u;
}

qcore::ComplexMatrix projector(std::size_t dim, Rng& rng, std::size_t rank) {
  const auto u = unitary(dim, rng);
  ComplexMatrix p(dim);
  for (std::size_t r = 0; r < rank && r < dim; ++r)
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) p(i, j) += u(i, r) * std::conj(u(j, r));
  // Exact Hermitian symmetry.
  for (std::size_t i = 0; i < dim; ++i) {
    p(i, i) = p(i, i).real();
    for (std::size_t j = i + 1; j < dim; ++j) p(j, i) = std::conj(p(i, j));
  }
  return p;
}

std::vector<qcore::Complex> unit_vector(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> n01;
  std::vector<Complex> v(dim);
  double norm2 = 0.0;
  for (auto& z : v) {
    z = Complex(n01(rng), n01(rng));
    norm2 += std::norm(z);
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& z : v) z *= inv;
  return v;
}

qcore::BipartiteState state(std::size_t dim_a, std::size_t dim_b, Rng& rng) {
  auto v = unit_vector(dim_a * dim_b, rng);
  return qcore::BipartiteState::normalized(dim_a, dim_b, std::move(v));
}

ineq::SallesCoefficients salles_coefficients(int terms, int choices_a, int choices_b, Rng& rng) {
  std::normal_distribution<double> n01;
  ineq::SallesCoefficients c{terms, choices_a, choices_b, {}};
  const std::size_t block = static_cast<std::size_t>(choices_a) * choices_b;
  c.values.resize(block * terms);
  double total = 0.0;
  for (int i = 0; i < terms; ++i) {
    double* t = c.values.data() + block * i;
    for (std::size_t k = 0; k < block; ++k) t[k] = n01(rng);
    // |t|_2^2 = largest eigenvalue of t^T t
    ComplexMatrix gram(choices_b);
    for (int y = 0; y < choices_b; ++y)
      for (int z = 0; z < choices_b; ++z) {
        double acc = 0.0;
        for (int x = 0; x < choices_a; ++x) acc += t[x * choices_b + y] * t[x * choices_b + z];
        gram(y, z) = acc;
      }
    total += qcore::hermitian_eigen(gram, 1e-10).values.back();
  }
  const double scale = total > 0.0 ? 1.0 / std::sqrt(total) : 0.0;
  for (auto& v : c.values) v *= scale;
  return c;
}

}  // namespace random
}  // namespace bellmom
