#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference variant and,
// on x86-64, an AVX2+FMA variant chosen at runtime from CPUID. Set
// BELLMOM_ISA=scalar in the environment (or call set_isa) to pin the
// reference path.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <utility>

namespace bellmom::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);
bool isa_available(Isa isa);
Isa active_isa();
/// Throws InvalidArgument if the ISA is not supported by this CPU/build.
void set_isa(Isa isa);
void reset_isa();

/// sum_i w_i a_i^k b_i^l, stored at [3k + l]. Empty `w` means unit weights.
using PowerSums = std::array<double, 9>;

/// Per-record estimators of the eight nontrivial moments, in the order of
/// `estimator_powers`.
inline constexpr std::array<std::pair<int, int>, 8> estimator_powers{
    {{1, 0}, {0, 1}, {2, 0}, {0, 2}, {1, 1}, {2, 1}, {1, 2}, {2, 2}}};

struct EstimatorSums {
  std::array<double, 8> sum{};
  std::array<double, 8> sumsq{};
  std::size_t count = 0;

  EstimatorSums& operator+=(const EstimatorSums& other);
  EstimatorSums& operator-=(const EstimatorSums& other);
};

PowerSums power_sums(std::span<const double> a, std::span<const double> b,
                     std::span<const double> w = {});
PowerSums power_sums(Isa isa, std::span<const double> a, std::span<const double> b,
                     std::span<const double> w = {});

/// Noise-subtraction estimators with shift s = 1/4g:
/// a, b, a^2-s, b^2-s, ab, (a^2-s)b, a(b^2-s), (a^2-s)(b^2-s).
void subtract_estimators(std::span<const double> a, std::span<const double> b, double shift,
                         EstimatorSums& acc);
void subtract_estimators(Isa isa, std::span<const double> a, std::span<const double> b,
                         double shift, EstimatorSums& acc);

/// Twin-detector estimators with ma = (a+a')/2, mb = (b+b')/2:
/// ma, mb, aa', bb', ma mb, aa' mb, ma bb', aa'bb'.
void twin_estimators(std::span<const double> a, std::span<const double> ap,
                     std::span<const double> b, std::span<const double> bp, EstimatorSums& acc);
void twin_estimators(Isa isa, std::span<const double> a, std::span<const double> ap,
                     std::span<const double> b, std::span<const double> bp, EstimatorSums& acc);

/// Batch evaluation of the quartic W(A1, A2, B1, B2) used by the sospoly module.
void eval_w_batch(std::span<const double> a1, std::span<const double> a2,
                  std::span<const double> b1, std::span<const double> b2, std::span<double> out);
void eval_w_batch(Isa isa, std::span<const double> a1, std::span<const double> a2,
                  std::span<const double> b1, std::span<const double> b2, std::span<double> out);

}  // namespace bellmom::kernels
