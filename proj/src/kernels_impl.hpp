#pragma once

#include "bellmom/kernels.hpp"

namespace bellmom::kernels::detail {

// 3*sqrt(3)/4
inline constexpr double w_cross_coefficient = 1.299038105676658;

namespace scalar {
PowerSums power_sums(const double* a, const double* b, const double* w, std::size_t n);
void subtract_estimators(const double* a, const double* b, double shift, std::size_t n,
                         EstimatorSums& acc);
void twin_estimators(const double* a, const double* ap, const double* b, const double* bp,
                     std::size_t n, EstimatorSums& acc);
void eval_w_batch(const double* a1, const double* a2, const double* b1, const double* b2,
                  double* out, std::size_t n);
}  // namespace scalar

#if defined(BELLMOM_HAVE_AVX2)
namespace avx2 {
PowerSums power_sums(const double* a, const double* b, const double* w, std::size_t n);
void subtract_estimators(const double* a, const double* b, double shift, std::size_t n,
                         EstimatorSums& acc);
void twin_estimators(const double* a, const double* ap, const double* b, const double* bp,
                     std::size_t n, EstimatorSums& acc);
void eval_w_batch(const double* a1, const double* a2, const double* b1, const double* b2,
                  double* out, std::size_t n);
}  // namespace avx2
#endif

}  // namespace bellmom::kernels::detail
