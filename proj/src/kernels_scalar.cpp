#include "kernels_impl.hpp"

namespace bellmom::kernels::detail::scalar {

PowerSums power_sums(const double* a, const double* b, const double* w, std::size_t n) {
  PowerSums s{};
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w ? w[i] : 1.0;
    const double ai = a[i];
    const double bi = b[i];
    const double a2 = ai * ai;
    const double b2 = bi * bi;
    s[0] += wi;
    s[1] += wi * bi;
    s[2] += wi * b2;
    s[3] += wi * ai;
    s[4] += wi * ai * bi;
    s[5] += wi * ai * b2;
    s[6] += wi * a2;
    s[7] += wi * a2 * bi;
    s[8] += wi * a2 * b2;
  }
  return s;
}

namespace {
inline void add(EstimatorSums& acc, int idx, double v) {
  acc.sum[idx] += v;
  acc.sumsq[idx] += v * v;
}
}  // namespace

void subtract_estimators(const double* a, const double* b, double shift, std::size_t n,
                         EstimatorSums& acc) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ai = a[i];
    const double bi = b[i];
    const double a2 = ai * ai - shift;
    const double b2 = bi * bi - shift;
    add(acc, 0, ai);
    add(acc, 1, bi);
    add(acc, 2, a2);
    add(acc, 3, b2);
    add(acc, 4, ai * bi);
    add(acc, 5, a2 * bi);
    add(acc, 6, ai * b2);
    add(acc, 7, a2 * b2);
  }
  acc.count += n;
}

void twin_estimators(const double* a, const double* ap, const double* b, const double* bp,
                     std::size_t n, EstimatorSums& acc) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ma = 0.5 * (a[i] + ap[i]);
    const double mb = 0.5 * (b[i] + bp[i]);
    const double a2 = a[i] * ap[i];
    const double b2 = b[i] * bp[i];
    add(acc, 0, ma);
    add(acc, 1, mb);
    add(acc, 2, a2);
    add(acc, 3, b2);
    add(acc, 4, ma * mb);
    add(acc, 5, a2 * mb);
    add(acc, 6, ma * b2);
    add(acc, 7, a2 * b2);
  }
  acc.count += n;
}

void eval_w_batch(const double* a1, const double* a2, const double* b1, const double* b2,
                  double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double sa1 = a1[i] * a1[i];
    const double sa2 = a2[i] * a2[i];
    const double sb1 = b1[i] * b1[i];
    const double sb2 = b2[i] * b2[i];
    const double sa = sa1 + sa2;
    const double sb = sb1 + sb2;
    const double cross = (sa1 - sa2) * (b1[i] + b2[i]) + (sb1 - sb2) * (a1[i] + a2[i]);
    out[i] = sa + sb + sa * sb - w_cross_coefficient * cross;
  }
}

}  // namespace bellmom::kernels::detail::scalar
