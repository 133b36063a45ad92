// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace bellmom::kernels::detail::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

struct Acc8 {
  __m256d sum[8];
  __m256d sq[8];

  Acc8() {
    for (int i = 0; i < 8; ++i) {
      sum[i] = _mm256_setzero_pd();
      sq[i] = _mm256_setzero_pd();
    }
  }

  inline void add(int idx, __m256d v) {
    sum[idx] = _mm256_add_pd(sum[idx], v);
    sq[idx] = _mm256_fmadd_pd(v, v, sq[idx]);
  }

  void flush(EstimatorSums& acc) const {
    for (int i = 0; i < 8; ++i) {
      acc.sum[i] += hsum(sum[i]);
      acc.sumsq[i] += hsum(sq[i]);
    }
  }
};

}  // namespace

PowerSums power_sums(const double* a, const double* b, const double* w, std::size_t n) {
  __m256d s[9];
  for (auto& v : s) v = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wi = w ? _mm256_loadu_pd(w + i) : one;
    const __m256d ai = _mm256_loadu_pd(a + i);
    const __m256d bi = _mm256_loadu_pd(b + i);
    const __m256d wa = _mm256_mul_pd(wi, ai);
    const __m256d wa2 = _mm256_mul_pd(wa, ai);
    const __m256d b2 = _mm256_mul_pd(bi, bi);
    s[0] = _mm256_add_pd(s[0], wi);
    s[1] = _mm256_fmadd_pd(wi, bi, s[1]);
    s[2] = _mm256_fmadd_pd(wi, b2, s[2]);
    s[3] = _mm256_add_pd(s[3], wa);
    s[4] = _mm256_fmadd_pd(wa, bi, s[4]);
    s[5] = _mm256_fmadd_pd(wa, b2, s[5]);
    s[6] = _mm256_add_pd(s[6], wa2);
    s[7] = _mm256_fmadd_pd(wa2, bi, s[7]);
    s[8] = _mm256_fmadd_pd(wa2, b2, s[8]);
  }
  PowerSums out{};
  for (int k = 0; k < 9; ++k) out[k] = hsum(s[k]);
  const PowerSums tail = scalar::power_sums(a + i, b + i, w ? w + i : nullptr, n - i);
  for (int k = 0; k < 9; ++k) out[k] += tail[k];
  return out;
}

void subtract_estimators(const double* a, const double* b, double shift, std::size_t n,
                         EstimatorSums& acc) {
  Acc8 v;
  const __m256d s = _mm256_set1_pd(shift);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ai = _mm256_loadu_pd(a + i);
    const __m256d bi = _mm256_loadu_pd(b + i);
    const __m256d a2 = _mm256_fmsub_pd(ai, ai, s);
    const __m256d b2 = _mm256_fmsub_pd(bi, bi, s);
    v.add(0, ai);
    v.add(1, bi);
    v.add(2, a2);
    v.add(3, b2);
    v.add(4, _mm256_mul_pd(ai, bi));
    v.add(5, _mm256_mul_pd(a2, bi));
    v.add(6, _mm256_mul_pd(ai, b2));
    v.add(7, _mm256_mul_pd(a2, b2));
  }
  v.flush(acc);
  acc.count += i;
  scalar::subtract_estimators(a + i, b + i, shift, n - i, acc);
}

void twin_estimators(const double* a, const double* ap, const double* b, const double* bp,
                     std::size_t n, EstimatorSums& acc) {
  Acc8 v;
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ai = _mm256_loadu_pd(a + i);
    const __m256d api = _mm256_loadu_pd(ap + i);
    const __m256d bi = _mm256_loadu_pd(b + i);
    const __m256d bpi = _mm256_loadu_pd(bp + i);
    const __m256d ma = _mm256_mul_pd(half, _mm256_add_pd(ai, api));
    const __m256d mb = _mm256_mul_pd(half, _mm256_add_pd(bi, bpi));
    const __m256d a2 = _mm256_mul_pd(ai, api);
    const __m256d b2 = _mm256_mul_pd(bi, bpi);
    v.add(0, ma);
    v.add(1, mb);
    v.add(2, a2);
    v.add(3, b2);
    v.add(4, _mm256_mul_pd(ma, mb));
    v.add(5, _mm256_mul_pd(a2, mb));
    v.add(6, _mm256_mul_pd(ma, b2));
    v.add(7, _mm256_mul_pd(a2, b2));
  }
  v.flush(acc);
  acc.count += i;
  scalar::twin_estimators(a + i, ap + i, b + i, bp + i, n - i, acc);
}

void eval_w_batch(const double* a1, const double* a2, const double* b1, const double* b2,
                  double* out, std::size_t n) {
  const __m256d c = _mm256_set1_pd(w_cross_coefficient);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x1 = _mm256_loadu_pd(a1 + i);
    const __m256d x2 = _mm256_loadu_pd(a2 + i);
    const __m256d y1 = _mm256_loadu_pd(b1 + i);
    const __m256d y2 = _mm256_loadu_pd(b2 + i);
    const __m256d sx1 = _mm256_mul_pd(x1, x1);
    const __m256d sx2 = _mm256_mul_pd(x2, x2);
    const __m256d sy1 = _mm256_mul_pd(y1, y1);
    const __m256d sy2 = _mm256_mul_pd(y2, y2);
    const __m256d sa = _mm256_add_pd(sx1, sx2);
    const __m256d sb = _mm256_add_pd(sy1, sy2);
    const __m256d cross =
        _mm256_fmadd_pd(_mm256_sub_pd(sx1, sx2), _mm256_add_pd(y1, y2),
                        _mm256_mul_pd(_mm256_sub_pd(sy1, sy2), _mm256_add_pd(x1, x2)));
    const __m256d w = _mm256_fnmadd_pd(c, cross, _mm256_fmadd_pd(sa, sb, _mm256_add_pd(sa, sb)));
    _mm256_storeu_pd(out + i, w);
  }
  scalar::eval_w_batch(a1 + i, a2 + i, b1 + i, b2 + i, out + i, n - i);
}

}  // namespace bellmom::kernels::detail::avx2
