#include "bellmom/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <string_view>

#include "bellmom/error.hpp"
#include "kernels_impl.hpp"

namespace bellmom::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(BELLMOM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool has = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return has;
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("BELLMOM_ISA")) {
    if (std::string_view(env) == "scalar") return Isa::Scalar;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<int>& override_slot() {
  static std::atomic<int> slot{-1};
  return slot;
}

void check_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

[[maybe_unused]] bool use_avx2(Isa isa) {
  if (isa != Isa::Avx2) return false;
  if (!cpu_has_avx2()) throw Error(ErrorCode::InvalidArgument, "ISA not available: avx2");
  return true;
}

}  // namespace

EstimatorSums& EstimatorSums::operator+=(const EstimatorSums& other) {
  for (int i = 0; i < 8; ++i) {
    sum[i] += other.sum[i];
    sumsq[i] += other.sumsq[i];
  }
  count += other.count;
  return *this;
}

EstimatorSums& EstimatorSums::operator-=(const EstimatorSums& other) {
  for (int i = 0; i < 8; ++i) {
    sum[i] -= other.sum[i];
    sumsq[i] -= other.sumsq[i];
  }
  count -= other.count;
  return *this;
}

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) { return isa == Isa::Scalar || cpu_has_avx2(); }

Isa active_isa() {
  const int forced = override_slot().load(std::memory_order_relaxed);
  if (forced >= 0) return static_cast<Isa>(forced);
  static const Isa detected = detect();
  return detected;
}

void set_isa(Isa isa) {
  if (!isa_available(isa))
    throw Error(ErrorCode::InvalidArgument,
                std::string("ISA not available: ") + std::string(to_string(isa)));
  override_slot().store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset_isa() { override_slot().store(-1, std::memory_order_relaxed); }

PowerSums power_sums(Isa isa, std::span<const double> a, std::span<const double> b,
                     std::span<const double> w) {
  check_same(a.size(), b.size(), "power_sums");
  if (!w.empty()) check_same(a.size(), w.size(), "power_sums weights");
  const double* wp = w.empty() ? nullptr : w.data();
#if defined(BELLMOM_HAVE_AVX2)
  if (use_avx2(isa)) return detail::avx2::power_sums(a.data(), b.data(), wp, a.size());
#endif
  (void)isa;
  return detail::scalar::power_sums(a.data(), b.data(), wp, a.size());
}

PowerSums power_sums(std::span<const double> a, std::span<const double> b,
                     std::span<const double> w) {
  return power_sums(active_isa(), a, b, w);
}

void subtract_estimators(Isa isa, std::span<const double> a, std::span<const double> b,
                         double shift, EstimatorSums& acc) {
  check_same(a.size(), b.size(), "subtract_estimators");
#if defined(BELLMOM_HAVE_AVX2)
  if (use_avx2(isa)) {
    detail::avx2::subtract_estimators(a.data(), b.data(), shift, a.size(), acc);
    return;
  }
#endif
  (void)isa;
  detail::scalar::subtract_estimators(a.data(), b.data(), shift, a.size(), acc);
}

void subtract_estimators(std::span<const double> a, std::span<const double> b, double shift,
                         EstimatorSums& acc) {
  subtract_estimators(active_isa(), a, b, shift, acc);
}

void twin_estimators(Isa isa, std::span<const double> a, std::span<const double> ap,
                     std::span<const double> b, std::span<const double> bp, EstimatorSums& acc) {
  check_same(a.size(), ap.size(), "twin_estimators a'");
  check_same(a.size(), b.size(), "twin_estimators b");
  check_same(a.size(), bp.size(), "twin_estimators b'");
#if defined(BELLMOM_HAVE_AVX2)
  if (use_avx2(isa)) {
    detail::avx2::twin_estimators(a.data(), ap.data(), b.data(), bp.data(), a.size(), acc);
    return;
  }
#endif
  (void)isa;
  detail::scalar::twin_estimators(a.data(), ap.data(), b.data(), bp.data(), a.size(), acc);
}

void twin_estimators(std::span<const double> a, std::span<const double> ap,
                     std::span<const double> b, std::span<const double> bp, EstimatorSums& acc) {
  twin_estimators(active_isa(), a, ap, b, bp, acc);
}

void eval_w_batch(Isa isa, std::span<const double> a1, std::span<const double> a2,
                  std::span<const double> b1, std::span<const double> b2, std::span<double> out) {
  check_same(a1.size(), a2.size(), "eval_w_batch");
  check_same(a1.size(), b1.size(), "eval_w_batch");
  check_same(a1.size(), b2.size(), "eval_w_batch");
  check_same(a1.size(), out.size(), "eval_w_batch out");
#if defined(BELLMOM_HAVE_AVX2)
  if (use_avx2(isa)) {
    detail::avx2::eval_w_batch(a1.data(), a2.data(), b1.data(), b2.data(), out.data(),
                               a1.size());
    return;
  }
#endif
  (void)isa;
  detail::scalar::eval_w_batch(a1.data(), a2.data(), b1.data(), b2.data(), out.data(),
                               a1.size());
}

void eval_w_batch(std::span<const double> a1, std::span<const double> a2,
                  std::span<const double> b1, std::span<const double> b2, std::span<double> out) {
  eval_w_batch(active_isa(), a1, a2, b1, b2, out);
}

}  // namespace bellmom::kernels
