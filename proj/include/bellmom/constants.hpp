#pragma once

// Numerical tolerances shared by every module. The closed-form values this
// library reproduces are exact rationals, so the tolerances are tight.

namespace bellmom::tol {

inline constexpr double hermitian = 1e-12;
inline constexpr double normalization = 1e-12;
inline constexpr double imaginary_residual = 1e-10;
inline constexpr double eigen_reconstruction = 1e-10;
inline constexpr double degenerate_cluster = 1e-9;
inline constexpr double schmidt_cutoff = 1e-12;

inline constexpr double marginal_exact = 1e-10;
inline constexpr double marginal_sampled = 1e-6;

// Square-root arguments in [-sqrt_clamp, 0) are floating-point dust.
inline constexpr double sqrt_clamp = 1e-12;
// A report is satisfied iff margin >= -satisfied.
inline constexpr double satisfied = 1e-12;

inline constexpr double lhv_weight_clamp = 1e-14;
inline constexpr double lhv_zero_weight = 1e-15;
inline constexpr double lhv_variance_clamp = 1e-12;
inline constexpr double lhv_delta_variance = 1e-14;
inline constexpr double lhv_c_zero = 1e-14;

}  // namespace bellmom::tol
