#pragma once

// The concrete states and measurement geometries studied in the library.
// Basis convention: |+> is the first basis vector, |-> the second.

#include <vector>

#include "bellmom/scenario.hpp"

namespace bellmom::scenarios {

/// (|+-> - |-+>)/sqrt(2) with equatorial projectors
/// A_x = B_x = (1/2)[[1, e^{2 pi i x/3}], [e^{-2 pi i x/3}, 1]], x = 1..3.
BipartiteScenario bell_three_choices();

/// bell_three_choices() with A_1 -> 1 - A_1 and B_2 -> 1 - B_2: the variables
/// that are measured when the null event is moved onto A'_1 = B'_2 = 1.
BipartiteScenario bell_three_choices_complemented();

/// Projector onto the equatorial axis at angle 2 pi x / 3.
qcore::ComplexMatrix equatorial_projector(int x);

struct TiltedAmplitudes {
  double alpha;  ///< on |++>
  double beta;   ///< on |-->
};
/// alpha = sin^2 phi / sqrt(sin^4 phi + cos^4 phi), beta = cos^2 phi / (same).
TiltedAmplitudes tilted_amplitudes(double phi);

/// alpha|++> + beta|-->, A_1 = B_1 = |+><+|, A_2 = |n+><n+|, B_2 = |n-><n-|
/// with |n+-> = cos(phi)|+> +- sin(phi)|->. Throws PhiOutOfRange unless
/// phi in [0, pi/2).
BipartiteScenario tilted_two_choices(double phi);

struct SweepPoint {
  double phi;
  double lhs;
  double rhs;
  double margin;
};

/// eval_ine22 on tilted_two_choices(phi) for every grid point.
std::vector<SweepPoint> sweep_ine22(const std::vector<double>& phi_grid);

/// `steps` evenly spaced points from start to end inclusive (steps >= 2).
std::vector<double> linspace(double start, double end, int steps);

}  // namespace bellmom::scenarios
