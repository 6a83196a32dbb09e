#pragma once

// The coefficient ODE for the boundary slope of the initial field on the
// flat segment:  psi psi'' - (2/3)(1-2a) psi'^2 = -1,  psi(0) = 1,
// psi'(0) = sqrt(2/(1-2a)). Solved with classical RK4 in both directions.

#include <vector>

#include "stefanlab/taylor.hpp"

namespace stefanlab {

struct PsiSolution {
    double alpha = 0.0;
    double delta = 0.0;     ///< half of the guaranteed half-interval: valid on [-2 delta, 2 delta]
    double step = 1e-4;
    double x_min = 0.0;     ///< leftmost sample actually integrated
    double x_max = 0.0;
    std::vector<double> xs;   ///< uniform grid, ascending
    std::vector<double> psi;
    std::vector<double> dpsi;

    double second_derivative(double psi_v, double dpsi_v) const;

    /// psi value/derivatives at any x in [x_min, x_max]: a local Taylor step
    /// from the nearest sample, using the ODE's derivative recursion.
    Series1 series(double x, int deg) const;
    double value(double x) const { return series(x, 0)[0]; }
    double slope(double x) const;

    /// Largest |x| <= limit such that psi stays >= floor on [x, 0] (left side).
    double left_reach(double floor) const;
};

/// Integrate the ODE on [-2 delta, 2 delta]; throws ConstructionError if the
/// positivity/convexity invariants (psi > 0, psi'' > 0) fail inside.
/// extend_to lets callers integrate further than 2 delta (the coefficient
/// blend needs psi values beyond the guaranteed interval); invariants are
/// enforced only on [-2 delta, 2 delta].
PsiSolution solve_psi(double alpha, double delta, double step, double extend_to = 0.0);

/// Largest delta in {0.24, 0.22, ..., 0.02} whose solution keeps the margins
/// psi >= 0.1 and psi'' >= 0.05 on [-2 delta, 2 delta].
double choose_delta(double alpha, double step = 1e-4);

} // namespace stefanlab
