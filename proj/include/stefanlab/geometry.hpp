#pragma once

// The domain: the disk of radius 2 centered at (0,2), with the lower boundary
// flattened to the level 1/20 over [-delta, delta] and rejoined to the circle
// over (delta, 1/2) by a convex blend. The blend fixes g'' = m > 0, where m
// vanishes to all orders at the flat end and matches the circle curvature to
// the configured order at the circle end; two bump amplitudes are solved so
// value and slope close at the flat end.

#include <array>
#include <vector>

#include "stefanlab/taylor.hpp"

namespace stefanlab {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct BoundarySample {
    Point p;
    double nx = 0.0; ///< outward unit normal
    double ny = 0.0;
    double param = 0.0; ///< arc parameter in [0, 1)
};

/// Lower-circle graph: G(x) = 2 - sqrt(4 - x^2) on (-2, 2).
double eval_G(double x, int order);
Series1 G_series(double x0, int deg);

class DomainSpec {
public:
    DomainSpec() = default;

    double delta() const { return delta_; }
    double flat_level() const { return flat_level_; }
    int match_order() const { return match_order_; }
    double bump_exponent() const { return bump_p_; }
    double bump_shift() const { return shift_c_; }
    double amp_a() const { return amp_a_; }
    double amp_b() const { return amp_b_; }

    /// g and derivatives; order handled exactly on every piece.
    double eval_g(double x, int order = 0) const;
    Series1 g_series(double x0, int deg) const;

    /// g'' model on the blend interval (positive side coordinates).
    double blend_m(double x) const;
    Series1 blend_m_series(double x0, int deg) const;

    bool contains(Point p) const;

    /// Signed height above the graph: y - g(x) for |x| < 2.
    double height_above_graph(Point p) const;

    std::vector<BoundarySample> boundary_samples(int n) const;

    /// Total boundary length (graph portion measured by quadrature).
    double boundary_length() const;

    friend DomainSpec build_g(double delta, int N);
    friend DomainSpec rebuild_g(double delta, int N, double bump_p, double shift_c,
                                double amp_a, double amp_b);

private:
    void build_tables();
    double int_m_to_half(double x) const;   ///< integral of m over [x, 1/2]
    double int_sm_to_half(double x) const;  ///< integral of s*m(s) over [x, 1/2]

    double delta_ = 0.0;
    double flat_level_ = 0.05;
    int match_order_ = 4; ///< tail polynomial degree (2N)
    double bump_p_ = 1.0;
    double shift_c_ = 0.8;
    double amp_a_ = 0.0;
    double amp_b_ = 0.0;

    // cumulative quadrature tables over [delta, 1/2] (positive side)
    std::vector<double> nodes_;
    std::vector<double> cum_m_;  ///< integral of m from nodes_[i] to 1/2
    std::vector<double> cum_sm_; ///< integral of s*m from nodes_[i] to 1/2
};

/// Build the blended domain. Throws ConstructionError when no bump shape in
/// the retry list yields m > 0 on the blend interval.
DomainSpec build_g(double delta, int N = 2);

/// Reassemble a domain around previously solved blend data.
DomainSpec rebuild_g(double delta, int N, double bump_p, double shift_c, double amp_a,
                     double amp_b);

/// C-infinity switch: 0 for t <= 0, 1 for t >= 1, strictly increasing between.
double smooth_switch(double t);
Series1 smooth_switch_series(const Series1& t);

/// C-infinity bump on (0,1), peak 1 at 1/2, all derivatives vanish at 0 and 1.
double smooth_bump(double t, double p);
Series1 smooth_bump_series(const Series1& t, double p);

} // namespace stefanlab
