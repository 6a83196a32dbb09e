#pragma once

// Concave interior extension of a boundary-collar field: truncate the concave
// transform at a level inside the collar, mollify with a compactly supported
// positive discrete kernel, and blend back to the exact field with a smooth
// weight driven by the transform value. Values in the retained collar are the
// exact collar values; the deep interior is an exact constant plateau.

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "stefanlab/geometry.hpp"

namespace stefanlab {

/// The concavity transform: w = v^alpha for alpha > 0, w = log v for alpha = 0.
struct PowerTransform {
    double alpha = 0.0;

    double to_w(double v) const;
    double from_w(double w) const;

    /// (v, v', v'') -> (w, w', w'') along one coordinate.
    std::array<double, 3> to_w_jet1(const std::array<double, 3>& v) const;
    std::array<double, 3> from_w_jet1(const std::array<double, 3>& w) const;

    /// depth-2 planar jets (v, vx, vy, vxx, vxy, vyy) in index order.
    std::array<double, 6> to_w_jet2(const std::array<double, 6>& v) const;
    std::array<double, 6> from_w_jet2(const std::array<double, 6>& w) const;
};

/// Multiply the underlying field value by lam, expressed on the transform
/// scale: v^alpha -> lam^alpha v^alpha, log v -> log v + log lam.
double scale_in_v(double w, double lam, double alpha);

/// Positive discrete mollifier on [-1, 1]: Gauss nodes weighted by a smooth
/// bump, normalized so the weights sum to exactly one (constants are
/// reproduced bit-exactly, and averaging preserves concavity).
struct MollifierKernel {
    std::vector<double> s;
    std::vector<double> A;
    static const MollifierKernel& standard(); ///< 64 nodes
};

/// Extension along one depth coordinate d >= 0 (distance into the domain);
/// the exact transform w(d) is available for d in [0, collar] and increases
/// in d there.
class ConcaveExtension1D {
public:
    /// w_jet(d) -> (w, w', w'') of the exact transform, valid on [0, collar].
    using WJet = std::function<std::array<double, 3>(double)>;

    static ConcaveExtension1D build(WJet w_jet, double collar, double level_fraction,
                                    double alpha);

    /// Transform-scale jet (F, F', F'') at depth d >= 0 (any depth).
    std::array<double, 3> F_jet(double d) const;
    double F_value(double d) const;

    bool retained(double d) const; ///< exact-collar region (blend weight 1)

    double plateau_w() const { return a_; }
    double a1() const { return a1_; }
    double a2() const { return a2_; }
    double mollifier_width() const { return eps_m_; }
    double depth_at_level(double w) const; ///< inverse of w(d) on the collar

private:
    std::array<double, 3> moll_jet(double d) const;
    double w_tilde(double d) const;

    WJet w_jet_;
    double collar_ = 0.0;
    double alpha_ = 0.0;
    double a_ = 0.0;  ///< truncation level (transform scale)
    double a1_ = 0.0; ///< blend weight 1 below this level
    double a2_ = 0.0; ///< blend weight 0 above this level
    double eps_m_ = 0.0;
    double d_a1_ = 0.0;
};

/// Planar variant on the domain Omega_0. The collar field callbacks supply
/// exact transform jets near the boundary; deeper points see the mollified
/// truncation, constant in the far interior.
class ConcaveExtension2D {
public:
    /// Exact depth-2 transform jet, or nullopt outside the collar region.
    using WJet2 = std::function<std::optional<std::array<double, 6>>(Point)>;
    /// True when the whole mollifier ball around p is surely on the plateau;
    /// lets far-interior points skip the kernel loop.
    using DeepTest = std::function<bool(Point)>;

    struct Params {
        double level_fraction = 0.8; ///< plateau level as a fraction of the
                                     ///< weakest collar-edge field value
        double alpha = 0.0;
    };

    static ConcaveExtension2D build(WJet2 w_jet, double w_edge_min, double grad_bound,
                                    Params params);

    void set_deep_test(DeepTest t) { deep_ = std::move(t); }

    std::array<double, 6> F_jet(Point p) const;
    double F_value(Point p) const;

    /// True when the blend weight is exactly 1 (the extension equals the
    /// collar field bit for bit).
    bool retained(Point p) const;

    double plateau_w() const { return a_; }
    double a1() const { return a1_; }
    double a2() const { return a2_; }
    double mollifier_width() const { return eps_m_; }
    void set_mollifier_width(double e) { eps_m_ = e; }

private:
    double w_tilde(Point p) const;
    std::array<double, 6> moll_jet(Point p) const;

    WJet2 w_jet_;
    DeepTest deep_;
    double alpha_ = 0.0;
    double a_ = 0.0;
    double a1_ = 0.0;
    double a2_ = 0.0;
    double eps_m_ = 0.0;
};

} // namespace stefanlab
