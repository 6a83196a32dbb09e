#pragma once

// The radial seed field on the disk of radius 2 centered at (0,2): boundary
// Taylor data of q at r = 2 chosen so the first N compatibility conditions
// hold, a collar where the Taylor polynomial is the field, and a concave
// interior extension of the transform.

#include <vector>

#include "stefanlab/compat.hpp"
#include "stefanlab/extension.hpp"
#include "stefanlab/jet.hpp"
#include "stefanlab/taylor.hpp"

namespace stefanlab {

class ProfileBundle {
public:
    double alpha() const { return alpha_; }
    int order() const { return N_; }
    double collar_width() const { return collar_width_; }
    double c_lower() const { return c_lower_; }
    /// q(2), q'(2), ..., q^(2N+1)(2)
    const std::vector<double>& boundary_coeffs() const { return coeffs_; }

    /// Derivatives of q at radius r: exact polynomial on the collar,
    /// extension data inside (order <= 2 there).
    double eval_q(double r, int order = 0) const;

    /// Series of q around r0, valid while the expansion stays in the collar.
    Series1 q_series(double r0, int deg) const;

    /// Planar series of U(x, y) = q(r) around (x0, y0); the whole truncated
    /// expansion must stay inside the collar.
    Series2 U_series(double x0, double y0, int deg) const;
    DerivJet U_jet(double x0, double y0, int depth) const;

    /// Field value anywhere in the closed disk (collar or extension).
    double U_value(double x0, double y0) const;

    /// Transform-scale jet along the depth coordinate d = 2 - r (collar only).
    std::array<double, 3> w_depth_jet(double d) const;

    const ConcaveExtension1D& extension() const { return ext_; }

    friend ProfileBundle build_profile(double alpha, int N, double q1);
    friend ProfileBundle rebuild_profile(double alpha, int N, std::vector<double> coeffs,
                                         double collar_width, double c_lower);

/// Reassemble a bundle around previously solved boundary data (used when
/// loading persisted artifacts; residual checks then act on the stored data).
ProfileBundle rebuild_profile(double alpha, int N, std::vector<double> coeffs,
                              double collar_width, double c_lower);

private:
    double alpha_ = 0.0;
    int N_ = 1;
    double q1_ = -1.0;
    std::vector<double> coeffs_;
    double collar_width_ = 0.0;
    double c_lower_ = 0.0;
    ConcaveExtension1D ext_;
};

/// Build the bundle: q(2) = 0, q'(2) = q1, q''(2) from the first
/// compatibility condition, q^(2k)(2) for k = 2..N by an (exactly affine)
/// root solve on the k-th compatibility residual of the planar jet, odd
/// orders zero. Collar by halving search; concave radial extension attached.
ProfileBundle build_profile(double alpha, int N, double q1);

/// Reassemble a bundle around previously solved boundary data (used when
/// loading persisted artifacts; residual checks then act on the stored data).
ProfileBundle rebuild_profile(double alpha, int N, std::vector<double> coeffs,
                              double collar_width, double c_lower);

/// Lemma-style radial concavity test at radius r: transform first and second
/// derivatives both negative (log transform at alpha = 0).
bool check_radial_concavity(const ProfileBundle& bundle, double r, double alpha);

} // namespace stefanlab
