#pragma once

// Assembly of the counterexample initial field on the flattened domain: the
// boundary expansion sum_l (y - g)^l e_l + (y - g)^(2N+1) R with coefficient
// functions solved so the first N compatibility conditions hold on the whole
// boundary, the slope on the flat segment prescribed by the ODE solution, and
// a concave interior extension of the transform.

#include <memory>
#include <optional>
#include <vector>

#include "stefanlab/compat.hpp"
#include "stefanlab/extension.hpp"
#include "stefanlab/geometry.hpp"
#include "stefanlab/psi_ode.hpp"
#include "stefanlab/radial_profile.hpp"

namespace stefanlab {

/// Coefficient function on [-1, 1] with exact derivative access.
class CoeffFn {
public:
    virtual ~CoeffFn() = default;
    virtual Series1 series(double x0, int deg) const = 0;
    virtual double value(double x0) const { return series(x0, 0)[0]; }
};

/// E_l(x): the l-th expansion coefficient of the radial field above the
/// circle graph, by exact nested differentiation.
double extract_E(const ProfileBundle& bundle, int ell, double x);
Series1 extract_E_series(const ProfileBundle& bundle, int ell, double x0, int deg);

struct StripScanReport {
    bool ok = false;
    double a_xx = 0.0;   ///< fitted coefficient: first quantity <= -a (y-g)^2
    double a_det = 0.0;  ///< fitted coefficient: determinant >= a (y-g)^2
    double q2_max = -1e300; ///< max of the second quantity (must stay < 0)
    long long n_points = 0;
    Point worst{0, 0};
};

struct DatumParams {
    double alpha = 0.25;
    int N = 2;
    double q1 = -1.0;
    double delta = -1.0; ///< negative = choose automatically
    double psi_step = 1e-4;
};

/// Everything the construction solved, for persistence and tamper checks.
struct DatumFrozen {
    std::vector<double> profile_coeffs;
    double collar_width = 0.0;
    double c_lower = 0.0;
    double delta = 0.0;
    double bump_p = 0.0, shift_c = 0.0, amp_a = 0.0, amp_b = 0.0;
    double x_hi_pos = 0.0, x_hi_neg = 0.0;
    double eps0 = 0.0, eps_c = 0.0;
    double w_edge_min = 0.0;
    double ext_a = 0.0, ext_a1 = 0.0, ext_a2 = 0.0, ext_eps_m = 0.0;
    double fitted_a_xx = 0.0, fitted_a_det = 0.0, q2_max = 0.0;
    double plateau_value = 0.0;
};

class InitialDatum {
public:
    /// Full construction: profile, ODE, geometry, coefficients, collar search,
    /// interior extension. delta < 0 picks the automatic value, stepping down
    /// the search grid when the strip collar cannot satisfy the inequalities.
    static InitialDatum construct(const DatumParams& params);

    /// Rebuild evaluators around previously solved numbers (no root solves);
    /// residual checks then act on the stored data.
    static InitialDatum from_frozen(const DatumParams& params, const DatumFrozen& frozen);

    const DatumParams& params() const;
    const DatumFrozen& frozen() const;
    const DomainSpec& domain() const;
    const ProfileBundle& profile() const;
    const PsiSolution& psi() const;
    const ConcaveExtension2D& extension() const;

    const CoeffFn& coeff(int ell) const; ///< e_ell, ell = 1..2N
    const CoeffFn& f() const { return coeff(1); }
    const CoeffFn& h() const { return coeff(2); }

    /// Jet of the boundary-collar expansion (valid for |x| <= 1 and
    /// 0 <= y - g(x) within the working strip; |x| > 1 falls back to the
    /// radial field). Depth <= 2N+2.
    DerivJet collar_jet(double x, double y, int depth) const;
    double collar_value(double x, double y) const;

    /// Jet of the assembled field anywhere in the closed domain. Depth is
    /// capped at 2N+2 on the retained collar and 2 elsewhere.
    DerivJet jet(double x, double y, int depth) const;
    double value(double x, double y) const;

    /// True when the extension returns the collar field bit for bit.
    bool retained(Point p) const;

    /// The three strip inequalities scanned over {g < y < g + eps0}.
    StripScanReport scan_strip(int nx, int nlevels) const;

    /// max |compat residual of order k| over n boundary samples.
    double boundary_residual(int k, int n) const;

    double plateau() const;

    struct Impl;
    const Impl& impl() const { return *impl_; }

private:
    std::shared_ptr<const Impl> impl_;
};

} // namespace stefanlab
