#include "stefanlab/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "stefanlab/errors.hpp"

namespace stefanlab {

namespace {

// 16-point Gauss-Legendre nodes on [0, 1].
struct GaussNodes {
    std::array<double, 16> s;
    std::array<double, 16> w;
};

const GaussNodes& gauss01() {
    static const GaussNodes g = [] {
        // abscissas/weights on [-1, 1], mapped to [0, 1]
        const double x[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                             0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                             0.9445750230732326, 0.9894009349916499};
        const double w[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                             0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                             0.0622535239386479, 0.0271524594117541};
        GaussNodes g;
        for (int i = 0; i < 8; ++i) {
            g.s[static_cast<size_t>(2 * i)] = 0.5 * (1.0 + x[i]);
            g.s[static_cast<size_t>(2 * i + 1)] = 0.5 * (1.0 - x[i]);
            g.w[static_cast<size_t>(2 * i)] = 0.5 * w[i];
            g.w[static_cast<size_t>(2 * i + 1)] = 0.5 * w[i];
        }
        return g;
    }();
    return g;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// W(xt, yt) = U(x0 + xt, G(x0 + xt) + yt): the expansion generator above the
// circle graph. Uses r^2 = 4 + yt^2 - 2 yt sqrt(4 - x^2).
Series2 graph_frame_series(const ProfileBundle& bundle, double x0, int deg) {
    Series1 x = Series1::variable(deg, x0);
    Series1 wroot = series_sqrt(-(x * x) + 4.0);
    Series2 wl = Series2::from_x(wroot, deg);
    Series2 yt = Series2::variable_y(deg, 0.0);
    Series2 r2 = yt * yt - 2.0 * (yt * wl) + 4.0;
    Series2 r = series_sqrt(r2);
    // q-derivative list at r = 2 is exactly the stored boundary data
    std::vector<double> qd(bundle.boundary_coeffs());
    qd.resize(static_cast<size_t>(deg) + 1, 0.0);
    return compose_analytic(r, qd);
}

} // namespace

Series1 extract_E_series(const ProfileBundle& bundle, int ell, double x0, int deg) {
    if (!(std::abs(x0) <= 1.0)) throw RegionError("expansion coefficients live on [-1, 1]");
    if (ell < 1) throw ValidationError("expansion index must be >= 1");
    Series2 W = graph_frame_series(bundle, x0, deg + ell);
    Series1 out(deg, 0.0);
    for (int i = 0; i <= deg; ++i) out[i] = W.at(i, ell);
    return out;
}

double extract_E(const ProfileBundle& bundle, int ell, double x) {
    return extract_E_series(bundle, ell, x, 0)[0];
}

// ---------------------------------------------------------------------------
// Coefficient functions

namespace {

// e1 = f: the ODE solution on the flat segment, the first expansion
// coefficient of the radial field on the outer region, a smooth convex
// combination on the gaps.
class FBlend final : public CoeffFn {
public:
    FBlend(const PsiSolution* psi, double q1, double two_delta, double x_hi_pos,
           double x_hi_neg)
        : psi_(psi), q1_(q1), td_(two_delta), hi_pos_(x_hi_pos), hi_neg_(x_hi_neg) {}

    Series1 series(double x0, int deg) const override {
        const double ax = std::abs(x0);
        if (ax <= td_) return psi_->series(x0, deg);
        const double hi = x0 > 0 ? hi_pos_ : hi_neg_;
        const double tau = (ax - td_) / (hi - td_);
        if (tau >= 1.0) return E1_series(x0, deg);
        // S-series of the transition weight in x
        Series1 x = Series1::variable(deg, x0);
        Series1 taus = ((x0 > 0 ? x : -x) - td_) * (1.0 / (hi - td_));
        Series1 S = smooth_switch_series(taus);
        return (-S + 1.0) * psi_->series(x0, deg) + S * E1_series(x0, deg);
    }

    double value(double x0) const override {
        const double ax = std::abs(x0);
        if (ax <= td_) return psi_->value(x0);
        const double hi = x0 > 0 ? hi_pos_ : hi_neg_;
        const double tau = (ax - td_) / (hi - td_);
        if (tau >= 1.0) return -q1_ * std::sqrt(4.0 - x0 * x0) / 2.0;
        const double S = smooth_switch(tau);
        return (1.0 - S) * psi_->value(x0) + S * (-q1_ * std::sqrt(4.0 - x0 * x0) / 2.0);
    }

private:
    Series1 E1_series(double x0, int deg) const {
        // E1(x) = -q'(2) sqrt(4 - x^2) / 2
        Series1 x = Series1::variable(deg, x0);
        return series_sqrt(-(x * x) + 4.0) * (-q1_ / 2.0);
    }

    const PsiSolution* psi_;
    double q1_;
    double td_, hi_pos_, hi_neg_;
};

// e2 = h from the first compatibility condition on the graph:
//   h = ((g')^2 f^2 + f^2 + g'' f + 2 g' f') / (2 (1 + (g')^2)).
class HFormula final : public CoeffFn {
public:
    HFormula(const DomainSpec* dom, const CoeffFn* f) : dom_(dom), f_(f) {}

    Series1 series(double x0, int deg) const override {
        Series1 g = dom_->g_series(x0, deg + 2);
        Series1 gp = g.derivative();
        Series1 gpp = gp.derivative();
        Series1 f = f_->series(x0, deg + 1);
        Series1 fp = f.derivative();
        Series1 G1 = gp.truncated(deg), G2 = gpp.truncated(deg);
        Series1 F0 = f.truncated(deg), F1 = fp.truncated(deg);
        Series1 num = G1 * G1 * F0 * F0 + F0 * F0 + G2 * F0 + 2.0 * (G1 * F1);
        Series1 den = (G1 * G1 + 1.0) * 2.0;
        return num * series_recip(den);
    }

private:
    const DomainSpec* dom_;
    const CoeffFn* f_;
};

// Odd coefficients keep the radial values: e_(2k+1) = E_(2k+1).
class EClosed final : public CoeffFn {
public:
    EClosed(const ProfileBundle* bundle, int ell) : bundle_(bundle), ell_(ell) {}
    Series1 series(double x0, int deg) const override {
        return extract_E_series(*bundle_, ell_, x0, deg);
    }

private:
    const ProfileBundle* bundle_;
    int ell_;
};

} // namespace

// ---------------------------------------------------------------------------
// Impl

struct InitialDatum::Impl {
    DatumParams params;
    DatumFrozen fr;
    ProfileBundle bundle;
    PsiSolution psi;
    DomainSpec domain;
    std::vector<std::unique_ptr<CoeffFn>> e; // e[l-1] is e_l, l = 1..2N
    ConcaveExtension2D ext;
    std::vector<CompatOperator> ops; // ops[k-1], k = 1..N
    double d_a_circle = 0.0;         ///< circle depth of the truncation level

    int expansion_len() const { return 2 * params.N; }

    // ---- strip field -------------------------------------------------------

    Series1 e_series(int ell, double x0, int deg) const {
        return e[static_cast<size_t>(ell - 1)]->series(x0, deg);
    }

    // remainder of the radial field above the circle graph, integral form
    Series2 remainder_series(double x0, double y0, int deg) const {
        const int twoN = expansion_len();
        const auto& gn = gauss01();
        const double G0 = eval_G(x0, 0);
        Series1 Gx = G_series(x0, deg);
        Series2 Gl = Series2::from_x(Gx, deg);
        Series2 yt = Series2::variable_y(deg, 0.0);
        Series2 out(deg, 0.0);
        const double inv_fact = 1.0 / factorial(twoN);
        for (int i = 0; i < 16; ++i) {
            const double si = gn.s[static_cast<size_t>(i)];
            const double Yi = G0 + si * (y0 - G0);
            // Phi = (2N+1)-th y-derivative of the radial field at (x0, Yi)
            Series2 U = bundle.U_series(x0, Yi, deg + twoN + 1);
            for (int m = 0; m < twoN + 1; ++m) U = U.dy();
            // argument shift: (1 - s)(G(x) - G(x0)) + s (y - y0)
            Series2 B = (Gl + Series2::constant(deg, -G0)) * (1.0 - si) + yt * si;
            out = out + U.substitute_y2(B) *
                            (gn.w[static_cast<size_t>(i)] * std::pow(1.0 - si, twoN) * inv_fact);
        }
        return out;
    }

    // cached per-x pieces for the scalar value path
    struct XCache {
        double g = 0.0, G0 = 0.0;
        std::vector<double> evals;    // e_l(x)
        std::vector<double> phi;      // y-series of the (2N+1)-th derivative
    };

    const XCache& x_cache(double x) const {
        struct TL {
            const void* owner = nullptr;
            std::unordered_map<double, XCache> m;
        };
        static thread_local TL tl;
        if (tl.owner != this) {
            tl.owner = this;
            tl.m.clear();
        }
        auto it = tl.m.find(x);
        if (it != tl.m.end()) return it->second;
        if (tl.m.size() > 200000) tl.m.clear();
        XCache c;
        c.g = domain.eval_g(x);
        c.G0 = eval_G(x, 0);
        const int twoN = expansion_len();
        c.evals.resize(static_cast<size_t>(twoN));
        for (int l = 1; l <= twoN; ++l)
            c.evals[static_cast<size_t>(l - 1)] = e[static_cast<size_t>(l - 1)]->value(x);
        // phi: series in yt of the (2N+1)-th y-derivative of U(x, G(x) + yt)
        const int K = twoN + 1 + 10;
        const double wroot = std::sqrt(4.0 - x * x);
        Series1 yt = Series1::variable(K, 0.0);
        Series1 r2 = yt * yt - yt * (2.0 * wroot) + 4.0;
        Series1 r = series_sqrt(r2);
        std::vector<double> qd(bundle.boundary_coeffs());
        qd.resize(static_cast<size_t>(K) + 1, 0.0);
        Series1 Us = compose_analytic(r, qd);
        c.phi.resize(11);
        for (int j = 0; j <= 10; ++j) {
            // coefficient of yt^j in the (2N+1)-th derivative
            double fact = 1.0;
            for (int i = 0; i < twoN + 1; ++i) fact *= (j + twoN + 1 - i);
            c.phi[static_cast<size_t>(j)] = Us[j + twoN + 1] * fact;
        }
        return tl.m.emplace(x, std::move(c)).first->second;
    }

    double remainder_value(double x, double y) const {
        const auto& c = x_cache(x);
        const int twoN = expansion_len();
        const auto& gn = gauss01();
        const double dy = y - c.G0;
        double acc = 0.0;
        for (int i = 0; i < 16; ++i) {
            const double si = gn.s[static_cast<size_t>(i)];
            const double yt = si * dy;
            double phi = 0.0;
            for (int j = 10; j >= 0; --j) phi = phi * yt + c.phi[static_cast<size_t>(j)];
            acc += gn.w[static_cast<size_t>(i)] * std::pow(1.0 - si, twoN) * phi;
        }
        return acc / factorial(twoN);
    }

    double strip_value(double x, double y) const {
        const auto& c = x_cache(x);
        const double t = y - c.g;
        const int twoN = expansion_len();
        double acc = 0.0, tp = 1.0;
        for (int l = 1; l <= twoN; ++l) {
            tp *= t;
            acc += tp * c.evals[static_cast<size_t>(l - 1)];
        }
        tp *= t;
        return acc + tp * remainder_value(x, y);
    }

    // full bivariate series of the strip field
    Series2 v_series(double x0, double y0, int deg) const {
        const int twoN = expansion_len();
        Series1 g = domain.g_series(x0, deg);
        Series2 t = Series2::variable_y(deg, y0) - Series2::from_x(g, deg);
        Series2 acc(deg, 0.0);
        Series2 tp(deg, 1.0);
        for (int l = 1; l <= twoN; ++l) {
            tp = tp * t;
            acc = acc + tp * Series2::from_x(e_series(l, x0, deg), deg);
        }
        tp = tp * t;
        return acc + tp * remainder_series(x0, y0, deg);
    }

    DerivJet strip_jet(double x, double y, int depth) const {
        if (depth > 2 * params.N + 2)
            throw DepthError("strip jets support depth <= 2N+2");
        if (!(std::abs(x) <= 1.0 + 1e-12))
            throw RegionError("strip expansion needs |x| <= 1");
        return DerivJet::from_series(v_series(x, y, depth));
    }

    // ---- regions -----------------------------------------------------------

    // exact-field (collar) classification; s/rho are depth proxies
    bool in_strip(double x, double s) const {
        return std::abs(x) <= 1.0 && s >= -1e-12 && s <= fr.eps0 * (1.0 + 1e-12);
    }

    bool in_circle(double x, double y, double rho) const {
        // excluded: the lower sector whose circle arc was replaced by the graph
        if (!(rho >= -1e-12 && rho <= fr.eps_c)) return false;
        return !(y < 2.0 && std::abs(x) < 0.5);
    }

    std::optional<std::array<double, 6>> w_jet2(Point p) const {
        const double rho = 2.0 - std::hypot(p.x, p.y - 2.0);
        PowerTransform T{params.alpha};
        if (in_circle(p.x, p.y, rho)) {
            DerivJet j = bundle.U_jet(p.x, p.y, 2);
            return T.to_w_jet2({j.value(), j.at(1, 0), j.at(0, 1), j.at(2, 0), j.at(1, 1),
                                j.at(0, 2)});
        }
        if (std::abs(p.x) <= 1.0) {
            const double s = p.y - domain.eval_g(p.x);
            if (in_strip(p.x, s)) {
                DerivJet j = strip_jet(p.x, p.y, 2);
                return T.to_w_jet2({j.value(), j.at(1, 0), j.at(0, 1), j.at(2, 0),
                                    j.at(1, 1), j.at(0, 2)});
            }
        }
        return std::nullopt;
    }

    bool deep(Point p) const {
        const double buffer = 2.0 * ext.mollifier_width() + 1e-6;
        const double rho = 2.0 - std::hypot(p.x, p.y - 2.0);
        if (rho <= d_a_circle + buffer) return false;
        if (std::abs(p.x) <= 1.0 && p.y < 1.5) {
            const double s = p.y - domain.eval_g(p.x);
            if (s <= fr.eps0 + buffer) return false;
        }
        return true;
    }

    DerivJet full_jet(double x, double y, int depth) const {
        const double r = std::hypot(x, y - 2.0);
        const double rho = 2.0 - r;
        if (rho < -1e-9) throw RegionError("point outside the closed domain");
        PowerTransform T{params.alpha};

        const double s = (std::abs(x) < 2.0) ? y - domain.eval_g(x) : 1e300;
        if (std::abs(x) < 2.0 && s < -1e-9 && rho > 1e-9)
            throw RegionError("point below the graph");

        if (in_circle(x, y, rho)) {
            const double v = bundle.q_series(std::max(r, 0.0), 0)[0];
            if (v <= 0.0 || T.to_w(v) <= ext.a1()) return bundle.U_jet(x, y, depth);
        }
        if (std::abs(x) <= 1.0 && in_strip(x, s)) {
            const double v = strip_value(x, y);
            if (v <= 0.0 || T.to_w(v) <= ext.a1()) return strip_jet(x, y, depth);
        }
        // extension region
        if (depth > 2) throw DepthError("extension region provides depth <= 2 only");
        const auto F = ext.F_jet({x, y});
        const auto vj = T.from_w_jet2(F);
        DerivJet j(depth);
        j.set(0, 0, vj[0]);
        if (depth >= 1) {
            j.set(1, 0, vj[1]);
            j.set(0, 1, vj[2]);
        }
        if (depth >= 2) {
            j.set(2, 0, vj[3]);
            j.set(1, 1, vj[4]);
            j.set(0, 2, vj[5]);
        }
        return j;
    }

    double full_value(double x, double y) const {
        const double r = std::hypot(x, y - 2.0);
        const double rho = 2.0 - r;
        if (rho < -1e-9) throw RegionError("point outside the closed domain");
        PowerTransform T{params.alpha};
        if (deep({x, y})) return T.from_w(ext.plateau_w());
        if (in_circle(x, y, rho)) {
            const double v = bundle.q_series(std::max(r, 0.0), 0)[0];
            if (v <= 0.0 || T.to_w(v) <= ext.a1()) return v;
        }
        if (std::abs(x) <= 1.0) {
            const double s = y - domain.eval_g(x);
            if (in_strip(x, s)) {
                const double v = strip_value(x, y);
                if (v <= 0.0 || T.to_w(v) <= ext.a1()) return v;
            }
        }
        return T.from_w(ext.F_value({x, y}));
    }
};

// ---------------------------------------------------------------------------
// Solved even coefficients (needs Impl)

namespace {

// e_(2k), k >= 2: the k-th compatibility residual along the graph is affine
// in the value e_(2k)(x) (the coefficient enters only through the leading
// Laplacian power), so the coefficient function is -A/B with A, B evaluated
// as exact series from constant probes. Outside [-1/2, 1/2] the radial
// coefficient is used directly.
class SolvedEven final : public CoeffFn {
public:
    SolvedEven(const InitialDatum::Impl* impl, int k) : impl_(impl), k_(k) {}

    Series1 series(double x0, int deg) const override {
        if (std::abs(x0) > 0.5)
            return extract_E_series(impl_->bundle, 2 * k_, x0, deg);
        const int D = deg + 2 * k_;
        Series1 g = impl_->domain.g_series(x0, D);
        Series1 gsh = g;
        gsh[0] = 0.0;
        const double y0 = g[0];

        // known part: e_l for l < 2k (terms of order >= 2k+1 cannot touch an
        // order-2k residual on the curve where t vanishes identically)
        Series2 t = Series2::variable_y(D, y0) - Series2::from_x(g, D);
        Series2 V0(D, 0.0);
        Series2 tp(D, 1.0);
        for (int l = 1; l < 2 * k_; ++l) {
            tp = tp * t;
            V0 = V0 + tp * Series2::from_x(impl_->e_series(l, x0, D), D);
        }
        tp = tp * t; // t^(2k), the probe direction

        const auto& op = impl_->ops[static_cast<size_t>(k_ - 1)];
        Series1 A = residual_series(op, V0, gsh, deg);
        Series1 AB = residual_series(op, V0 + tp, gsh, deg);
        Series1 B = AB - A;
        if (std::abs(B[0]) < 1e-6)
            throw ConstructionError("even-coefficient solve: insensitive residual");
        return -A * series_recip(B);
    }

private:
    static Series1 residual_series(const CompatOperator& op, const Series2& V,
                                   const Series1& gsh, int deg) {
        // jet components along the boundary curve as series in x
        std::map<std::pair<int, int>, Series1> comp;
        Series1 out(deg, 0.0);
        for (const auto& term : op.terms()) {
            Series1 prod(deg, term.coeff.to_double());
            for (const auto& sym : term.factors) {
                auto key = std::make_pair(sym.dx, sym.dy);
                auto it = comp.find(key);
                if (it == comp.end()) {
                    Series2 d = V;
                    for (int i = 0; i < sym.dx; ++i) d = d.dx();
                    for (int j = 0; j < sym.dy; ++j) d = d.dy();
                    Series1 restricted = d.truncated(deg).substitute_y(gsh.truncated(deg));
                    it = comp.emplace(key, restricted).first;
                }
                prod = prod * it->second;
            }
            out = out + prod;
        }
        return out;
    }

    const InitialDatum::Impl* impl_;
    int k_;
};

} // namespace

// ---------------------------------------------------------------------------
// InitialDatum surface

const DatumParams& InitialDatum::params() const { return impl_->params; }
const DatumFrozen& InitialDatum::frozen() const { return impl_->fr; }
const DomainSpec& InitialDatum::domain() const { return impl_->domain; }
const ProfileBundle& InitialDatum::profile() const { return impl_->bundle; }
const PsiSolution& InitialDatum::psi() const { return impl_->psi; }
const ConcaveExtension2D& InitialDatum::extension() const { return impl_->ext; }

const CoeffFn& InitialDatum::coeff(int ell) const {
    if (ell < 1 || ell > impl_->expansion_len())
        throw ValidationError("coefficient index out of range");
    return *impl_->e[static_cast<size_t>(ell - 1)];
}

DerivJet InitialDatum::collar_jet(double x, double y, int depth) const {
    if (std::abs(x) > 1.0) return impl_->bundle.U_jet(x, y, depth);
    return impl_->strip_jet(x, y, depth);
}

double InitialDatum::collar_value(double x, double y) const {
    if (std::abs(x) > 1.0) return impl_->bundle.U_value(x, y);
    return impl_->strip_value(x, y);
}

DerivJet InitialDatum::jet(double x, double y, int depth) const {
    return impl_->full_jet(x, y, depth);
}

double InitialDatum::value(double x, double y) const { return impl_->full_value(x, y); }

bool InitialDatum::retained(Point p) const {
    const auto wj = impl_->w_jet2(p);
    return wj && (*wj)[0] <= impl_->ext.a1();
}

double InitialDatum::plateau() const {
    PowerTransform T{impl_->params.alpha};
    return T.from_w(impl_->ext.plateau_w());
}

double InitialDatum::boundary_residual(int k, int n) const {
    const auto samples = impl_->domain.boundary_samples(n);
    const auto op = derive_compat_operator(k);
    double worst = 0.0;
    for (const auto& s : samples) {
        const bool graph = std::abs(s.p.x) <= 1.0 &&
                           std::abs(s.p.y - impl_->domain.eval_g(s.p.x)) < 1e-9;
        DerivJet j = graph ? impl_->strip_jet(s.p.x, s.p.y, 2 * k)
                           : impl_->bundle.U_jet(s.p.x, s.p.y, 2 * k);
        worst = std::max(worst, std::abs(op.evaluate(j)));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Strip inequality scan and construction

namespace {

// The three strip quantities at one point from a depth-2 jet.
struct StripQ {
    double q1, q2, q3;
};

StripQ strip_quantities(const DerivJet& j, double alpha) {
    const double v = j.value();
    const double vx = j.at(1, 0), vy = j.at(0, 1);
    const double vxx = j.at(2, 0), vxy = j.at(1, 1), vyy = j.at(0, 2);
    const double m11 = v * vxx - (1 - alpha) * vx * vx;
    const double m22 = v * vyy - (1 - alpha) * vy * vy;
    const double m12 = v * vxy - (1 - alpha) * vx * vy;
    return {m11, m22, m11 * m22 - m12 * m12};
}

StripScanReport scan_strip_impl(const InitialDatum::Impl& im, double eps0, int nx,
                                int nlevels) {
    StripScanReport rep;
    rep.a_xx = 1e300;
    rep.a_det = 1e300;
    rep.q2_max = -1e300;
    bool sign_ok = true;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i <= nx; ++i) {
        const double x = -1.0 + 2.0 * i / nx;
        StripScanReport local;
        local.a_xx = 1e300;
        local.a_det = 1e300;
        local.q2_max = -1e300;
        bool local_ok = true;
        for (int jl = 1; jl <= nlevels; ++jl) {
            const double s = eps0 * jl / nlevels;
            const double y = im.domain.eval_g(x) + s;
            DerivJet jet = im.strip_jet(x, y, 2);
            const StripQ q = strip_quantities(jet, im.params.alpha);
            if (!(q.q1 < 0.0) || !(q.q2 < 0.0) || !(q.q3 > 0.0)) local_ok = false;
            local.a_xx = std::min(local.a_xx, -q.q1 / (s * s));
            local.a_det = std::min(local.a_det, q.q3 / (s * s));
            if (q.q2 > local.q2_max) {
                local.q2_max = q.q2;
                local.worst = {x, y};
            }
            ++local.n_points;
        }
#pragma omp critical
        {
            sign_ok = sign_ok && local_ok;
            rep.a_xx = std::min(rep.a_xx, local.a_xx);
            rep.a_det = std::min(rep.a_det, local.a_det);
            if (local.q2_max > rep.q2_max) {
                rep.q2_max = local.q2_max;
                rep.worst = local.worst;
            }
            rep.n_points += local.n_points;
        }
    }
    rep.ok = sign_ok && rep.a_xx > 1e-8 && rep.a_det > 1e-8 && rep.q2_max < -1e-8;
    return rep;
}

std::shared_ptr<InitialDatum::Impl> assemble(const DatumParams& params, double delta,
                                             const DatumFrozen* stored) {
    auto im = std::make_shared<InitialDatum::Impl>();
    im->params = params;
    im->fr.delta = delta;

    if (stored) {
        im->bundle = rebuild_profile(params.alpha, params.N, stored->profile_coeffs,
                                     stored->collar_width, stored->c_lower);
        im->domain = rebuild_g(delta, params.N, stored->bump_p, stored->shift_c,
                               stored->amp_a, stored->amp_b);
    } else {
        im->bundle = build_profile(params.alpha, params.N, params.q1);
        im->domain = build_g(delta, params.N);
    }
    im->fr.profile_coeffs = im->bundle.boundary_coeffs();
    im->fr.collar_width = im->bundle.collar_width();
    im->fr.c_lower = im->bundle.c_lower();
    im->fr.bump_p = im->domain.bump_exponent();
    im->fr.shift_c = im->domain.bump_shift();
    im->fr.amp_a = im->domain.amp_a();
    im->fr.amp_b = im->domain.amp_b();

    im->psi = solve_psi(params.alpha, delta, params.psi_step, 0.58);

    for (int k = 1; k <= params.N; ++k) im->ops.push_back(derive_compat_operator(k));

    // blend endpoints for the slope coefficient: the positive branch of the
    // ODE solution grows and reaches 1/2; the negative branch may approach
    // zero first, so its blend must complete earlier
    double x_hi_pos, x_hi_neg;
    if (stored) {
        x_hi_pos = stored->x_hi_pos;
        x_hi_neg = stored->x_hi_neg;
    } else {
        x_hi_pos = 0.5;
        x_hi_neg = std::min(0.5, im->psi.left_reach(0.12) - 0.01);
        if (x_hi_neg <= 2 * delta + 0.012) {
            std::ostringstream os;
            os << "slope blend window empty on the negative side: reach "
               << im->psi.left_reach(0.12) << " vs 2 delta = " << 2 * delta;
            throw ConstructionError(os.str());
        }
    }
    im->fr.x_hi_pos = x_hi_pos;
    im->fr.x_hi_neg = x_hi_neg;

    // coefficient functions
    im->e.push_back(std::make_unique<FBlend>(&im->psi, params.q1, 2 * delta, x_hi_pos,
                                             x_hi_neg));
    im->e.push_back(std::make_unique<HFormula>(&im->domain, im->e[0].get()));
    for (int k = 2; k <= params.N; ++k) {
        im->e.push_back(std::make_unique<EClosed>(&im->bundle, 2 * k - 1));
        im->e.push_back(std::make_unique<SolvedEven>(im.get(), k));
    }

    // positivity of the slope coefficient
    {
        double fmin = 1e300;
        for (int i = 0; i <= 2000; ++i) {
            const double x = -1.0 + 2.0 * i / 2000.0;
            fmin = std::min(fmin, im->e[0]->value(x));
        }
        if (!(fmin >= im->bundle.c_lower())) {
            std::ostringstream os;
            os << "slope blend dips to " << fmin << " below the lower bound "
               << im->bundle.c_lower();
            throw ConstructionError(os.str());
        }
    }

    // strip collar: halving search until the three inequalities hold
    double eps0;
    if (stored) {
        eps0 = stored->eps0;
        im->fr.eps0 = eps0;
        StripScanReport rep = scan_strip_impl(*im, eps0, 256, 8);
        im->fr.fitted_a_xx = rep.a_xx;
        im->fr.fitted_a_det = rep.a_det;
        im->fr.q2_max = rep.q2_max;
    } else {
        eps0 = 0.25;
        for (;; eps0 *= 0.5) {
            if (eps0 < 1e-3)
                throw ConstructionError("strip collar shrank below 1e-3");
            im->fr.eps0 = eps0;
            StripScanReport rep = scan_strip_impl(*im, eps0, 256, 8);
            if (rep.ok) {
                im->fr.fitted_a_xx = rep.a_xx;
                im->fr.fitted_a_det = rep.a_det;
                im->fr.q2_max = rep.q2_max;
                break;
            }
        }
    }
    im->fr.eps_c = stored ? stored->eps_c : std::min(im->bundle.collar_width(), 0.45);

    // weakest exact-field value along the collar inner edge
    double w_edge_min;
    PowerTransform T{params.alpha};
    {
        double vmin = 1e300;
        for (int i = 0; i <= 500; ++i) {
            const double x = -1.0 + 2.0 * i / 500.0;
            vmin = std::min(vmin, im->strip_value(x, im->domain.eval_g(x) + eps0));
        }
        vmin = std::min(vmin, im->bundle.q_series(2.0 - im->fr.eps_c, 0)[0]);
        w_edge_min = T.to_w(vmin);
    }
    im->fr.w_edge_min = w_edge_min;

    // interior extension of the transform
    const double grad_bound = [&] {
        double m = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double x = -1.0 + 2.0 * i / 200.0;
            m = std::max(m, std::abs(im->e[0]->value(x)));
        }
        return 2.0 * std::max(m, std::abs(params.q1));
    }();
    ConcaveExtension2D::Params ep;
    ep.alpha = params.alpha;
    ep.level_fraction = 0.8;
    const InitialDatum::Impl* raw = im.get();
    im->ext = ConcaveExtension2D::build(
        [raw](Point p) { return raw->w_jet2(p); }, w_edge_min, grad_bound, ep);
    if (stored) im->ext.set_mollifier_width(stored->ext_eps_m);
    im->ext.set_deep_test([raw](Point p) { return raw->deep(p); });

    // circle depth of the truncation level, for the deep test
    {
        const double v_a = T.from_w(im->ext.plateau_w());
        double lo = 0.0, hi = im->fr.eps_c;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (im->bundle.q_series(2.0 - mid, 0)[0] < v_a ? lo : hi) = mid;
        }
        im->d_a_circle = hi;
    }

    // mollifier width: halve until the blend band stays concave at probes
    if (!stored) {
        for (int tries = 0;; ++tries) {
            if (tries > 30 || im->ext.mollifier_width() < 1e-9)
                throw ConstructionError("extension: no mollifier width keeps the blend concave");
            bool ok = true;
            const double a1 = im->ext.a1(), a2 = im->ext.a2();
            const double h = std::max(2e-5, im->ext.mollifier_width() * 0.5);
            for (int i = 0; i <= 40 && ok; ++i) {
                const double x = -0.96 + 1.92 * i / 40.0;
                // probe at the mid-blend level above the graph
                const double target = T.from_w(0.5 * (a1 + a2));
                const double f0 = im->e[0]->value(x);
                const double sa = target / std::max(f0, 1e-9);
                const double y = im->domain.eval_g(x) + std::min(sa, im->fr.eps0 * 0.9);
                for (auto [dx, dy] : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0},
                                      std::pair{0.7071, 0.7071}}) {
                    const double Fp = im->ext.F_value({x + h * dx, y + h * dy});
                    const double Fm = im->ext.F_value({x - h * dx, y - h * dy});
                    const double Fc = im->ext.F_value({x, y});
                    if (Fp + Fm - 2 * Fc > 1e-11 * std::max(1.0, std::abs(Fc))) ok = false;
                }
            }
            if (ok) break;
            im->ext.set_mollifier_width(im->ext.mollifier_width() * 0.5);
        }
    }
    im->fr.ext_a = im->ext.plateau_w();
    im->fr.ext_a1 = im->ext.a1();
    im->fr.ext_a2 = im->ext.a2();
    im->fr.ext_eps_m = im->ext.mollifier_width();
    im->fr.plateau_value = T.from_w(im->ext.plateau_w());
    return im;
}

} // namespace

InitialDatum InitialDatum::construct(const DatumParams& params) {
    if (!(params.alpha >= 0.0 && params.alpha < 0.5))
        throw ValidationError("alpha must be in [0, 1/2)");
    if (params.N < 1) throw ValidationError("N must be >= 1");
    if (!(params.q1 < 0.0)) throw ValidationError("q1 must be negative");

    std::vector<double> deltas;
    if (params.delta > 0.0) {
        if (!(params.delta < 0.25)) throw ValidationError("delta must be in (0, 1/4)");
        deltas.push_back(params.delta);
    } else {
        const double top = choose_delta(params.alpha, params.psi_step);
        for (double d = top; d >= 0.019; d -= 0.02) deltas.push_back(d);
    }

    std::string last_error;
    for (double delta : deltas) {
        try {
            InitialDatum datum;
            datum.impl_ = assemble(params, delta, nullptr);
            // closure checks on the assembled field
            for (int k = 1; k <= params.N; ++k) {
                const double res = datum.boundary_residual(k, 64);
                if (!(res < 1e-8)) {
                    std::ostringstream os;
                    os << "compat residual k=" << k << " is " << res << " after assembly";
                    throw ConstructionError(os.str());
                }
            }
            return datum;
        } catch (const ConstructionError& err) {
            last_error = err.what();
            if (params.delta > 0.0) throw;
        }
    }
    throw ConstructionError("construction failed for every delta candidate; last: " +
                            last_error);
}

InitialDatum InitialDatum::from_frozen(const DatumParams& params, const DatumFrozen& fr) {
    InitialDatum datum;
    datum.impl_ = assemble(params, fr.delta, &fr);
    return datum;
}

StripScanReport InitialDatum::scan_strip(int nx, int nlevels) const {
    return scan_strip_impl(*impl_, impl_->fr.eps0, nx, nlevels);
}

} // namespace stefanlab
