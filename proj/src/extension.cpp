#include "stefanlab/extension.hpp"

#include <algorithm>
#include <cmath>

#include "stefanlab/errors.hpp"

namespace stefanlab {

// ---------------------------------------------------------------------------
// PowerTransform

double PowerTransform::to_w(double v) const {
    return alpha == 0.0 ? std::log(v) : std::pow(v, alpha);
}

double PowerTransform::from_w(double w) const {
    return alpha == 0.0 ? std::exp(w) : std::pow(w, 1.0 / alpha);
}

std::array<double, 3> PowerTransform::to_w_jet1(const std::array<double, 3>& v) const {
    const double val = v[0], d1 = v[1], d2 = v[2];
    if (alpha == 0.0) {
        return {std::log(val), d1 / val, (d2 * val - d1 * d1) / (val * val)};
    }
    const double w = std::pow(val, alpha);
    const double w1 = alpha * std::pow(val, alpha - 1.0) * d1;
    const double w2 = alpha * (alpha - 1.0) * std::pow(val, alpha - 2.0) * d1 * d1 +
                      alpha * std::pow(val, alpha - 1.0) * d2;
    return {w, w1, w2};
}

std::array<double, 3> PowerTransform::from_w_jet1(const std::array<double, 3>& w) const {
    const double val = w[0], d1 = w[1], d2 = w[2];
    if (alpha == 0.0) {
        const double v = std::exp(val);
        return {v, v * d1, v * (d2 + d1 * d1)};
    }
    const double p = 1.0 / alpha;
    const double v = std::pow(val, p);
    const double v1 = p * std::pow(val, p - 1.0) * d1;
    const double v2 = p * (p - 1.0) * std::pow(val, p - 2.0) * d1 * d1 +
                      p * std::pow(val, p - 1.0) * d2;
    return {v, v1, v2};
}

std::array<double, 6> PowerTransform::to_w_jet2(const std::array<double, 6>& v) const {
    const double val = v[0], vx = v[1], vy = v[2], vxx = v[3], vxy = v[4], vyy = v[5];
    if (alpha == 0.0) {
        const double iv = 1.0 / val;
        return {std::log(val), vx * iv, vy * iv,
                (vxx * val - vx * vx) * iv * iv,
                (vxy * val - vx * vy) * iv * iv,
                (vyy * val - vy * vy) * iv * iv};
    }
    const double w = std::pow(val, alpha);
    const double c1 = alpha * std::pow(val, alpha - 1.0);
    const double c2 = alpha * (alpha - 1.0) * std::pow(val, alpha - 2.0);
    return {w, c1 * vx, c1 * vy,
            c2 * vx * vx + c1 * vxx,
            c2 * vx * vy + c1 * vxy,
            c2 * vy * vy + c1 * vyy};
}

std::array<double, 6> PowerTransform::from_w_jet2(const std::array<double, 6>& w) const {
    const double val = w[0], wx = w[1], wy = w[2], wxx = w[3], wxy = w[4], wyy = w[5];
    if (alpha == 0.0) {
        const double v = std::exp(val);
        return {v, v * wx, v * wy,
                v * (wxx + wx * wx), v * (wxy + wx * wy), v * (wyy + wy * wy)};
    }
    const double p = 1.0 / alpha;
    const double v = std::pow(val, p);
    const double c1 = p * std::pow(val, p - 1.0);
    const double c2 = p * (p - 1.0) * std::pow(val, p - 2.0);
    return {v, c1 * wx, c1 * wy,
            c2 * wx * wx + c1 * wxx,
            c2 * wx * wy + c1 * wxy,
            c2 * wy * wy + c1 * wyy};
}

double scale_in_v(double w, double lam, double alpha) {
    return alpha == 0.0 ? w + std::log(lam) : std::pow(lam, alpha) * w;
}

// ---------------------------------------------------------------------------
// MollifierKernel

namespace {

// nodes/weights of n-point Gauss-Legendre on [0, 1] by Newton iteration
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(static_cast<size_t>(n));
    w.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[static_cast<size_t>(i)] = t;
        w[static_cast<size_t>(i)] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

double eta(double s) {
    const double q = 1.0 - s * s;
    return q <= 0.0 ? 0.0 : std::exp(-1.0 / q);
}

} // namespace

const MollifierKernel& MollifierKernel::standard() {
    static const MollifierKernel k = [] {
        MollifierKernel m;
        std::vector<double> x, w;
        gauss_legendre(64, x, w);
        m.s = x;
        m.A.resize(x.size());
        double total = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            m.A[i] = w[i] * eta(x[i]);
            total += m.A[i];
        }
        for (auto& a : m.A) a /= total;
        return m;
    }();
    return k;
}

// ---------------------------------------------------------------------------
// ConcaveExtension1D

double ConcaveExtension1D::depth_at_level(double w) const {
    double lo = 0.0, hi = collar_;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (w_jet_(mid)[0] < w)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double ConcaveExtension1D::w_tilde(double d) const {
    if (d < collar_) {
        const double w = w_jet_(d)[0];
        return w < a_ ? w : a_;
    }
    return a_;
}

std::array<double, 3> ConcaveExtension1D::moll_jet(double d) const {
    const auto& k = MollifierKernel::standard();
    double F = 0.0, F1 = 0.0, F2 = 0.0;
    for (size_t i = 0; i < k.s.size(); ++i) {
        const double dd = d - eps_m_ * k.s[i];
        if (dd < collar_) {
            const auto wj = w_jet_(std::max(dd, 0.0));
            if (wj[0] < a_) {
                F += k.A[i] * wj[0];
                F1 += k.A[i] * wj[1];
                F2 += k.A[i] * wj[2];
                continue;
            }
        }
        F += k.A[i] * a_;
    }
    return {F, F1, F2};
}

std::array<double, 3> ConcaveExtension1D::F_jet(double d) const {
    if (d < collar_) {
        const auto wj = w_jet_(d);
        if (wj[0] <= a1_) return wj; // retained collar, exact
        if (wj[0] < a2_) {
            // blend: F = chi w + (1 - chi) Fm, chi = 1 - S((w-a1)/(a2-a1))
            const auto fm = moll_jet(d);
            const double span = a2_ - a1_;
            Series1 t(2, (wj[0] - a1_) / span);
            t[1] = wj[1] / span;
            t[2] = 0.5 * wj[2] / span;
            Series1 chi = -smooth_switch_series(t) + 1.0;
            Series1 wser(2, wj[0]);
            wser[1] = wj[1];
            wser[2] = 0.5 * wj[2];
            Series1 mser(2, fm[0]);
            mser[1] = fm[1];
            mser[2] = 0.5 * fm[2];
            Series1 F = chi * wser + (-chi + 1.0) * mser;
            return {F[0], F.deriv(1), F.deriv(2)};
        }
    }
    return moll_jet(d);
}

double ConcaveExtension1D::F_value(double d) const { return F_jet(d)[0]; }

bool ConcaveExtension1D::retained(double d) const {
    return d < collar_ && w_jet_(d)[0] <= a1_;
}

ConcaveExtension1D ConcaveExtension1D::build(WJet w_jet, double collar,
                                             double level_fraction, double alpha) {
    ConcaveExtension1D e;
    e.w_jet_ = std::move(w_jet);
    e.collar_ = collar;
    e.alpha_ = alpha;
    const double w_edge = e.w_jet_(collar)[0];
    e.a_ = scale_in_v(w_edge, level_fraction, alpha);
    e.a1_ = scale_in_v(e.a_, 0.5, alpha);
    e.a2_ = scale_in_v(e.a_, 0.8, alpha);
    e.d_a1_ = e.depth_at_level(e.a1_);
    const double d_a = e.depth_at_level(e.a_);

    // widest admissible kernel: stay clear of the boundary and keep the
    // truncation kink inside the collar after shifting
    const double cap = std::min(e.d_a1_ * 0.5, (collar - d_a) * 0.5);
    double eps = 0.25;
    while (eps > cap) eps *= 0.5;

    // halve until mollification keeps the blend concave at probe points
    for (int tries = 0; tries < 40; ++tries) {
        e.eps_m_ = eps;
        bool ok = true;
        const double h = std::max(1e-5, eps * 0.25);
        for (int i = 0; i <= 60 && ok; ++i) {
            const double d = e.d_a1_ * 0.5 + (collar - e.d_a1_ * 0.5) * i / 60.0;
            const double s2 = e.F_value(d + h) + e.F_value(d - h) - 2.0 * e.F_value(d);
            if (s2 > 1e-12 * std::max(1.0, std::abs(e.F_value(d)))) ok = false;
        }
        if (ok) return e;
        eps *= 0.5;
        if (eps < 1e-9)
            throw ConstructionError("radial extension: no mollifier width preserves concavity");
    }
    throw ConstructionError("radial extension: mollifier search did not terminate");
}

// ---------------------------------------------------------------------------
// ConcaveExtension2D

double ConcaveExtension2D::w_tilde(Point p) const {
    const auto wj = w_jet_(p);
    if (wj && (*wj)[0] < a_) return (*wj)[0];
    return a_;
}

std::array<double, 6> ConcaveExtension2D::moll_jet(Point p) const {
    const auto& k = MollifierKernel::standard();
    std::array<double, 6> F{0, 0, 0, 0, 0, 0};
    for (size_t i = 0; i < k.s.size(); ++i) {
        const double px = p.x - eps_m_ * k.s[i];
        for (size_t j = 0; j < k.s.size(); ++j) {
            const double py = p.y - eps_m_ * k.s[j];
            const double a = k.A[i] * k.A[j];
            const auto wj = w_jet_({px, py});
            if (wj && (*wj)[0] < a_) {
                for (int q = 0; q < 6; ++q) F[q] += a * (*wj)[q];
            } else {
                F[0] += a * a_;
            }
        }
    }
    return F;
}

std::array<double, 6> ConcaveExtension2D::F_jet(Point p) const {
    const auto wj = w_jet_(p);
    if (!wj && deep_ && deep_(p)) return {a_, 0, 0, 0, 0, 0};
    if (wj) {
        if ((*wj)[0] <= a1_) return *wj;
        if ((*wj)[0] < a2_) {
            const auto fm = moll_jet(p);
            const double span = a2_ - a1_;
            // chi = 1 - S(t), t = (w - a1)/span; planar chain rule
            const double t = ((*wj)[0] - a1_) / span;
            Series1 ts = Series1::variable(2, t);
            Series1 S = smooth_switch_series(ts);
            const double chi = 1.0 - S[0];
            const double dchi = -S.deriv(1) / span;   // d chi / d w
            const double ddchi = -S.deriv(2) / (span * span);
            const double w = (*wj)[0], wx = (*wj)[1], wy = (*wj)[2];
            const double wxx = (*wj)[3], wxy = (*wj)[4], wyy = (*wj)[5];
            const double g = w - fm[0]; // blended difference
            const double gx = wx - fm[1], gy = wy - fm[2];
            const double gxx = wxx - fm[3], gxy = wxy - fm[4], gyy = wyy - fm[5];
            // F = fm + chi(w) g
            std::array<double, 6> F;
            F[0] = fm[0] + chi * g;
            F[1] = fm[1] + dchi * wx * g + chi * gx;
            F[2] = fm[2] + dchi * wy * g + chi * gy;
            F[3] = fm[3] + (ddchi * wx * wx + dchi * wxx) * g + 2 * dchi * wx * gx + chi * gxx;
            F[4] = fm[4] + (ddchi * wx * wy + dchi * wxy) * g + dchi * (wx * gy + wy * gx) + chi * gxy;
            F[5] = fm[5] + (ddchi * wy * wy + dchi * wyy) * g + 2 * dchi * wy * gy + chi * gyy;
            return F;
        }
    }
    return moll_jet(p);
}

double ConcaveExtension2D::F_value(Point p) const {
    const auto wj = w_jet_(p);
    if (!wj && deep_ && deep_(p)) return a_;
    if (wj && (*wj)[0] <= a1_) return (*wj)[0];
    if (wj && (*wj)[0] < a2_) return F_jet(p)[0];
    // pure mollified value
    const auto& k = MollifierKernel::standard();
    double F = 0.0;
    for (size_t i = 0; i < k.s.size(); ++i)
        for (size_t j = 0; j < k.s.size(); ++j)
            F += k.A[i] * k.A[j] * w_tilde({p.x - eps_m_ * k.s[i], p.y - eps_m_ * k.s[j]});
    return F;
}

bool ConcaveExtension2D::retained(Point p) const {
    const auto wj = w_jet_(p);
    return wj && (*wj)[0] <= a1_;
}

ConcaveExtension2D ConcaveExtension2D::build(WJet2 w_jet, double w_edge_min,
                                             double grad_bound, Params params) {
    ConcaveExtension2D e;
    e.w_jet_ = std::move(w_jet);
    e.alpha_ = params.alpha;
    e.a_ = scale_in_v(w_edge_min, params.level_fraction, params.alpha);
    e.a1_ = scale_in_v(e.a_, 0.5, params.alpha);
    e.a2_ = scale_in_v(e.a_, 0.8, params.alpha);

    // mollification must not reach past the boundary from any point that
    // needs it (those have w >= a1, hence field value >= v(a1)); bound the
    // clearance by the field value over the gradient bound
    PowerTransform T{params.alpha};
    const double v_a1 = T.from_w(e.a1_);
    const double clearance = 0.5 * v_a1 / grad_bound;
    double eps = 0.25;
    while (eps > clearance) eps *= 0.5;
    e.eps_m_ = eps;
    return e;
}

} // namespace stefanlab
