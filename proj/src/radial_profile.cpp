#include "stefanlab/radial_profile.hpp"

#include <cmath>
#include <sstream>

#include "stefanlab/errors.hpp"

namespace stefanlab {

namespace {

// q-derivative list at r0 from the boundary Taylor data: Q(t) with t = 2 - r,
// q^(m)(r) = (-1)^m Q^(m)(t). Returns q^(0..deg)(r0).
std::vector<double> q_derivs_at(const std::vector<double>& coeffs, double r0, int deg) {
    const double t0 = 2.0 - r0;
    const int top = static_cast<int>(coeffs.size()) - 1;
    std::vector<double> out(static_cast<size_t>(deg) + 1, 0.0);
    for (int m = 0; m <= deg; ++m) {
        // Q^(m)(t0) = sum_{j>=m} Q_j j!/(j-m)! t0^(j-m), Q_j = q^(j)(2)(-1)^j / j!
        double acc = 0.0;
        for (int j = top; j >= m; --j) {
            const double qj = coeffs[static_cast<size_t>(j)];
            double c = ((j % 2) ? -1.0 : 1.0) * qj;
            double fact = 1.0;
            for (int i = 2; i <= j; ++i) fact *= i;
            c /= fact;
            double perm = 1.0;
            for (int i = 0; i < m; ++i) perm *= (j - i);
            acc += c * perm * std::pow(t0, j - m);
        }
        out[static_cast<size_t>(m)] = ((m % 2) ? -1.0 : 1.0) * acc;
    }
    return out;
}

} // namespace

Series1 ProfileBundle::q_series(double r0, int deg) const {
    Series1 r = Series1::variable(deg, r0);
    const auto d = q_derivs_at(coeffs_, r0, deg);
    std::vector<double> derivs(d.begin(), d.end());
    return compose_analytic(r, derivs);
}

Series2 ProfileBundle::U_series(double x0, double y0, int deg) const {
    Series2 x = Series2::variable_x(deg, x0);
    Series2 y = Series2::variable_y(deg, y0);
    Series2 r = series_sqrt(x * x + (y + Series2::constant(deg, -2.0)) * (y + Series2::constant(deg, -2.0)));
    return compose_analytic(r, q_derivs_at(coeffs_, r.at(0, 0), deg));
}

DerivJet ProfileBundle::U_jet(double x0, double y0, int depth) const {
    return DerivJet::from_series(U_series(x0, y0, depth));
}

double ProfileBundle::eval_q(double r, int order) const {
    if (!(r >= 0.0 && r <= 2.0)) throw RegionError("q is defined on [0, 2]");
    const double d = 2.0 - r;
    // the polynomial is the field only where the extension keeps it exactly
    if (d <= collar_width_ && ext_.retained(d)) {
        if (order > 2 * N_ + 1)
            throw DepthError("collar polynomial stores orders up to 2N+1");
        const auto derivs = q_derivs_at(coeffs_, r, order);
        return derivs[static_cast<size_t>(order)];
    }
    if (order > 2) throw DepthError("extension region provides orders <= 2 only");
    PowerTransform T{alpha_};
    const auto Fj = ext_.F_jet(d);
    const auto vj = T.from_w_jet1(Fj);
    // depth derivative -> radial derivative: d = 2 - r flips odd orders
    const double sign = (order % 2) ? -1.0 : 1.0;
    return sign * vj[static_cast<size_t>(order)];
}

double ProfileBundle::U_value(double x0, double y0) const {
    const double r = std::hypot(x0, y0 - 2.0);
    if (r > 2.0) throw RegionError("point outside the closed disk");
    return eval_q(r, 0);
}

std::array<double, 3> ProfileBundle::w_depth_jet(double d) const {
    // q along depth: value q(2-d), derivative in d = -q'(r), second = q''(r)
    const auto derivs = q_derivs_at(coeffs_, 2.0 - d, 2);
    PowerTransform T{alpha_};
    return T.to_w_jet1({derivs[0], -derivs[1], derivs[2]});
}

ProfileBundle rebuild_profile(double alpha, int N, std::vector<double> coeffs,
                              double collar_width, double c_lower) {
    if (static_cast<int>(coeffs.size()) != 2 * N + 2)
        throw ValidationError("boundary coefficient count does not match N");
    ProfileBundle b;
    b.alpha_ = alpha;
    b.N_ = N;
    b.q1_ = coeffs[1];
    b.coeffs_ = std::move(coeffs);
    b.collar_width_ = collar_width;
    b.c_lower_ = c_lower;
    auto wjet = [coeffs = b.coeffs_, alpha](double d) {
        const auto qd = q_derivs_at(coeffs, 2.0 - d, 2);
        PowerTransform Tr{alpha};
        return Tr.to_w_jet1({qd[0], -qd[1], qd[2]});
    };
    b.ext_ = ConcaveExtension1D::build(wjet, collar_width, 0.8, alpha);
    return b;
}

bool check_radial_concavity(const ProfileBundle& bundle, double r, double alpha) {
    if (!(r > 0.0)) throw RegionError("radial concavity test excludes the origin");
    const double q = bundle.eval_q(r, 0);
    const double q1 = bundle.eval_q(r, 1);
    const double q2 = bundle.eval_q(r, 2);
    PowerTransform T{alpha};
    const auto w = T.to_w_jet1({q, q1, q2});
    return w[1] < 0.0 && w[2] < 0.0;
}

ProfileBundle build_profile(double alpha, int N, double q1) {
    if (!(alpha >= 0.0 && alpha < 0.5)) throw ValidationError("alpha must be in [0, 1/2)");
    if (N < 1) throw ValidationError("N must be >= 1");
    if (!(q1 < 0.0)) throw ValidationError("q1 must be negative");

    ProfileBundle b;
    b.alpha_ = alpha;
    b.N_ = N;
    b.q1_ = q1;
    b.coeffs_.assign(static_cast<size_t>(2 * N + 2), 0.0);
    b.coeffs_[1] = q1;
    // radial first compatibility at r = 2: q'' + q'/2 = q'^2
    b.coeffs_[2] = q1 * q1 - 0.5 * q1;

    // higher even orders from the k-th compatibility residual at the bottom
    // boundary point (0, 0); the residual is affine in q^(2k)(2) because that
    // coefficient enters only through the leading Laplacian power
    for (int k = 2; k <= N; ++k) {
        auto op = derive_compat_operator(k);
        auto residual = [&](double c) {
            b.coeffs_[static_cast<size_t>(2 * k)] = c;
            return op.evaluate(b.U_jet(0.0, 0.0, 2 * k));
        };
        const double r0 = residual(0.0), r1 = residual(1.0);
        const double slope = r1 - r0;
        if (std::abs(slope) < 1e-12) {
            std::ostringstream os;
            os << "compat order " << k << ": residual not sensitive to q^(2k)(2)"
               << " (r(0) = " << r0 << ", r(1) = " << r1 << ")";
            throw ConstructionError(os.str());
        }
        const double root = -r0 / slope;
        // affinity check: prediction at a third point
        const double r2 = residual(root + 1.0);
        const double scale = std::max({1.0, std::abs(r0), std::abs(r1)});
        if (std::abs(r2 - slope) > 1e-7 * scale || std::abs(residual(root)) > 1e-9 * scale) {
            std::ostringstream os;
            os << "compat order " << k << ": residual is not affine in q^(2k)(2)"
               << " (r(0) = " << r0 << ", r(1) = " << r1 << ", r(root+1) = " << r2 << ")";
            throw ConstructionError(os.str());
        }
        b.coeffs_[static_cast<size_t>(2 * k)] = root;
    }

    // collar: halving search with the margins checked on a 1e-3 grid
    PowerTransform T{alpha};
    double cw = 0.5;
    for (;; cw *= 0.5) {
        if (cw < 1e-3) throw ConstructionError("radial collar shrank below 1e-3");
        bool ok = true;
        for (double d = 1e-3; d <= cw + 1e-12 && ok; d += 1e-3) {
            const auto qd = q_derivs_at(b.coeffs_, 2.0 - d, 2);
            if (!(qd[0] >= 1e-6)) ok = false;
            const auto w = T.to_w_jet1({qd[0], qd[1], qd[2]});
            if (!(w[1] < -1e-6) || !(w[2] < -1e-6)) ok = false;
        }
        if (ok) break;
    }
    b.collar_width_ = cw;

    // positive lower bound for the first expansion coefficient of U above the
    // graph: E1(x) = -q'(2) sqrt(4 - x^2)/2 >= -q'(2) sqrt(3)/2 on [-1, 1];
    // capped so the flat-segment slope (which dips to the 0.1 psi margin)
    // stays above it
    b.c_lower_ = std::min(0.9 * (-q1) * std::sqrt(3.0) / 2.0, 0.09);

    // concave radial extension of the transform
    auto wjet = [coeffs = b.coeffs_, alpha](double d) {
        const auto qd = q_derivs_at(coeffs, 2.0 - d, 2);
        PowerTransform Tr{alpha};
        return Tr.to_w_jet1({qd[0], -qd[1], qd[2]});
    };
    b.ext_ = ConcaveExtension1D::build(wjet, cw, 0.8, alpha);
    return b;
}

} // namespace stefanlab
