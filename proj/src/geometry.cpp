#include "stefanlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "stefanlab/errors.hpp"

namespace stefanlab {

namespace {

// 16-point Gauss-Legendre on [-1, 1] (positive half; mirror for the rest).
constexpr std::array<double, 8> kGlx = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kGlw = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <class F>
double gauss16(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 8; ++i)
        s += kGlw[i] * (f(c + h * kGlx[i]) + f(c - h * kGlx[i]));
    return s * h;
}

constexpr int kBlendPanels = 192;

} // namespace

double eval_G(double x, int order) {
    if (!(std::abs(x) < 2.0)) throw RegionError("G is defined on (-2, 2)");
    if (order < 0 || order > 6) throw ValidationError("G derivative order must be 0..6");
    return G_series(x, order).deriv(order);
}

Series1 G_series(double x0, int deg) {
    Series1 x = Series1::variable(deg, x0);
    return -series_sqrt(-(x * x) + 4.0) + 2.0;
}

double smooth_switch(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

Series1 smooth_switch_series(const Series1& t) {
    const double t0 = t[0];
    if (t0 <= 0.0 || t0 >= 1.0) return Series1(t.deg(), t0 >= 1.0 ? 1.0 : 0.0);
    Series1 a = series_exp(-series_recip(t));
    Series1 b = series_exp(-series_recip(-t + 1.0));
    return a * series_recip(a + b);
}

double smooth_bump(double t, double p) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return std::exp(p * (4.0 - 1.0 / (t * (1.0 - t))));
}

Series1 smooth_bump_series(const Series1& t, double p) {
    const double t0 = t[0];
    if (t0 <= 0.0 || t0 >= 1.0) return Series1(t.deg(), 0.0);
    Series1 q = t * (-t + 1.0);
    return series_exp((-series_recip(q) + 4.0) * p);
}

// --- blend model -----------------------------------------------------------

double DomainSpec::blend_m(double x) const {
    return blend_m_series(x, 0)[0];
}

Series1 DomainSpec::blend_m_series(double x0, int deg) const {
    // positive-side coordinates: x0 in [delta, 1/2]
    const double w = 0.5 - delta_;
    Series1 x = Series1::variable(deg, x0);
    Series1 tau = (x - delta_) * (1.0 / w);

    // tail: Taylor polynomial of G'' at 1/2 of degree match_order, times the
    // switch so it vanishes to all orders at the flat end
    Series1 Gs = G_series(0.5, match_order_ + 2 + deg);
    Series1 tail(deg, 0.0);
    {
        // P(x) = sum_j G^(2+j)(1/2)/j! (x-1/2)^j, expanded around x0
        Series1 sh = Series1::variable(deg, x0 - 0.5); // (x - 1/2) around x0
        Series1 pw(deg, 1.0);
        double fact = 1.0;
        for (int j = 0; j <= match_order_; ++j) {
            if (j >= 2) fact *= j;
            tail = tail + pw * (Gs.deriv(2 + j) / fact);
            pw = pw * sh;
        }
    }
    tail = tail * smooth_switch_series(tau);

    // two bump amplitudes: a full-width bump and a right-shifted one; the
    // shifted bump carries the curvature mass the closure pushes toward the
    // circle end
    Series1 bump1 = smooth_bump_series(tau, bump_p_);
    Series1 tau2 = (tau - shift_c_) * (1.0 / (1.0 - shift_c_));
    Series1 bump2 = smooth_bump_series(tau2, bump_p_);
    return tail + bump1 * amp_a_ + bump2 * amp_b_;
}

void DomainSpec::build_tables() {
    nodes_.resize(kBlendPanels + 1);
    cum_m_.assign(kBlendPanels + 1, 0.0);
    cum_sm_.assign(kBlendPanels + 1, 0.0);
    for (int i = 0; i <= kBlendPanels; ++i)
        nodes_[i] = delta_ + (0.5 - delta_) * i / kBlendPanels;
    for (int i = kBlendPanels - 1; i >= 0; --i) {
        auto m = [&](double s) { return blend_m(s); };
        auto sm = [&](double s) { return s * blend_m(s); };
        cum_m_[i] = cum_m_[i + 1] + gauss16(m, nodes_[i], nodes_[i + 1]);
        cum_sm_[i] = cum_sm_[i + 1] + gauss16(sm, nodes_[i], nodes_[i + 1]);
    }
}

double DomainSpec::int_m_to_half(double x) const {
    const double w = (0.5 - delta_) / kBlendPanels;
    int i = static_cast<int>(std::floor((x - delta_) / w));
    i = std::clamp(i, 0, kBlendPanels - 1);
    auto m = [&](double s) { return blend_m(s); };
    return gauss16(m, x, nodes_[i + 1]) + cum_m_[i + 1];
}

double DomainSpec::int_sm_to_half(double x) const {
    const double w = (0.5 - delta_) / kBlendPanels;
    int i = static_cast<int>(std::floor((x - delta_) / w));
    i = std::clamp(i, 0, kBlendPanels - 1);
    auto sm = [&](double s) { return s * blend_m(s); };
    return gauss16(sm, x, nodes_[i + 1]) + cum_sm_[i + 1];
}

double DomainSpec::eval_g(double x, int order) const {
    return g_series(x, order).deriv(order);
}

Series1 DomainSpec::g_series(double x0, int deg) const {
    const double ax = std::abs(x0);
    if (ax <= delta_) {
        return Series1(deg, flat_level_); // flat segment
    }
    if (ax >= 0.5) {
        return G_series(x0, deg);
    }
    // blend: even reflection for the negative side
    const bool neg = x0 < 0.0;
    const double xp = ax;
    // value and slope by quadrature, higher coefficients from m
    const double gp = eval_G(0.5, 1) - int_m_to_half(xp);
    const double gv = eval_G(0.5, 0) - eval_G(0.5, 1) * (0.5 - xp) +
                      (int_sm_to_half(xp) - xp * int_m_to_half(xp));
    Series1 ms = blend_m_series(xp, std::max(0, deg - 2));
    Series1 out(deg, gv);
    if (deg >= 1) out[1] = gp;
    double fact = 2.0;
    for (int k = 2; k <= deg; ++k) {
        if (k > 2) fact *= k;
        // g^(k) = m^(k-2); series coefficient = m^(k-2)(x0) / k!
        out[k] = ms.deriv(k - 2) / fact;
    }
    if (neg) {
        for (int k = 1; k <= deg; k += 2) out[k] = -out[k];
    }
    return out;
}

bool DomainSpec::contains(Point p) const {
    const double r = std::hypot(p.x, p.y - 2.0);
    if (!(r < 2.0)) return false;
    return p.y > eval_g(p.x);
}

double DomainSpec::height_above_graph(Point p) const {
    if (!(std::abs(p.x) < 2.0)) throw RegionError("graph height needs |x| < 2");
    return p.y - eval_g(p.x);
}

double DomainSpec::boundary_length() const {
    const double xj = std::numbers::sqrt2;
    auto len = [&](double x) {
        const double gp = eval_g(x, 1);
        return std::sqrt(1.0 + gp * gp);
    };
    double graph = 0.0;
    const int panels = 64;
    for (int i = 0; i < panels; ++i) {
        const double a = -xj + 2 * xj * i / panels;
        const double b = -xj + 2 * xj * (i + 1) / panels;
        graph += gauss16(len, a, b);
    }
    return graph + 3.0 * std::numbers::pi; // arc spans 3/2 of the circle
}

std::vector<BoundarySample> DomainSpec::boundary_samples(int n) const {
    if (n < 8) throw ValidationError("boundary_samples needs n >= 8");
    const double xj = std::numbers::sqrt2;

    // cumulative graph length table for inversion
    const int m = 2048;
    std::vector<double> xs(m + 1), cl(m + 1, 0.0);
    for (int i = 0; i <= m; ++i) xs[i] = -xj + 2 * xj * i / m;
    for (int i = 0; i < m; ++i) {
        auto len = [&](double x) {
            const double gp = eval_g(x, 1);
            return std::sqrt(1.0 + gp * gp);
        };
        cl[i + 1] = cl[i] + gauss16(len, xs[i], xs[i + 1]);
    }
    const double graph_len = cl[m];
    const double total = graph_len + 3.0 * std::numbers::pi;

    std::vector<BoundarySample> out;
    out.reserve(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double s = total * k / n;
        BoundarySample b;
        b.param = static_cast<double>(k) / n;
        if (s < graph_len) {
            // invert the cumulative table
            const auto it = std::upper_bound(cl.begin(), cl.end(), s);
            const size_t i = std::min(static_cast<size_t>(it - cl.begin()), static_cast<size_t>(m)) - 1;
            const double f = (s - cl[i]) / std::max(cl[i + 1] - cl[i], 1e-300);
            const double x = xs[i] + (xs[i + 1] - xs[i]) * f;
            const double gp = eval_g(x, 1);
            const double nn = std::sqrt(1.0 + gp * gp);
            b.p = {x, eval_g(x)};
            b.nx = gp / nn;
            b.ny = -1.0 / nn;
        } else {
            // arc from angle -pi/4 counterclockwise through the top to 5 pi/4
            const double th = -std::numbers::pi / 4 + (s - graph_len) / 2.0;
            b.p = {2.0 * std::cos(th), 2.0 + 2.0 * std::sin(th)};
            b.nx = std::cos(th);
            b.ny = std::sin(th);
        }
        if (!out.empty()) {
            const double dx = out.back().p.x - b.p.x, dy = out.back().p.y - b.p.y;
            if (dx * dx + dy * dy < 1e-24) continue; // junction duplicate
        }
        out.push_back(b);
    }
    return out;
}

DomainSpec rebuild_g(double delta, int N, double bump_p, double shift_c, double amp_a,
                     double amp_b) {
    DomainSpec d;
    d.delta_ = delta;
    d.match_order_ = 2 * N;
    d.bump_p_ = bump_p;
    d.shift_c_ = shift_c;
    d.amp_a_ = amp_a;
    d.amp_b_ = amp_b;
    d.build_tables();
    return d;
}

DomainSpec build_g(double delta, int N) {
    if (!(delta > 0.0 && delta < 0.25)) throw ValidationError("delta must be in (0, 1/4)");
    if (N < 1) throw ValidationError("N must be >= 1");

    std::ostringstream diag;
    for (double c : {0.8, 0.7, 0.85, 0.6, 0.9, 0.5}) {
        for (double p : {1.0, 0.5, 2.0}) {
            DomainSpec d;
            d.delta_ = delta;
            d.match_order_ = 2 * N;
            d.bump_p_ = p;
            d.shift_c_ = c;
            d.amp_a_ = 0.0;
            d.amp_b_ = 0.0;

            // moments of the two bump basis functions and the tail
            const double w = 0.5 - delta;
            const Series1 Gs = G_series(0.5, d.match_order_ + 2);
            auto tau = [&](double x) { return (x - delta) / w; };
            auto tail = [&](double x) {
                double sum = 0.0, fact = 1.0, power = 1.0;
                for (int j = 0; j <= d.match_order_; ++j) {
                    if (j >= 2) fact *= j;
                    sum += Gs.deriv(2 + j) / fact * power;
                    power *= (x - 0.5);
                }
                return sum * smooth_switch(tau(x));
            };
            auto bump1 = [&](double x) { return smooth_bump(tau(x), p); };
            auto bump2 = [&](double x) { return smooth_bump((tau(x) - c) / (1.0 - c), p); };

            double I1 = 0, I2 = 0, It = 0, J1 = 0, J2 = 0, Jt = 0;
            for (int i = 0; i < kBlendPanels; ++i) {
                const double a = delta + w * i / kBlendPanels;
                const double b = delta + w * (i + 1) / kBlendPanels;
                I1 += gauss16([&](double s) { return bump1(s); }, a, b);
                I2 += gauss16([&](double s) { return bump2(s); }, a, b);
                It += gauss16([&](double s) { return tail(s); }, a, b);
                J1 += gauss16([&](double s) { return (s - delta) * bump1(s); }, a, b);
                J2 += gauss16([&](double s) { return (s - delta) * bump2(s); }, a, b);
                Jt += gauss16([&](double s) { return (s - delta) * tail(s); }, a, b);
            }

            // closure conditions from integrating m twice down from x = 1/2:
            //   g'(delta) = 0  =>  int m = G'(1/2)
            //   g(delta) = 1/20 => int (s-delta) m ds = 1/20 - G(1/2) + G'(1/2)(1/2-delta)
            const double M1 = eval_G(0.5, 1);
            const double rhs1 = M1 - It;
            const double rhs2 = (0.05 - eval_G(0.5, 0) + M1 * w) - Jt;

            const double det = I1 * J2 - I2 * J1;
            if (std::abs(det) < 1e-18) {
                diag << "c=" << c << " p=" << p << ": singular moment system\n";
                continue;
            }
            d.amp_a_ = (rhs1 * J2 - I2 * rhs2) / det;
            d.amp_b_ = (I1 * rhs2 - rhs1 * J1) / det;

            // positivity of m: nonnegative everywhere, strictly positive away
            // from the flat endpoint (the exponential factors underflow to
            // zero within ~1e-3 of x = delta, where m is positive but below
            // the smallest double)
            double worst = 1e300, worst_x = delta;
            bool ok = true;
            for (int i = 1; i < 4000 && ok; ++i) {
                const double x = delta + w * i / 4000.0;
                const double t = (x - delta) / w;
                const double mv = d.blend_m(x);
                if (mv < worst) {
                    worst = mv;
                    worst_x = x;
                }
                if (mv < 0.0 || (mv == 0.0 && t >= 0.02 && t <= 0.98)) ok = false;
            }
            if (!ok) {
                diag << "c=" << c << " p=" << p << ": m(" << worst_x << ") = " << worst
                     << " not positive\n";
                continue;
            }

            d.build_tables();

            // closure check at the flat end
            const double g_at_delta = d.eval_g(delta + 1e-13);
            const double gp_at_delta = d.eval_g(delta + 1e-13, 1);
            if (std::abs(g_at_delta - 0.05) > 1e-10 || std::abs(gp_at_delta) > 1e-10) {
                diag << "c=" << c << " p=" << p << ": closure failed (g=" << g_at_delta
                     << ", g'=" << gp_at_delta << ")\n";
                continue;
            }
            return d;
        }
    }
    throw ConstructionError("no bump shape yields a positive g'' blend:\n" + diag.str());
}

} // namespace stefanlab
