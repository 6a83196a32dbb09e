#include "stefanlab/psi_ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stefanlab/errors.hpp"

namespace stefanlab {

namespace {

struct State {
    double p, dp;
};

double rhs_ddp(double alpha, double p, double dp) {
    const double c = (2.0 / 3.0) * (1.0 - 2.0 * alpha);
    return (-1.0 + c * dp * dp) / p;
}

// One RK4 step for (psi, psi').
State rk4_step(double alpha, State s, double h) {
    auto f = [&](State q) { return State{q.dp, rhs_ddp(alpha, q.p, q.dp)}; };
    const State k1 = f(s);
    const State k2 = f({s.p + 0.5 * h * k1.p, s.dp + 0.5 * h * k1.dp});
    const State k3 = f({s.p + 0.5 * h * k2.p, s.dp + 0.5 * h * k2.dp});
    const State k4 = f({s.p + h * k3.p, s.dp + h * k3.dp});
    return {s.p + h / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p),
            s.dp + h / 6 * (k1.dp + 2 * k2.dp + 2 * k3.dp + k4.dp)};
}

// Integrate from 0 to +/- span; returns samples excluding x = 0, in step
// order. Stops early if psi drops below hard_floor (blow-up guard).
std::vector<State> march(double alpha, double span, double h, double hard_floor,
                         double* reached) {
    std::vector<State> out;
    State s{1.0, std::sqrt(2.0 / (1.0 - 2.0 * alpha))};
    const int n = static_cast<int>(std::round(std::abs(span) / h));
    const double dir = span >= 0 ? h : -h;
    double x = 0.0;
    for (int i = 0; i < n; ++i) {
        s = rk4_step(alpha, s, dir);
        x += dir;
        if (!(s.p > hard_floor)) {
            *reached = x;
            return out;
        }
        out.push_back(s);
    }
    *reached = x;
    return out;
}

} // namespace

double PsiSolution::second_derivative(double psi_v, double dpsi_v) const {
    return rhs_ddp(alpha, psi_v, dpsi_v);
}

Series1 PsiSolution::series(double x, int deg) const {
    if (xs.empty() || x < xs.front() - 0.5 * step || x > xs.back() + 0.5 * step)
        throw RegionError("psi evaluated outside its integrated range");
    // nearest sample, then a Taylor step of length <= step/2
    const double pos = (x - xs.front()) / step;
    const size_t i =
        static_cast<size_t>(std::clamp<long long>(std::llround(pos), 0,
                                                  static_cast<long long>(xs.size()) - 1));
    const double dx = x - xs[i];

    // psi-derivative list at the sample from the ODE:
    // Leibniz on psi psi'' - c psi'^2 = -1 solved for psi^(n+2).
    const double c = (2.0 / 3.0) * (1.0 - 2.0 * alpha);
    const int nd = deg + 2;
    std::vector<double> d(static_cast<size_t>(nd) + 1, 0.0);
    d[0] = psi[i];
    d[1] = dpsi[i];
    auto binom = [](int n, int k) {
        double b = 1;
        for (int j = 0; j < k; ++j) b = b * (n - j) / (j + 1);
        return b;
    };
    for (int n = 0; n + 2 <= nd; ++n) {
        // sum_{j=0..n} C(n,j) [ psi^(j) psi^(n-j+2) - c psi^(j+1) psi^(n-j+1) ] = 0
        double known = 0.0;
        for (int j = 1; j <= n; ++j) known += binom(n, j) * d[j] * d[n - j + 2];
        for (int j = 0; j <= n; ++j) known -= c * binom(n, j) * d[j + 1] * d[n - j + 1];
        if (n == 0) known -= -1.0; // the constant right-hand side
        d[static_cast<size_t>(n) + 2] = -known / d[0];
    }
    // shift by dx, truncate to deg
    Series1 at_sample(nd, 0.0);
    double fact = 1.0;
    for (int m = 0; m <= nd; ++m) {
        if (m >= 2) fact *= m;
        at_sample[m] = d[static_cast<size_t>(m)] / fact;
    }
    Series1 shift(nd, dx);
    if (nd >= 1) shift[1] = 1.0;
    return series_compose(at_sample, shift).truncated(deg);
}

double PsiSolution::slope(double x) const {
    Series1 s = series(x, 1);
    return s.deriv(1);
}

double PsiSolution::left_reach(double floor) const {
    for (size_t i = 0; i < xs.size(); ++i) {
        // xs ascending; walk from the left end until psi >= floor
        if (psi[i] >= floor) return -xs[i];
    }
    return 0.0;
}

PsiSolution solve_psi(double alpha, double delta, double step, double extend_to) {
    if (!(alpha >= 0.0 && alpha < 0.5)) throw ValidationError("alpha must be in [0, 1/2)");
    if (!(delta > 0.0 && delta < 0.25)) throw ValidationError("delta must be in (0, 1/4)");
    if (!(step > 0.0)) throw ValidationError("step must be positive");

    const double span = std::max(2.0 * delta, extend_to);
    double reached_r = 0.0, reached_l = 0.0;
    auto right = march(alpha, span, step, 1e-3, &reached_r);
    auto left = march(alpha, -span, step, 1e-3, &reached_l);

    PsiSolution sol;
    sol.alpha = alpha;
    sol.delta = delta;
    sol.step = step;
    sol.x_min = reached_l;
    sol.x_max = reached_r;

    const size_t nl = left.size(), nr = right.size();
    sol.xs.resize(nl + nr + 1);
    sol.psi.resize(nl + nr + 1);
    sol.dpsi.resize(nl + nr + 1);
    for (size_t i = 0; i < nl; ++i) {
        sol.xs[i] = -step * static_cast<double>(nl - i);
        sol.psi[i] = left[nl - 1 - i].p;
        sol.dpsi[i] = left[nl - 1 - i].dp;
    }
    sol.xs[nl] = 0.0;
    sol.psi[nl] = 1.0;
    sol.dpsi[nl] = std::sqrt(2.0 / (1.0 - 2.0 * alpha));
    for (size_t i = 0; i < nr; ++i) {
        sol.xs[nl + 1 + i] = step * static_cast<double>(i + 1);
        sol.psi[nl + 1 + i] = right[i].p;
        sol.dpsi[nl + 1 + i] = right[i].dp;
    }

    // invariants on [-2 delta, 2 delta]
    if (sol.x_max < 2 * delta - 0.5 * step || -sol.x_min < 2 * delta - 0.5 * step) {
        std::ostringstream os;
        os << "psi reached zero before covering [-2d, 2d]: left " << sol.x_min << ", right "
           << sol.x_max;
        throw ConstructionError(os.str());
    }
    for (size_t i = 0; i < sol.xs.size(); ++i) {
        if (std::abs(sol.xs[i]) > 2 * delta + 0.5 * step) continue;
        const double ddp = rhs_ddp(alpha, sol.psi[i], sol.dpsi[i]);
        if (!(sol.psi[i] > 0.0) || !(ddp > 0.0)) {
            std::ostringstream os;
            os << "psi invariant failed at x = " << sol.xs[i] << " (psi = " << sol.psi[i]
               << ", psi'' = " << ddp << ")";
            throw ConstructionError(os.str());
        }
    }
    return sol;
}

double choose_delta(double alpha, double step) {
    for (int i = 0; i < 12; ++i) {
        const double delta = 0.24 - 0.02 * i;
        try {
            PsiSolution sol = solve_psi(alpha, delta, step);
            bool ok = true;
            for (size_t j = 0; j < sol.xs.size() && ok; ++j) {
                if (std::abs(sol.xs[j]) > 2 * delta + 0.5 * step) continue;
                const double ddp = sol.second_derivative(sol.psi[j], sol.dpsi[j]);
                if (sol.psi[j] < 0.1 || ddp < 0.05) ok = false;
            }
            if (ok) return delta;
        } catch (const ConstructionError&) {
            // try the next smaller delta
        }
    }
    throw ConstructionError("no delta in {0.24, ..., 0.02} satisfies the psi margins");
}

} // namespace stefanlab
