#include "doctest.h"

#include <cmath>

#include "stefanlab/jet.hpp"
#include "stefanlab/taylor.hpp"

using namespace stefanlab;

TEST_CASE("univariate series reproduce analytic derivatives") {
    // f(x) = sqrt(4 - x^2) at x0 = 0.3, checked against closed forms.
    const double x0 = 0.3;
    Series1 x = Series1::variable(8, x0);
    Series1 f = series_sqrt(-(x * x) + 4.0);
    const double w = std::sqrt(4 - x0 * x0);
    CHECK(f[0] == doctest::Approx(w).epsilon(1e-14));
    CHECK(f.deriv(1) == doctest::Approx(-x0 / w).epsilon(1e-13));
    CHECK(f.deriv(2) == doctest::Approx(-4.0 / (w * w * w)).epsilon(1e-13));

    // exp(log(f)) == f
    Series1 g = series_exp(series_log(f));
    for (int n = 0; n <= 8; ++n) CHECK(g[n] == doctest::Approx(f[n]).epsilon(1e-12));

    // pow via p = 1/2 matches sqrt
    Series1 h = series_pow(-(x * x) + 4.0, 0.5);
    for (int n = 0; n <= 8; ++n) CHECK(h[n] == doctest::Approx(f[n]).epsilon(1e-12));
}

TEST_CASE("univariate composition and reciprocal") {
    // 1/(1+x) around 0.2: derivatives (-1)^n n!/(1.2)^(n+1)
    Series1 x = Series1::variable(6, 0.2);
    Series1 r = series_recip(x + 1.0);
    double fact = 1.0;
    for (int n = 0; n <= 6; ++n) {
        if (n >= 2) fact *= n;
        const double expect = ((n % 2) ? -1.0 : 1.0) * fact * std::pow(1.2, -(n + 1.0));
        CHECK(r.deriv(n) == doctest::Approx(expect).epsilon(1e-12));
        if (n < 2) fact = 1.0;
    }
}

TEST_CASE("bivariate series derivatives match closed form") {
    // F(x,y) = sqrt(x^2 + (y-2)^2) (distance to (0,2)) at (0.6, 0.5)
    const double x0 = 0.6, y0 = 0.5;
    const int D = 6;
    Series2 x = Series2::variable_x(D, x0);
    Series2 y = Series2::variable_y(D, y0);
    Series2 r = series_sqrt(x * x + (y - Series2::constant(D, 2.0)) * (y - Series2::constant(D, 2.0)));
    const double rr = std::hypot(x0, y0 - 2.0);
    CHECK(r.deriv(0, 0) == doctest::Approx(rr).epsilon(1e-14));
    CHECK(r.deriv(1, 0) == doctest::Approx(x0 / rr).epsilon(1e-13));
    CHECK(r.deriv(0, 1) == doctest::Approx((y0 - 2) / rr).epsilon(1e-13));
    // r_xx = (y-2)^2 / r^3, r_xy = -x(y-2)/r^3
    CHECK(r.deriv(2, 0) == doctest::Approx((y0 - 2) * (y0 - 2) / (rr * rr * rr)).epsilon(1e-12));
    CHECK(r.deriv(1, 1) == doctest::Approx(-x0 * (y0 - 2) / (rr * rr * rr)).epsilon(1e-12));

    // jet conversion carries the same values
    DerivJet j = DerivJet::from_series(r);
    CHECK(j.at(1, 1) == doctest::Approx(r.deriv(1, 1)));
    CHECK_THROWS_AS((void)j.at(4, 3), DepthError);
}

TEST_CASE("substitute_y restricts a bivariate series to a curve") {
    // F(x, y) = x^2 y + y^2 at (1, 2); restrict to y = 2 + 3 dx + dx^2.
    const int D = 4;
    Series2 x = Series2::variable_x(D, 1.0);
    Series2 y = Series2::variable_y(D, 2.0);
    Series2 F = x * x * y + y * y;
    Series1 g(D, 0.0);
    g[1] = 3.0;
    g[2] = 1.0;
    Series1 restricted = F.substitute_y(g);
    // exact: f(t) = (1+t)^2 (2+3t+t^2) + (2+3t+t^2)^2
    auto exact = [](double t) {
        const double yy = 2 + 3 * t + t * t;
        return (1 + t) * (1 + t) * yy + yy * yy;
    };
    for (double t : {0.0, 0.05, -0.08, 0.1}) {
        CHECK(restricted.eval(t) == doctest::Approx(exact(t)).epsilon(1e-12));
    }
}
