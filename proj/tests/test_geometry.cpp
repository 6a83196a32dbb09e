#include "doctest.h"

#include <cmath>
#include <random>

#include "stefanlab/geometry.hpp"
#include "stefanlab/errors.hpp"

using namespace stefanlab;

TEST_CASE("circle graph closed form") {
    CHECK(eval_G(0.0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(eval_G(1.0, 0) == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-15));
    CHECK(eval_G(0.0, 2) == doctest::Approx(0.5).epsilon(1e-14));
    // G'' = 4 (4 - x^2)^(-3/2)
    for (double x : {-1.2, -0.4, 0.3, 1.7}) {
        CHECK(eval_G(x, 2) == doctest::Approx(4.0 * std::pow(4 - x * x, -1.5)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(eval_G(2.0, 0), RegionError);
}

TEST_CASE("blended graph hits its anchors") {
    DomainSpec d = build_g(0.2, 2);
    CHECK(d.eval_g(0.0) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(d.eval_g(0.13) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(d.eval_g(0.75) == doctest::Approx(eval_G(0.75, 0)).epsilon(1e-15));
    CHECK(d.eval_g(-1.4) == doctest::Approx(eval_G(-1.4, 0)).epsilon(1e-15));

    // value/slope continuity at the joins
    for (double xj : {0.2, -0.2}) {
        CHECK(d.eval_g(xj + 1e-12) == doctest::Approx(0.05).epsilon(1e-11));
        CHECK(std::abs(d.eval_g(xj + (xj > 0 ? 1e-12 : -1e-12), 1)) < 1e-10);
    }
    for (double xj : {0.5, -0.5}) {
        const double in = xj > 0 ? xj - 1e-12 : xj + 1e-12;
        CHECK(d.eval_g(in) == doctest::Approx(eval_G(xj, 0)).epsilon(1e-11));
        CHECK(d.eval_g(in, 1) == doctest::Approx(eval_G(xj, 1)).epsilon(1e-9));
    }
}

TEST_CASE("derivative continuity at the joins up to order 2N+2") {
    DomainSpec d = build_g(0.18, 2);
    // circle end: compare g-series inside the blend against G-series
    Series1 a = d.g_series(0.5 - 1e-9, 6);
    Series1 b = G_series(0.5 - 1e-9, 6);
    for (int k = 0; k <= 6; ++k)
        CHECK(a.deriv(k) == doctest::Approx(b.deriv(k)).epsilon(1e-8).scale(1.0));
    // flat end: all blend derivatives die out
    Series1 c = d.g_series(0.18 + 1e-9, 6);
    CHECK(c.deriv(0) == doctest::Approx(0.05).epsilon(1e-12));
    for (int k = 1; k <= 6; ++k) CHECK(std::abs(c.deriv(k)) < 1e-8);
}

TEST_CASE("convexity of the blend and of g") {
    DomainSpec d = build_g(0.22, 2);
    // g'' = m > 0 on the open blend intervals
    for (int i = 1; i < 300; ++i) {
        const double x = 0.22 + (0.5 - 0.22) * i / 300.0;
        CHECK(d.blend_m(x) > 0.0);
    }
    // midpoint convexity on a fine grid across all pieces
    const double h = 1e-3;
    for (double x = -1.9 + h; x < 1.9 - h; x += h) {
        const double second = d.eval_g(x - h) + d.eval_g(x + h) - 2.0 * d.eval_g(x);
        CHECK(second >= -1e-13);
    }
}

TEST_CASE("g equals G outside [-1/2, 1/2] exactly") {
    DomainSpec d = build_g(0.2, 2);
    for (double x : {0.5, 0.6, 1.0, 1.9, -0.55, -1.3}) {
        CHECK(d.eval_g(x) == eval_G(x, 0)); // same code path, bit-identical
    }
}

TEST_CASE("containment") {
    DomainSpec d = build_g(0.2, 2);
    CHECK(d.contains({0.0, 1.0}));
    CHECK_FALSE(d.contains({0.0, 0.04}));
    CHECK_FALSE(d.contains({0.0, 4.1}));
    CHECK(d.contains({0.0, 0.051}));
    CHECK(d.contains({1.5, 2.5}));
    CHECK_FALSE(d.contains({2.1, 2.0}));
}

TEST_CASE("domain is convex (random midpoints)") {
    DomainSpec d = build_g(0.14, 2);
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(0.0, 4.0);
    int found = 0;
    while (found < 10000) {
        Point a{ux(rng), uy(rng)}, b{ux(rng), uy(rng)};
        if (!d.contains(a) || !d.contains(b)) continue;
        ++found;
        Point mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
        CHECK(d.contains(mid));
    }
}

TEST_CASE("boundary samples trace the boundary with unit normals") {
    DomainSpec d = build_g(0.2, 2);
    auto samples = d.boundary_samples(257);
    CHECK(samples.size() >= 255);
    for (const auto& s : samples) {
        CHECK(std::abs(s.nx * s.nx + s.ny * s.ny - 1.0) < 1e-12);
        // every sample sits on the boundary: either on the graph or on the circle
        const double r = std::hypot(s.p.x, s.p.y - 2.0);
        const bool on_graph =
            std::abs(s.p.x) < 2.0 && std::abs(s.p.y - d.eval_g(s.p.x)) < 1e-9;
        const bool on_circle = std::abs(r - 2.0) < 1e-9;
        CHECK((on_graph || on_circle));
    }
    // flat segment: normal straight down; top of the disk: straight up
    bool saw_flat = false, saw_top = false;
    for (const auto& s : samples) {
        if (std::abs(s.p.x) < 0.19 && std::abs(s.p.y - 0.05) < 1e-9) {
            CHECK(s.nx == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(s.ny == doctest::Approx(-1.0).epsilon(1e-12));
            saw_flat = true;
        }
        if (std::abs(s.p.x) < 0.03 && s.p.y > 3.9) {
            CHECK(std::abs(s.nx) < 0.03);
            CHECK(s.ny > 0.999);
            saw_top = true;
        }
    }
    CHECK(saw_flat);
    CHECK(saw_top);
}

TEST_CASE("bad inputs are rejected") {
    CHECK_THROWS_AS(build_g(0.3, 2), ValidationError);
    CHECK_THROWS_AS(build_g(0.2, 0), ValidationError);
    DomainSpec d = build_g(0.2, 2);
    CHECK_THROWS_AS((void)d.boundary_samples(4), ValidationError);
}
