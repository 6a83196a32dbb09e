#include "doctest.h"

#include <array>
#include <cmath>
#include <vector>

#include "stefanlab/compat.hpp"

using namespace stefanlab;

namespace {

// Exact caloric field (solves u_t = Lap u): sum of exponential modes
// c e^(ax+by+(a^2+b^2)t). Every spatial derivative is available in closed
// form, which makes it the independent oracle for the derived operators.
struct CaloricField {
    struct Mode {
        double c, a, b;
    };
    std::vector<Mode> modes;

    double deriv(int i, int j, double x, double y, double t) const {
        double s = 0.0;
        for (const auto& m : modes)
            s += m.c * std::pow(m.a, i) * std::pow(m.b, j) *
                 std::exp(m.a * x + m.b * y + (m.a * m.a + m.b * m.b) * t);
        return s;
    }

    DerivJet jet(int depth, double x, double y, double t) const {
        DerivJet j(depth);
        for (int i = 0; i <= depth; ++i)
            for (int k = 0; i + k <= depth; ++k) j.set(i, k, deriv(i, k, x, y, t));
        return j;
    }

    std::array<double, 2> grad(double x, double y, double t) const {
        return {deriv(1, 0, x, y, t), deriv(0, 1, x, y, t)};
    }
};

// Transport a point along X'(t) = -grad u(X,t) with classical RK4.
std::array<double, 2> transport(const CaloricField& u, std::array<double, 2> p, double t0,
                                double t1, int nsteps) {
    const double dt = (t1 - t0) / nsteps;
    double t = t0;
    for (int s = 0; s < nsteps; ++s) {
        auto f = [&](std::array<double, 2> q, double tt) {
            auto g = u.grad(q[0], q[1], tt);
            return std::array<double, 2>{-g[0], -g[1]};
        };
        auto k1 = f(p, t);
        auto k2 = f({p[0] + 0.5 * dt * k1[0], p[1] + 0.5 * dt * k1[1]}, t + 0.5 * dt);
        auto k3 = f({p[0] + 0.5 * dt * k2[0], p[1] + 0.5 * dt * k2[1]}, t + 0.5 * dt);
        auto k4 = f({p[0] + dt * k3[0], p[1] + dt * k3[1]}, t + dt);
        p[0] += dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
        p[1] += dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
        t += dt;
    }
    return p;
}

// k-th time derivative at tau = 0 of tau -> u(X(tau), tau) by central
// differences with Richardson extrapolation.
double material_derivative_fd(const CaloricField& u, std::array<double, 2> p0, int k,
                              double tau) {
    auto phi = [&](double t) {
        auto p = transport(u, p0, 0.0, t, std::max(8, static_cast<int>(std::abs(t) / 1e-4)));
        return u.deriv(0, 0, p[0], p[1], t);
    };
    auto stencil = [&](double h) {
        if (k == 1) return (phi(h) - phi(-h)) / (2 * h);
        if (k == 2) return (phi(h) - 2 * phi(0) + phi(-h)) / (h * h);
        // k == 3
        return (phi(2 * h) - 2 * phi(h) + 2 * phi(-h) - phi(-2 * h)) / (2 * h * h * h);
    };
    const double c1 = stencil(tau), c2 = stencil(tau / 2);
    return (4.0 * c2 - c1) / 3.0; // one Richardson level (O(h^2) stencils)
}

bool has_term(const CompatOperator& op, long long num, long long den,
              std::vector<DerivSymbol> factors) {
    for (const auto& t : op.terms()) {
        auto f = factors;
        std::sort(f.begin(), f.end(), [](const DerivSymbol& a, const DerivSymbol& b) {
            if (a.order() != b.order()) return a.order() > b.order();
            return a.dx > b.dx;
        });
        if (t.factors == f && t.coeff == Rational(num, den)) return true;
    }
    return false;
}

} // namespace

TEST_CASE("first compatibility operator is Lap u - |grad u|^2") {
    auto op = derive_compat_operator(1);
    REQUIRE(op.terms().size() == 4);
    CHECK(has_term(op, 1, 1, {{2, 0}}));
    CHECK(has_term(op, 1, 1, {{0, 2}}));
    CHECK(has_term(op, -1, 1, {{1, 0}, {1, 0}}));
    CHECK(has_term(op, -1, 1, {{0, 1}, {0, 1}}));
    CHECK(op.max_order() == 2);
    CHECK(op.leading_is_laplacian_power());
}

TEST_CASE("second compatibility operator matches the expanded form") {
    // Lap^2 u - 3 grad(Lap u).grad u + 2 sum u_ij u_i u_j
    auto op = derive_compat_operator(2);
    REQUIRE(op.terms().size() == 10);
    CHECK(has_term(op, 1, 1, {{4, 0}}));
    CHECK(has_term(op, 2, 1, {{2, 2}}));
    CHECK(has_term(op, 1, 1, {{0, 4}}));
    CHECK(has_term(op, -3, 1, {{3, 0}, {1, 0}}));
    CHECK(has_term(op, -3, 1, {{1, 2}, {1, 0}}));
    CHECK(has_term(op, -3, 1, {{2, 1}, {0, 1}}));
    CHECK(has_term(op, -3, 1, {{0, 3}, {0, 1}}));
    CHECK(has_term(op, 2, 1, {{2, 0}, {1, 0}, {1, 0}}));
    CHECK(has_term(op, 4, 1, {{1, 1}, {1, 0}, {0, 1}}));
    CHECK(has_term(op, 2, 1, {{0, 2}, {0, 1}, {0, 1}}));
    CHECK(op.max_order() == 4);
    CHECK(op.leading_is_laplacian_power());
}

TEST_CASE("operator text form is deterministic (golden)") {
    CHECK(derive_compat_operator(1).to_string() ==
          "1*u_{xx} + 1*u_{yy} - 1*u_x\xC2\xB7u_x - 1*u_y\xC2\xB7u_y");
    CHECK(derive_compat_operator(2).to_string() ==
          "1*u_{xxxx} + 2*u_{xxyy} + 1*u_{yyyy}"
          " - 3*u_{xxx}\xC2\xB7u_x - 3*u_{xxy}\xC2\xB7u_y - 3*u_{xyy}\xC2\xB7u_x - 3*u_{yyy}\xC2\xB7u_y"
          " + 2*u_{xx}\xC2\xB7u_x\xC2\xB7u_x + 4*u_{xy}\xC2\xB7u_x\xC2\xB7u_y + 2*u_{yy}\xC2\xB7u_y\xC2\xB7u_y");
}

TEST_CASE("evaluate on hand-built jets") {
    auto op1 = derive_compat_operator(1);
    DerivJet j(2);
    j.set(1, 0, 1.0);
    j.set(2, 0, 1.0);
    j.set(0, 2, 1.0);
    CHECK(op1.evaluate(j) == doctest::Approx(1.0)); // 2 - 1

    auto op2 = derive_compat_operator(2);
    DerivJet j2(4);
    j2.set(1, 0, 1.0);
    j2.set(2, 0, 1.0);
    j2.set(1, 1, 1.0);
    j2.set(0, 2, 1.0);
    CHECK(op2.evaluate(j2) == doctest::Approx(2.0)); // hand-expanded: 0 - 0 + 2

    DerivJet shallow(1);
    CHECK_THROWS_AS((void)op1.evaluate(shallow), DepthError);
}

TEST_CASE("orders and leading structure for k = 3, 4") {
    for (int k : {3, 4}) {
        auto op = derive_compat_operator(k);
        CHECK(op.max_order() == 2 * k);
        CHECK(op.leading_is_laplacian_power());
        for (const auto& t : op.terms()) {
            int top = 0;
            for (const auto& s : t.factors) top = std::max(top, s.order());
            if (top == 2 * k) CHECK(t.factors.size() == 1);
        }
    }
}

TEST_CASE("term cap raises a resource error") {
    CHECK_THROWS_AS(derive_compat_operator(4, 10), ResourceError);
}

TEST_CASE("manufactured caloric solution oracle for k <= 3") {
    CaloricField u;
    u.modes = {{0.7, 0.4, -0.3}, {-0.2, -0.5, 0.6}, {0.35, 0.1, 0.8}};
    const std::array<double, 2> p0 = {0.3, -0.2};
    // evaluate(op_k, jet at (p0, 0)) equals the k-th time derivative of
    // u along the transported path.
    for (int k : {1, 2, 3}) {
        auto op = derive_compat_operator(k);
        const double lhs = op.evaluate(u.jet(2 * k, p0[0], p0[1], 0.0));
        const double rhs = material_derivative_fd(u, p0, k, k == 3 ? 0.02 : 0.005);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
}
