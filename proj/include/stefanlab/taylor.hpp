#pragma once

// Dense truncated Taylor series in one and two variables. These carry exact
// derivative information through every composition in the initial-data
// construction, so jets never rely on finite differences.

#include <cassert>
#include <cstddef>
#include <vector>

namespace stefanlab {

/// Truncated univariate Taylor series around a base point: sum c[n] * dx^n,
/// n = 0..deg. The base point itself is not stored.
class Series1 {
public:
    Series1() = default;
    Series1(int deg, double c0) : c_(static_cast<size_t>(deg) + 1, 0.0) { c_[0] = c0; }
    static Series1 variable(int deg, double x0); // x0 + dx
    static Series1 constant(int deg, double v) { return Series1(deg, v); }

    int deg() const { return static_cast<int>(c_.size()) - 1; }
    double& operator[](int n) { return c_[static_cast<size_t>(n)]; }
    double operator[](int n) const { return c_[static_cast<size_t>(n)]; }
    const std::vector<double>& coeffs() const { return c_; }

    Series1 truncated(int deg) const;

    Series1 operator-() const;
    Series1 operator+(const Series1& o) const;
    Series1 operator-(const Series1& o) const;
    Series1 operator*(const Series1& o) const;
    Series1 operator+(double s) const;
    Series1 operator-(double s) const;
    Series1 operator*(double s) const;

    /// d/dx, degree drops by one.
    Series1 derivative() const;

    /// n-th derivative value at the base point (coefficient times n!).
    double deriv(int n) const;

    /// Evaluate at an offset dx from the base point.
    double eval(double dx) const;

private:
    std::vector<double> c_;
};

Series1 operator*(double s, const Series1& a);
Series1 operator+(double s, const Series1& a);

/// phi(series), where derivs[m] = phi^(m)(a0) at the series constant term a0.
/// Exact for truncated series since (A - a0)^m has no terms below order m.
Series1 compose_analytic(const Series1& a, const std::vector<double>& derivs);

Series1 series_sqrt(const Series1& a);
Series1 series_recip(const Series1& a);
Series1 series_exp(const Series1& a);
Series1 series_log(const Series1& a);
Series1 series_pow(const Series1& a, double p);

/// Substitute one series into another: f given by coefficients around g's
/// constant term, i.e. result = sum f[m] * (g - g0)^m.
Series1 series_compose(const Series1& f, const Series1& g);

/// Truncated bivariate Taylor series: sum c[i,j] * dx^i * dy^j over i+j <= deg.
class Series2 {
public:
    Series2() = default;
    Series2(int deg, double c0);
    static Series2 variable_x(int deg, double x0);
    static Series2 variable_y(int deg, double y0);
    static Series2 constant(int deg, double v) { return Series2(deg, v); }

    int deg() const { return deg_; }
    double at(int i, int j) const { return c_[idx(i, j)]; }
    double& at(int i, int j) { return c_[idx(i, j)]; }

    Series2 truncated(int deg) const;

    Series2 operator-() const;
    Series2 operator+(const Series2& o) const;
    Series2 operator-(const Series2& o) const;
    Series2 operator*(const Series2& o) const;
    Series2 operator+(double s) const;
    Series2 operator*(double s) const;

    Series2 dx() const; ///< partial derivative in the first variable
    Series2 dy() const; ///< partial derivative in the second variable

    /// Value of the mixed partial d^(i+j) / dx^i dy^j at the base point.
    double deriv(int i, int j) const;

    double eval(double dxv, double dyv) const;

    /// Lift a univariate series in x (resp. y) to a bivariate one.
    static Series2 from_x(const Series1& a, int deg);
    static Series2 from_y(const Series1& a, int deg);

    /// Restrict to the curve dy = g(dx), g a univariate series with g[0] = 0.
    Series1 substitute_y(const Series1& g) const;

    /// Substitute the second variable: F(dx, B(dx, dy)), B with zero constant.
    Series2 substitute_y2(const Series2& B) const;

private:
    size_t idx(int i, int j) const {
        assert(i >= 0 && j >= 0 && i + j <= deg_);
        // row offset for total-degree storage by x-power i: entries (i, 0..deg-i)
        return static_cast<size_t>(i) * (2 * deg_ + 3 - i) / 2 + static_cast<size_t>(j);
    }
    int deg_ = 0;
    std::vector<double> c_;
};

Series2 operator*(double s, const Series2& a);

Series2 compose_analytic(const Series2& a, const std::vector<double>& derivs);
Series2 series_sqrt(const Series2& a);
Series2 series_recip(const Series2& a);
Series2 series_exp(const Series2& a);
Series2 series_log(const Series2& a);
Series2 series_pow(const Series2& a, double p);

/// Derivative lists phi^(m)(a0) for the standard unary functions, m = 0..deg.
std::vector<double> derivs_sqrt(double a0, int deg);
std::vector<double> derivs_recip(double a0, int deg);
std::vector<double> derivs_exp(double a0, int deg);
std::vector<double> derivs_log(double a0, int deg);
std::vector<double> derivs_pow(double a0, double p, int deg);

} // namespace stefanlab
