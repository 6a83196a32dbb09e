#include "stefanlab/taylor.hpp"

#include <cmath>
#include <stdexcept>

namespace stefanlab {

// ---------------------------------------------------------------------------
// Series1

Series1 Series1::variable(int deg, double x0) {
    Series1 s(deg, x0);
    if (deg >= 1) s[1] = 1.0;
    return s;
}

Series1 Series1::truncated(int deg) const {
    Series1 r(deg, 0.0);
    const int n = std::min(deg, this->deg());
    for (int i = 0; i <= n; ++i) r[i] = c_[static_cast<size_t>(i)];
    return r;
}

Series1 Series1::operator-() const {
    Series1 r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
}

Series1 Series1::operator+(const Series1& o) const {
    assert(deg() == o.deg());
    Series1 r = *this;
    for (int i = 0; i <= deg(); ++i) r[i] += o[i];
    return r;
}

Series1 Series1::operator-(const Series1& o) const {
    assert(deg() == o.deg());
    Series1 r = *this;
    for (int i = 0; i <= deg(); ++i) r[i] -= o[i];
    return r;
}

Series1 Series1::operator*(const Series1& o) const {
    assert(deg() == o.deg());
    Series1 r(deg(), 0.0);
    for (int i = 0; i <= deg(); ++i) {
        const double a = c_[static_cast<size_t>(i)];
        if (a == 0.0) continue;
        for (int j = 0; i + j <= deg(); ++j) r[i + j] += a * o[j];
    }
    return r;
}

Series1 Series1::operator+(double s) const {
    Series1 r = *this;
    r[0] += s;
    return r;
}

Series1 Series1::operator-(double s) const {
    Series1 r = *this;
    r[0] -= s;
    return r;
}

Series1 Series1::operator*(double s) const {
    Series1 r = *this;
    for (auto& v : r.c_) v *= s;
    return r;
}

Series1 Series1::derivative() const {
    if (deg() == 0) return Series1(0, 0.0);
    Series1 r(deg() - 1, 0.0);
    for (int i = 1; i <= deg(); ++i) r[i - 1] = i * c_[static_cast<size_t>(i)];
    return r;
}

double Series1::deriv(int n) const {
    if (n > deg()) throw std::out_of_range("Series1::deriv: order beyond truncation");
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return c_[static_cast<size_t>(n)] * f;
}

double Series1::eval(double dx) const {
    double r = 0.0;
    for (int i = deg(); i >= 0; --i) r = r * dx + c_[static_cast<size_t>(i)];
    return r;
}

Series1 operator*(double s, const Series1& a) { return a * s; }
Series1 operator+(double s, const Series1& a) { return a + s; }

Series1 compose_analytic(const Series1& a, const std::vector<double>& derivs) {
    const int deg = a.deg();
    assert(static_cast<int>(derivs.size()) >= deg + 1);
    Series1 u = a; // a - a0, no constant term
    u[0] = 0.0;
    Series1 r(deg, derivs[0]);
    Series1 upow(deg, 1.0);
    double fact = 1.0;
    for (int m = 1; m <= deg; ++m) {
        upow = upow * u;
        fact *= m;
        const double cm = derivs[static_cast<size_t>(m)] / fact;
        if (cm == 0.0) continue;
        for (int i = m; i <= deg; ++i) r[i] += cm * upow[i];
    }
    return r;
}

std::vector<double> derivs_sqrt(double a0, int deg) {
    // f = a^(1/2), f^(m) = (1/2)(1/2-1)...(1/2-m+1) a0^(1/2-m)
    std::vector<double> d(static_cast<size_t>(deg) + 1);
    d[0] = std::sqrt(a0);
    double coef = 1.0;
    for (int m = 1; m <= deg; ++m) {
        coef *= 0.5 - (m - 1);
        d[static_cast<size_t>(m)] = coef * std::pow(a0, 0.5 - m);
    }
    return d;
}

std::vector<double> derivs_recip(double a0, int deg) {
    // f = a^-1, f^(m) = (-1)^m m! a0^-(m+1)
    std::vector<double> d(static_cast<size_t>(deg) + 1);
    d[0] = 1.0 / a0;
    double mfact = 1.0;
    for (int m = 1; m <= deg; ++m) {
        mfact *= m;
        d[static_cast<size_t>(m)] = ((m % 2) ? -1.0 : 1.0) * mfact * std::pow(a0, -(m + 1.0));
    }
    return d;
}

std::vector<double> derivs_exp(double a0, int deg) {
    std::vector<double> d(static_cast<size_t>(deg) + 1, std::exp(a0));
    return d;
}

std::vector<double> derivs_log(double a0, int deg) {
    std::vector<double> d(static_cast<size_t>(deg) + 1);
    d[0] = std::log(a0);
    double mfact = 1.0;
    for (int m = 1; m <= deg; ++m) {
        if (m > 1) mfact *= (m - 1);
        d[static_cast<size_t>(m)] = ((m % 2) ? 1.0 : -1.0) * mfact * std::pow(a0, -static_cast<double>(m));
    }
    return d;
}

std::vector<double> derivs_pow(double a0, double p, int deg) {
    std::vector<double> d(static_cast<size_t>(deg) + 1);
    d[0] = std::pow(a0, p);
    double coef = 1.0;
    for (int m = 1; m <= deg; ++m) {
        coef *= p - (m - 1);
        d[static_cast<size_t>(m)] = coef * std::pow(a0, p - m);
    }
    return d;
}

Series1 series_sqrt(const Series1& a) { return compose_analytic(a, derivs_sqrt(a[0], a.deg())); }
Series1 series_recip(const Series1& a) { return compose_analytic(a, derivs_recip(a[0], a.deg())); }
Series1 series_exp(const Series1& a) { return compose_analytic(a, derivs_exp(a[0], a.deg())); }
Series1 series_log(const Series1& a) { return compose_analytic(a, derivs_log(a[0], a.deg())); }
Series1 series_pow(const Series1& a, double p) { return compose_analytic(a, derivs_pow(a[0], p, a.deg())); }

Series1 series_compose(const Series1& f, const Series1& g) {
    // derivs[m] = f^(m)(g0) = f[m] * m!
    std::vector<double> derivs(static_cast<size_t>(g.deg()) + 1, 0.0);
    double fact = 1.0;
    for (int m = 0; m <= g.deg(); ++m) {
        if (m >= 2) fact *= m;
        derivs[static_cast<size_t>(m)] = (m <= f.deg()) ? f[m] * fact : 0.0;
    }
    return compose_analytic(g, derivs);
}

// ---------------------------------------------------------------------------
// Series2

Series2::Series2(int deg, double c0) : deg_(deg) {
    c_.assign(static_cast<size_t>(deg + 1) * (deg + 2) / 2, 0.0);
    c_[0] = c0;
}

Series2 Series2::variable_x(int deg, double x0) {
    Series2 s(deg, x0);
    if (deg >= 1) s.at(1, 0) = 1.0;
    return s;
}

Series2 Series2::variable_y(int deg, double y0) {
    Series2 s(deg, y0);
    if (deg >= 1) s.at(0, 1) = 1.0;
    return s;
}

Series2 Series2::truncated(int deg) const {
    Series2 r(deg, 0.0);
    const int n = std::min(deg, deg_);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j) r.at(i, j) = at(i, j);
    return r;
}

Series2 Series2::operator-() const {
    Series2 r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
}

Series2 Series2::operator+(const Series2& o) const {
    assert(deg_ == o.deg_);
    Series2 r = *this;
    for (size_t k = 0; k < c_.size(); ++k) r.c_[k] += o.c_[k];
    return r;
}

Series2 Series2::operator-(const Series2& o) const {
    assert(deg_ == o.deg_);
    Series2 r = *this;
    for (size_t k = 0; k < c_.size(); ++k) r.c_[k] -= o.c_[k];
    return r;
}

Series2 Series2::operator*(const Series2& o) const {
    assert(deg_ == o.deg_);
    Series2 r(deg_, 0.0);
    for (int i = 0; i <= deg_; ++i) {
        for (int j = 0; i + j <= deg_; ++j) {
            const double a = at(i, j);
            if (a == 0.0) continue;
            const int rem = deg_ - i - j;
            for (int p = 0; p <= rem; ++p)
                for (int q = 0; p + q <= rem; ++q) r.at(i + p, j + q) += a * o.at(p, q);
        }
    }
    return r;
}

Series2 Series2::operator+(double s) const {
    Series2 r = *this;
    r.c_[0] += s;
    return r;
}

Series2 Series2::operator*(double s) const {
    Series2 r = *this;
    for (auto& v : r.c_) v *= s;
    return r;
}

Series2 Series2::dx() const {
    if (deg_ == 0) return Series2(0, 0.0);
    Series2 r(deg_ - 1, 0.0);
    for (int i = 1; i <= deg_; ++i)
        for (int j = 0; i + j <= deg_; ++j) r.at(i - 1, j) = i * at(i, j);
    return r;
}

Series2 Series2::dy() const {
    if (deg_ == 0) return Series2(0, 0.0);
    Series2 r(deg_ - 1, 0.0);
    for (int i = 0; i <= deg_ - 1; ++i)
        for (int j = 1; i + j <= deg_; ++j) r.at(i, j - 1) = j * at(i, j);
    return r;
}

double Series2::deriv(int i, int j) const {
    if (i + j > deg_) throw std::out_of_range("Series2::deriv: order beyond truncation");
    double f = 1.0;
    for (int m = 2; m <= i; ++m) f *= m;
    for (int m = 2; m <= j; ++m) f *= m;
    return at(i, j) * f;
}

double Series2::eval(double dxv, double dyv) const {
    double r = 0.0;
    for (int i = deg_; i >= 0; --i) {
        double row = 0.0;
        for (int j = deg_ - i; j >= 0; --j) row = row * dyv + at(i, j);
        r = r * dxv + row;
    }
    return r;
}

Series2 Series2::from_x(const Series1& a, int deg) {
    Series2 r(deg, 0.0);
    for (int i = 0; i <= std::min(deg, a.deg()); ++i) r.at(i, 0) = a[i];
    return r;
}

Series2 Series2::from_y(const Series1& a, int deg) {
    Series2 r(deg, 0.0);
    for (int j = 0; j <= std::min(deg, a.deg()); ++j) r.at(0, j) = a[j];
    return r;
}

Series1 Series2::substitute_y(const Series1& g) const {
    assert(g[0] == 0.0);
    const int deg = deg_;
    Series1 gl = g.truncated(deg);
    // Horner in powers of g: r = sum_j row_j(x) g^j
    Series1 r(deg, 0.0);
    for (int j = deg; j >= 0; --j) {
        Series1 row(deg, 0.0);
        for (int i = 0; i + j <= deg; ++i) row[i] = at(i, j);
        r = r * gl + row;
    }
    return r;
}

Series2 Series2::substitute_y2(const Series2& B) const {
    assert(B.at(0, 0) == 0.0);
    const int deg = deg_;
    Series2 Bl = B.truncated(deg);
    Series2 r(deg, 0.0);
    for (int j = deg; j >= 0; --j) {
        Series2 row(deg, 0.0);
        for (int i = 0; i + j <= deg; ++i) row.at(i, 0) = at(i, j);
        r = r * Bl + row;
    }
    return r;
}

Series2 operator*(double s, const Series2& a) { return a * s; }

Series2 compose_analytic(const Series2& a, const std::vector<double>& derivs) {
    const int deg = a.deg();
    assert(static_cast<int>(derivs.size()) >= deg + 1);
    Series2 u = a;
    u.at(0, 0) = 0.0;
    Series2 r(deg, derivs[0]);
    Series2 upow(deg, 1.0);
    double fact = 1.0;
    for (int m = 1; m <= deg; ++m) {
        upow = upow * u;
        fact *= m;
        const double cm = derivs[static_cast<size_t>(m)] / fact;
        if (cm == 0.0) continue;
        r = r + upow * cm;
    }
    return r;
}

Series2 series_sqrt(const Series2& a) { return compose_analytic(a, derivs_sqrt(a.at(0, 0), a.deg())); }
Series2 series_recip(const Series2& a) { return compose_analytic(a, derivs_recip(a.at(0, 0), a.deg())); }
Series2 series_exp(const Series2& a) { return compose_analytic(a, derivs_exp(a.at(0, 0), a.deg())); }
Series2 series_log(const Series2& a) { return compose_analytic(a, derivs_log(a.at(0, 0), a.deg())); }
Series2 series_pow(const Series2& a, double p) { return compose_analytic(a, derivs_pow(a.at(0, 0), p, a.deg())); }

} // namespace stefanlab
