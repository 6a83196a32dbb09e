#pragma once

// Formal derivation and evaluation of the boundary compatibility conditions
// for the one-phase Stefan problem. The k-th condition is a polynomial in
// spatial derivative symbols of the initial field; its leading part is the
// k-fold Laplacian and every other factor has order at most 2k-1.

#include <cstdint>
#include <string>
#include <vector>

#include "stefanlab/jet.hpp"

namespace stefanlab {

/// One spatial derivative factor d^(dx+dy) u / dx^dx dy^dy.
struct DerivSymbol {
    int dx = 0;
    int dy = 0;
    int order() const { return dx + dy; }
    friend auto operator<=>(const DerivSymbol&, const DerivSymbol&) = default;
};

/// Exact rational coefficient. Stays integral through the derivation rules,
/// but keep the denominator for safety.
struct Rational {
    long long num = 0;
    long long den = 1;
    Rational() = default;
    Rational(long long n) : num(n) {}
    Rational(long long n, long long d);
    Rational operator+(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    bool is_zero() const { return num == 0; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

/// coefficient * product of derivative symbols (kept sorted).
struct CompatTerm {
    Rational coeff;
    std::vector<DerivSymbol> factors;
};

class CompatOperator {
public:
    CompatOperator() = default;
    CompatOperator(int order, std::vector<CompatTerm> terms);

    int order() const { return order_; }
    const std::vector<CompatTerm>& terms() const { return terms_; }

    /// Max derivative order over all factors (2k for the k-th condition).
    int max_order() const;

    /// True when the order-2k part is exactly the binomial expansion of the
    /// k-fold Laplacian with unit coefficient.
    bool leading_is_laplacian_power() const;

    double evaluate(const DerivJet& jet) const;

    /// Deterministic text form for golden tests.
    std::string to_string() const;

private:
    int order_ = 0;
    std::vector<CompatTerm> terms_;
};

/// Derive the k-th compatibility residual (k >= 1). Throws ResourceError if
/// the term count exceeds term_cap during the derivation.
CompatOperator derive_compat_operator(int k, size_t term_cap = 100000);

} // namespace stefanlab
