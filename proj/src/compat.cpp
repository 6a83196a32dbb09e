#include "stefanlab/compat.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace stefanlab {

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den < 0) { num = -num; den = -den; }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
}

Rational Rational::operator+(const Rational& o) const {
    return Rational(num * o.den + o.num * den, den * o.den);
}

Rational Rational::operator*(const Rational& o) const {
    return Rational(num * o.num, den * o.den);
}

namespace {

// Symbols ordered x-heavy first within equal total order; higher order first.
bool symbol_less(const DerivSymbol& a, const DerivSymbol& b) {
    if (a.order() != b.order()) return a.order() > b.order();
    return a.dx > b.dx;
}

bool factors_less(const std::vector<DerivSymbol>& a, const std::vector<DerivSymbol>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        symbol_less);
}

int max_factor_order(const std::vector<DerivSymbol>& f) {
    int m = 0;
    for (const auto& s : f) m = std::max(m, s.order());
    return m;
}

// Canonical term order: leading (high-order) parts first, fewer factors first,
// then lexicographic on the sorted factor lists.
bool term_less(const CompatTerm& a, const CompatTerm& b) {
    const int ma = max_factor_order(a.factors), mb = max_factor_order(b.factors);
    if (ma != mb) return ma > mb;
    if (a.factors.size() != b.factors.size()) return a.factors.size() < b.factors.size();
    return factors_less(a.factors, b.factors);
}

std::vector<CompatTerm> collect(std::vector<CompatTerm> terms) {
    for (auto& t : terms) std::sort(t.factors.begin(), t.factors.end(), symbol_less);
    std::sort(terms.begin(), terms.end(), term_less);
    std::vector<CompatTerm> out;
    for (auto& t : terms) {
        if (!out.empty() && out.back().factors == t.factors)
            out.back().coeff = out.back().coeff + t.coeff;
        else
            out.push_back(std::move(t));
        if (!out.empty() && out.back().coeff.is_zero()) out.pop_back();
    }
    return out;
}

// Material derivative of a single symbol: d/dt D^b u along X'(t) = -grad u
// with u_t = Lap u, i.e. D^b Lap u - sum_i D^(e_i) u * D^(b+e_i) u.
// Returned as terms to splice in place of the factor.
std::vector<CompatTerm> symbol_rate(const DerivSymbol& s) {
    std::vector<CompatTerm> out;
    out.push_back({Rational(1), {DerivSymbol{s.dx + 2, s.dy}}});
    out.push_back({Rational(1), {DerivSymbol{s.dx, s.dy + 2}}});
    out.push_back({Rational(-1), {DerivSymbol{1, 0}, DerivSymbol{s.dx + 1, s.dy}}});
    out.push_back({Rational(-1), {DerivSymbol{0, 1}, DerivSymbol{s.dx, s.dy + 1}}});
    return out;
}

} // namespace

CompatOperator::CompatOperator(int order, std::vector<CompatTerm> terms)
    : order_(order), terms_(collect(std::move(terms))) {}

int CompatOperator::max_order() const {
    int m = 0;
    for (const auto& t : terms_) m = std::max(m, max_factor_order(t.factors));
    return m;
}

bool CompatOperator::leading_is_laplacian_power() const {
    const int k = order_;
    // Expected: binom(k, j) * d^(2j, 2k-2j) u, single factor each.
    std::map<std::pair<int, int>, Rational> expected;
    long long binom = 1;
    for (int j = 0; j <= k; ++j) {
        expected[{2 * (k - j), 2 * j}] = Rational(binom);
        binom = binom * (k - j) / (j + 1);
    }
    std::map<std::pair<int, int>, Rational> got;
    for (const auto& t : terms_) {
        bool has_top = false;
        for (const auto& s : t.factors)
            if (s.order() == 2 * k) has_top = true;
        if (!has_top) continue;
        if (t.factors.size() != 1) return false; // order-2k factor with company
        got[{t.factors[0].dx, t.factors[0].dy}] = t.coeff;
    }
    return got == expected;
}

double CompatOperator::evaluate(const DerivJet& jet) const {
    double sum = 0.0;
    for (const auto& t : terms_) {
        double prod = t.coeff.to_double();
        for (const auto& s : t.factors) prod *= jet.at(s.dx, s.dy);
        sum += prod;
    }
    return sum;
}

std::string CompatOperator::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
        const bool neg = t.coeff.num < 0;
        long long n = neg ? -t.coeff.num : t.coeff.num;
        if (first) {
            if (neg) os << "-";
            first = false;
        } else {
            os << (neg ? " - " : " + ");
        }
        os << n;
        if (t.coeff.den != 1) os << "/" << t.coeff.den;
        os << "*";
        for (size_t i = 0; i < t.factors.size(); ++i) {
            if (i) os << "\xC2\xB7"; // middle dot
            const auto& s = t.factors[i];
            std::string name(static_cast<size_t>(s.dx), 'x');
            name.append(static_cast<size_t>(s.dy), 'y');
            if (name.size() == 1)
                os << "u_" << name;
            else
                os << "u_{" << name << "}";
        }
    }
    return os.str();
}

CompatOperator derive_compat_operator(int k, size_t term_cap) {
    if (k < 1) throw ValidationError("compatibility order k must be >= 1");
    // Start from the field itself and apply the material derivative k times.
    std::vector<CompatTerm> cur;
    cur.push_back({Rational(1), {DerivSymbol{0, 0}}});
    for (int step = 0; step < k; ++step) {
        std::vector<CompatTerm> next;
        for (const auto& term : cur) {
            for (size_t f = 0; f < term.factors.size(); ++f) {
                for (const auto& repl : symbol_rate(term.factors[f])) {
                    CompatTerm t;
                    t.coeff = term.coeff * repl.coeff;
                    t.factors.reserve(term.factors.size() - 1 + repl.factors.size());
                    for (size_t g = 0; g < term.factors.size(); ++g)
                        if (g != f) t.factors.push_back(term.factors[g]);
                    for (const auto& s : repl.factors) t.factors.push_back(s);
                    next.push_back(std::move(t));
                    if (next.size() > term_cap)
                        throw ResourceError("compat derivation exceeded term cap");
                }
            }
        }
        cur = collect(std::move(next));
        if (cur.size() > term_cap)
            throw ResourceError("compat derivation exceeded term cap");
    }
    return CompatOperator(k, std::move(cur));
}

} // namespace stefanlab
