#pragma once

#include <mindeg/rational.hpp>

#include <compare>
#include <string>

namespace mindeg {

// Q(sqrt(D)) for squarefree D > 1: values a + b*sqrt(D) with exact rational
// coordinates. Enough field structure for symbolic singularity work where
// sigma = 5 - 2*sqrt(6) and friends must stay exact.
template <int D>
struct Quad {
    Rational a, b;

    Quad() = default;
    Quad(Rational a_, Rational b_ = Rational(0)) : a(std::move(a_)), b(std::move(b_)) {}
    Quad(long v) : a(v), b(0) {}

    static Quad sqrt_d() { return Quad(Rational(0), Rational(1)); }

    friend Quad operator+(const Quad& x, const Quad& y) { return Quad(x.a + y.a, x.b + y.b); }
    friend Quad operator-(const Quad& x, const Quad& y) { return Quad(x.a - y.a, x.b - y.b); }
    friend Quad operator-(const Quad& x) { return Quad(-x.a, -x.b); }
    friend Quad operator*(const Quad& x, const Quad& y) {
        return Quad(x.a * y.a + Rational(D) * x.b * y.b, x.a * y.b + x.b * y.a);
    }
    friend Quad operator/(const Quad& x, const Quad& y) {
        Rational n = y.a * y.a - Rational(D) * y.b * y.b;  // field norm of conjugate pair
        if (n == 0) throw error("Quad: division by zero");
        Quad conj(y.a, -y.b);
        Quad p = x * conj;
        return Quad(p.a / n, p.b / n);
    }
    Quad& operator+=(const Quad& y) { return *this = *this + y; }
    Quad& operator-=(const Quad& y) { return *this = *this - y; }
    Quad& operator*=(const Quad& y) { return *this = *this * y; }
    Quad& operator/=(const Quad& y) { return *this = *this / y; }

    friend bool operator==(const Quad& x, const Quad& y) { return x.a == y.a && x.b == y.b; }

    bool is_zero() const { return a == 0 && b == 0; }

    // sign of a + b*sqrt(D), exactly
    int sign() const {
        int sa = sgn(a), sb = sgn(b);
        if (sb == 0) return sa;
        if (sa == 0) return sb;
        if (sa == sb) return sa;
        // opposite signs: compare a^2 with D b^2
        Rational lhs = a * a, rhs = Rational(D) * b * b;
        int c = cmp(lhs, rhs);
        if (c == 0) return 0;
        return (c > 0) ? sa : sb;
    }
};

template <int D>
std::string to_string(const Quad<D>& q) {
    if (q.b == 0) return q.a.get_str();
    return q.a.get_str() + " + (" + q.b.get_str() + ")*sqrt(" + std::to_string(D) + ")";
}

using Quad6 = Quad<6>;

}  // namespace mindeg
