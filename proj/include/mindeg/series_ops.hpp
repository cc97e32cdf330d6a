#pragma once

#include <mindeg/series.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mindeg {

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

template <typename K>
struct Substitution {
    std::string var;          // outer variable being replaced
    Series<K> value;
    // Permit a nonzero constant term. Only sound when the outer series is an
    // honest polynomial in `var` through its cap (no truncation happened
    // there); the caller asserts that.
    bool allow_constant = false;
};

// Substitute series for variables of `outer`. Unsubstituted variables pass
// through and must exist in the unified target shape. Terms whose substituted
// valuation already exceeds the target caps are pruned before any
// multiplication happens; that prune is also what makes composition with a
// truncated family of inner series auditable (see multigraph_kernel).
template <typename K>
Series<K> compose(const Series<K>& outer, std::vector<Substitution<K>> subs) {
    const Shape& osh = outer.shape();
    // target shape: unify all substituted values, then add passthrough vars
    std::optional<Shape> tgt;
    for (const Substitution<K>& s : subs)
        tgt = tgt ? unify(*tgt, s.value.shape()) : s.value.shape();
    std::vector<int> sub_of(osh.vars.size(), -1);
    for (std::size_t k = 0; k < subs.size(); ++k) {
        int i = osh.index_of(subs[k].var);
        if (i < 0) throw error("compose: outer has no variable '" + subs[k].var + "'");
        sub_of[static_cast<std::size_t>(i)] = static_cast<int>(k);
    }
    Shape pass;  // passthrough variables, as monomials over the target shape
    for (std::size_t i = 0; i < osh.vars.size(); ++i)
        if (sub_of[i] < 0) pass.vars.push_back(osh.vars[i]);
    if (!pass.vars.empty()) tgt = tgt ? unify(*tgt, pass) : pass;
    if (!tgt) return Series<K>::zero(osh);
    const Shape& sh = *tgt;

    // realize every outer variable as a series over the target shape
    std::vector<Series<K>> inner;
    inner.reserve(osh.vars.size());
    for (std::size_t i = 0; i < osh.vars.size(); ++i) {
        if (sub_of[i] >= 0)
            inner.push_back(subs[static_cast<std::size_t>(sub_of[i])].value.retruncate(sh));
        else
            inner.push_back(Series<K>::monomial(sh, osh.vars[i].name));
    }

    // constant-term checks and per-target-variable valuation vectors
    std::vector<std::array<int, kMaxVars>> val(osh.vars.size());
    std::vector<long> wval(osh.vars.size(), 0);
    for (std::size_t i = 0; i < osh.vars.size(); ++i) {
        bool allow = sub_of[i] >= 0 && subs[static_cast<std::size_t>(sub_of[i])].allow_constant;
        if (sub_of[i] >= 0 && !allow &&
            !field_ops<K>::is_zero(inner[i].constant_term()))
            throw error("compose: inner series for '" + osh.vars[i].name +
                        "' has a nonzero constant term");
        val[i].fill(0);
        for (std::size_t j = 0; j < sh.vars.size(); ++j) {
            int m = inner[i].min_degree(j);
            val[i][j] = inner[i].is_zero() ? 1 << 20 : m;
        }
        long w = 1 << 20;
        for (const auto& t : inner[i].terms()) {
            long tw = 0;
            for (std::size_t j = 0; j < sh.vars.size(); ++j)
                if (sh.vars[j].weight) tw += static_cast<long>(sh.vars[j].weight) * t.e[j];
            w = std::min(w, tw);
        }
        wval[i] = inner[i].is_zero() ? 1 << 20 : w;
    }

    // power cache per outer variable
    std::vector<std::vector<Series<K>>> pows(osh.vars.size());
    auto power = [&](std::size_t i, int e) -> const Series<K>& {
        auto& pv = pows[i];
        if (pv.empty()) pv.push_back(Series<K>::constant(sh, K(1)));
        while (static_cast<int>(pv.size()) <= e) pv.push_back(pv.back() * inner[i]);
        return pv[static_cast<std::size_t>(e)];
    };

    // terms in lex order share prefixes; keep a stack of partial products
    Series<K> result(sh);
    std::vector<Series<K>> prefix;  // prefix[d] = product over first d+1 vars of current term
    Exponents prev{};
    bool have_prev = false;
    for (const auto& t : outer.terms()) {
        // prune by substituted valuation
        bool dead = false;
        long wsum = 0;
        for (std::size_t j = 0; j < sh.vars.size() && !dead; ++j) {
            long lo = 0;
            for (std::size_t i = 0; i < osh.vars.size(); ++i)
                lo += static_cast<long>(t.e[i]) * val[i][j];
            if (sh.vars[j].cap >= 0 && lo > sh.vars[j].cap) dead = true;
        }
        for (std::size_t i = 0; i < osh.vars.size(); ++i)
            wsum += static_cast<long>(t.e[i]) * wval[i];
        if (sh.weighted_cap >= 0 && wsum > sh.weighted_cap) dead = true;
        if (dead) continue;

        std::size_t keep = 0;
        if (have_prev) {
            while (keep < osh.vars.size() && prev[keep] == t.e[keep]) ++keep;
        }
        prefix.resize(std::min(prefix.size(), keep));
        for (std::size_t i = prefix.size(); i < osh.vars.size(); ++i) {
            const Series<K>& p = power(i, t.e[i]);
            if (prefix.empty())
                prefix.push_back(p);
            else
                prefix.push_back(prefix.back() * p);
        }
        result += prefix.back() * t.c;
        prev = t.e;
        have_prev = true;
    }
    return result;
}

template <typename K>
Series<K> compose(const Series<K>& outer, const std::string& var, const Series<K>& value) {
    return compose(outer, std::vector<Substitution<K>>{{var, value, false}});
}

// ---------------------------------------------------------------------------
// Elementary functions (termwise-exact through the truncation)
// ---------------------------------------------------------------------------

template <typename K>
Series<K> exp_series(const Series<K>& f) {
    if (!field_ops<K>::is_zero(f.constant_term()))
        throw error("exp: nonzero constant term");
    Series<K> acc = Series<K>::constant(f.shape(), K(1));
    Series<K> p = Series<K>::constant(f.shape(), K(1));
    for (unsigned long k = 1;; ++k) {
        p = p * f;
        if (p.is_zero()) break;
        acc += p * field_ops<K>::from_rational(Rational(1) / Rational(factorial(k)));
    }
    return acc;
}

template <typename K>
Series<K> log_series(const Series<K>& f) {
    if (!(f.constant_term() == K(1))) throw error("log: constant term must be 1");
    Series<K> g = f - Series<K>::constant(f.shape(), K(1));
    Series<K> acc = Series<K>::zero(f.shape());
    Series<K> p = Series<K>::constant(f.shape(), K(1));
    for (long k = 1;; ++k) {
        p = p * g;
        if (p.is_zero()) break;
        Rational c(k % 2 ? 1 : -1, k);
        acc += p * field_ops<K>::from_rational(c);
    }
    return acc;
}

// (1 + g)^r for rational r, constant term of f must be 1
template <typename K>
Series<K> pow_series(const Series<K>& f, const Rational& r) {
    if (!(f.constant_term() == K(1))) throw error("pow: constant term must be 1");
    Series<K> g = f - Series<K>::constant(f.shape(), K(1));
    Series<K> acc = Series<K>::constant(f.shape(), K(1));
    Series<K> p = Series<K>::constant(f.shape(), K(1));
    for (unsigned long k = 1;; ++k) {
        p = p * g;
        if (p.is_zero()) break;
        acc += p * field_ops<K>::from_rational(binomial_rat(r, k));
    }
    return acc;
}

template <typename K>
Series<K> sqrt_series(const Series<K>& f) {
    return pow_series(f, Rational(1, 2));
}

// 1/f for unit constant term
template <typename K>
Series<K> inverse(const Series<K>& f) {
    K c0 = f.constant_term();
    if (field_ops<K>::is_zero(c0)) throw error("inverse: zero constant term");
    K ic = K(1) / c0;
    return pow_series(f * ic, Rational(-1)) * ic;
}

template <typename K>
Series<K> operator/(const Series<K>& a, const Series<K>& b) {
    return a * inverse(b);
}

// ---------------------------------------------------------------------------
// Divided difference: (v * f(...,v) - f(...,1)) / (v - 1), exact
// ---------------------------------------------------------------------------

template <typename K>
Series<K> divided_difference(const Series<K>& f, const std::string& var) {
    std::size_t vi = static_cast<std::size_t>(f.shape().require(var));
    // group terms into univariate slices in `var`
    std::map<Exponents, std::map<int, K>> slices;
    for (const auto& t : f.terms()) {
        Exponents key = t.e;
        key[vi] = 0;
        slices[key][t.e[vi]] = t.c;
    }
    Series<K> out(f.shape());
    for (auto& [key, poly] : slices) {
        // p(v) -> (v p(v) - p(1)) / (v - 1), synthetic division from the top;
        // remainder vanishes identically because numerator(1) = 0
        int deg = poly.rbegin()->first + 1;  // degree of v*p
        std::vector<K> num(static_cast<std::size_t>(deg) + 1, K(0));
        for (auto& [e, c] : poly) num[static_cast<std::size_t>(e) + 1] = c;
        K p1 = K(0);
        for (auto& [e, c] : poly) p1 += c;
        num[0] = K(0) - p1;
        std::vector<K> q(static_cast<std::size_t>(deg), K(0));
        K carry = num[static_cast<std::size_t>(deg)];
        for (int i = deg - 1; i >= 0; --i) {
            q[static_cast<std::size_t>(i)] = carry;
            carry = num[static_cast<std::size_t>(i)] + carry;
        }
        if (!field_ops<K>::is_zero(carry))
            throw error("divided_difference: nonzero remainder (series not polynomial in var)");
        for (int i = 0; i < deg; ++i) {
            if (field_ops<K>::is_zero(q[static_cast<std::size_t>(i)])) continue;
            Exponents e = key;
            e[vi] = static_cast<std::uint16_t>(i);
            std::vector<int> ev(f.shape().vars.size());
            for (std::size_t j = 0; j < ev.size(); ++j) ev[j] = e[j];
            out.set_coefficient(ev, q[static_cast<std::size_t>(i)]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fixed points
// ---------------------------------------------------------------------------

// Contractive series equation S = step(S). `var` is the variable whose
// valuation the evaluator increases: after round k, coefficients with
// var-degree <= k * valuation_gain are final.
template <typename K>
struct FunctionalEquation {
    std::function<Series<K>(const Series<K>&)> step;
    Shape shape;
    std::string var;
    int valuation_gain = 1;
};

// Runs order+1 rounds and asserts the last round is a no-op. Rounds run at a
// growing cap (round k cannot produce correct coefficients beyond degree k,
// so computing them would be wasted work); the final full-cap round is the
// stability witness.
template <typename K>
Series<K> solve_fixed_point(const FunctionalEquation<K>& eq, int order) {
    if (eq.valuation_gain < 1) throw error("solve_fixed_point: invalid contraction witness");
    int vi = eq.shape.require(eq.var);
    (void)vi;
    Series<K> cur = Series<K>::zero(eq.shape.with_cap(eq.var, 0));
    int rounds = (order + eq.valuation_gain - 1) / eq.valuation_gain;
    for (int k = 1; k <= rounds; ++k) {
        int cap = std::min(order, k * eq.valuation_gain);
        cur = eq.step(cur.with_cap(eq.var, cap)).with_cap(eq.var, cap);
    }
    cur = cur.with_cap(eq.var, order);
    Series<K> nxt = eq.step(cur).with_cap(eq.var, order);
    if (!(nxt == cur))
        throw error("solve_fixed_point: iteration did not stabilize (contraction violated)");
    return cur;
}

// ---------------------------------------------------------------------------
// Reversion (compositional inverse) of a univariate series with valuation 1
// ---------------------------------------------------------------------------

template <typename K>
Series<K> reversion(const Series<K>& g, const std::string& var) {
    std::size_t vi = static_cast<std::size_t>(g.shape().require(var));
    if (g.min_degree(vi) != 1 || !field_ops<K>::is_zero(g.constant_term()))
        throw error("reversion: series must have valuation exactly 1");
    K g1 = g.coefficient(var, 1);
    int order = g.shape().vars[vi].cap;
    if (order < 0) throw error("reversion: needs a finite cap");
    // r = (x - (g - g1*x) o r) / g1 is a contraction of valuation gain 1
    Series<K> x = Series<K>::monomial(g.shape(), var);
    Series<K> tail = g - x * g1;
    FunctionalEquation<K> eq{
        [&](const Series<K>& r) {
            return (x - compose(tail, var, r)) * (K(1) / g1);
        },
        g.shape(), var, 1};
    return solve_fixed_point(eq, order);
}

}  // namespace mindeg
