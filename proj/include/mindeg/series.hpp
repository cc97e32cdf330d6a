#pragma once

#include <mindeg/quad.hpp>
#include <mindeg/rational.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mindeg {

// ---------------------------------------------------------------------------
// Coefficient field glue. A coefficient type needs ring ops, division,
// equality, zero detection, an embedding of Rational, and printing.
// ---------------------------------------------------------------------------
template <typename K>
struct field_ops;

template <>
struct field_ops<Rational> {
    static bool is_zero(const Rational& x) { return x == 0; }
    static Rational from_rational(const Rational& q) { return q; }
    static std::string str(const Rational& x) { return x.get_str(); }
};

template <int D>
struct field_ops<Quad<D>> {
    static bool is_zero(const Quad<D>& x) { return x.is_zero(); }
    static Quad<D> from_rational(const Rational& q) { return Quad<D>(q); }
    static std::string str(const Quad<D>& x) { return to_string(x); }
};

// ---------------------------------------------------------------------------
// Variables, truncation, exponents
// ---------------------------------------------------------------------------

enum class Sem : std::uint8_t { ogf, egf };

struct VarSpec {
    std::string name;
    Sem sem = Sem::ogf;
    int cap = -1;    // per-variable truncation; -1 = unbounded
    int weight = 0;  // weight in the optional weighted total-degree cap
};

// Variable universe plus truncation data. Series in one pipeline share
// compatible shapes; binary ops align shapes by name (semantics and weights
// must agree on shared names, caps unify to the minimum).
struct Shape {
    std::vector<VarSpec> vars;
    long weighted_cap = -1;  // cap on sum(weight_i * e_i); -1 = none

    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (vars[i].name == name) return static_cast<int>(i);
        return -1;
    }
    int require(const std::string& name) const {
        int i = index_of(name);
        if (i < 0) throw error("shape has no variable '" + name + "'");
        return i;
    }
    Shape with_cap(const std::string& name, int cap) const {
        Shape s = *this;
        s.vars[static_cast<std::size_t>(s.require(name))].cap = cap;
        return s;
    }
    bool operator==(const Shape& o) const {
        if (vars.size() != o.vars.size() || weighted_cap != o.weighted_cap) return false;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            const VarSpec &a = vars[i], &b = o.vars[i];
            if (a.name != b.name || a.sem != b.sem || a.cap != b.cap || a.weight != b.weight)
                return false;
        }
        return true;
    }
};

inline Shape unify(const Shape& a, const Shape& b) {
    Shape out = a;
    for (const VarSpec& v : b.vars) {
        int i = out.index_of(v.name);
        if (i < 0) {
            out.vars.push_back(v);
            continue;
        }
        VarSpec& u = out.vars[static_cast<std::size_t>(i)];
        if (u.sem != v.sem)
            throw error("incompatible semantics tags on shared variable '" + v.name + "'");
        if (u.weight != v.weight)
            throw error("incompatible weights on shared variable '" + v.name + "'");
        if (v.cap >= 0) u.cap = (u.cap < 0) ? v.cap : std::min(u.cap, v.cap);
    }
    if (b.weighted_cap >= 0)
        out.weighted_cap = (out.weighted_cap < 0) ? b.weighted_cap
                                                  : std::min(out.weighted_cap, b.weighted_cap);
    // keep variable order deterministic: alphabetical by name
    std::sort(out.vars.begin(), out.vars.end(),
              [](const VarSpec& x, const VarSpec& y) { return x.name < y.name; });
    return out;
}

constexpr std::size_t kMaxVars = 12;

struct Exponents {
    std::uint8_t n = 0;
    std::array<std::uint16_t, kMaxVars> e{};

    std::uint16_t operator[](std::size_t i) const { return e[i]; }
    std::uint16_t& operator[](std::size_t i) { return e[i]; }

    friend bool operator==(const Exponents& a, const Exponents& b) {
        if (a.n != b.n) return false;
        for (std::size_t i = 0; i < a.n; ++i)
            if (a.e[i] != b.e[i]) return false;
        return true;
    }
    friend bool operator<(const Exponents& a, const Exponents& b) {
        for (std::size_t i = 0; i < a.n && i < b.n; ++i)
            if (a.e[i] != b.e[i]) return a.e[i] < b.e[i];
        return a.n < b.n;
    }
    long total() const {
        long t = 0;
        for (std::size_t i = 0; i < n; ++i) t += e[i];
        return t;
    }
};

// ---------------------------------------------------------------------------
// Series
// ---------------------------------------------------------------------------

template <typename K>
class Series {
  public:
    struct Term {
        Exponents e;
        K c;
    };

    Series() = default;
    explicit Series(Shape shape) : shape_(std::move(shape)) { check_shape(); }

    static Series zero(Shape shape) { return Series(std::move(shape)); }

    static Series constant(Shape shape, K value) {
        Series s(std::move(shape));
        if (!field_ops<K>::is_zero(value))
            s.terms_.push_back({Exponents{static_cast<std::uint8_t>(s.shape_.vars.size()), {}},
                                std::move(value)});
        return s;
    }

    // the monomial c * name^k
    static Series monomial(Shape shape, const std::string& name, K c = K(1), int k = 1) {
        Series s(std::move(shape));
        int i = s.shape_.require(name);
        Exponents ex{static_cast<std::uint8_t>(s.shape_.vars.size()), {}};
        ex[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(k);
        if (!field_ops<K>::is_zero(c) && s.within_caps(ex)) s.terms_.push_back({ex, std::move(c)});
        return s;
    }

    const Shape& shape() const { return shape_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t var_count() const { return shape_.vars.size(); }

    // --- coefficient access -------------------------------------------------

    K coefficient(const std::vector<int>& exps) const {
        if (exps.size() != var_count()) throw error("coefficient: exponent arity mismatch");
        Exponents ex{static_cast<std::uint8_t>(var_count()), {}};
        for (std::size_t i = 0; i < exps.size(); ++i) {
            if (exps[i] < 0) throw error("coefficient: negative exponent");
            ex[i] = static_cast<std::uint16_t>(exps[i]);
        }
        if (!within_caps(ex)) throw error("coefficient query outside truncation");
        auto it = std::lower_bound(terms_.begin(), terms_.end(), ex,
                                   [](const Term& t, const Exponents& k) { return t.e < k; });
        if (it != terms_.end() && it->e == ex) return it->c;
        return K(0);
    }

    K coefficient(const std::string& var, int k) const {
        if (var_count() != 1 || shape_.vars[0].name != var)
            throw error("univariate coefficient on non-univariate series");
        return coefficient(std::vector<int>{k});
    }

    // n! * coefficient for every EGF variable; must be an integer.
    Integer labelled_count(const std::vector<int>& exps) const {
        K c = coefficient(exps);
        Rational scale(1);
        for (std::size_t i = 0; i < var_count(); ++i)
            if (shape_.vars[i].sem == Sem::egf)
                scale *= Rational(factorial(static_cast<unsigned long>(exps[i])));
        // labelled counts only make sense for rational coefficients
        if constexpr (std::is_same_v<K, Rational>) {
            Rational v = c * scale;
            if (v.get_den() != 1)
                throw error("labelled_count: " + v.get_str() + " is not an integer");
            return v.get_num();
        } else {
            throw error("labelled_count requires rational coefficients");
        }
    }

    Integer labelled_count(int n) const { return labelled_count(std::vector<int>{n}); }

    // --- ring operations ----------------------------------------------------

    friend Series operator+(const Series& a, const Series& b) { return add_sub(a, b, false); }
    friend Series operator-(const Series& a, const Series& b) { return add_sub(a, b, true); }
    friend Series operator-(const Series& a) {
        Series r(a.shape_);
        r.terms_.reserve(a.terms_.size());
        for (const Term& t : a.terms_) r.terms_.push_back({t.e, K(0) - t.c});
        return r;
    }

    friend Series operator*(const Series& a, const Series& b) { return multiply(a, b); }

    friend Series operator*(const K& c, const Series& a) {
        Series r(a.shape_);
        if (field_ops<K>::is_zero(c)) return r;
        r.terms_.reserve(a.terms_.size());
        for (const Term& t : a.terms_) {
            K v = c * t.c;
            if (!field_ops<K>::is_zero(v)) r.terms_.push_back({t.e, std::move(v)});
        }
        return r;
    }
    friend Series operator*(const Series& a, const K& c) { return c * a; }

    Series& operator+=(const Series& b) { return *this = *this + b; }
    Series& operator-=(const Series& b) { return *this = *this - b; }
    Series& operator*=(const Series& b) { return *this = *this * b; }

    Series pow_int(long k) const {
        if (k < 0) throw error("pow_int: negative exponent; use pow(r) on a unit");
        Series acc = Series::constant(shape_, K(1));
        Series base = *this;
        while (k > 0) {
            if (k & 1) acc = acc * base;
            k >>= 1;
            if (k) base = base * base;
        }
        return acc;
    }

    friend bool operator==(const Series& a, const Series& b) {
        if (a.var_count() != b.var_count()) return false;
        for (std::size_t i = 0; i < a.var_count(); ++i)
            if (a.shape_.vars[i].name != b.shape_.vars[i].name) return false;
        if (a.terms_.size() != b.terms_.size()) return false;
        for (std::size_t i = 0; i < a.terms_.size(); ++i)
            if (!(a.terms_[i].e == b.terms_[i].e) || !(a.terms_[i].c == b.terms_[i].c))
                return false;
        return true;
    }

    // --- structural operations ----------------------------------------------

    Series retruncate(const Shape& shape) const {
        Series r(shape);
        for (const Term& t : terms_) {
            Exponents ex{static_cast<std::uint8_t>(shape.vars.size()), {}};
            for (std::size_t i = 0; i < var_count(); ++i) {
                if (t.e[i] == 0) continue;
                int j = shape.index_of(shape_.vars[i].name);
                if (j < 0) throw error("retruncate: variable lost");
                ex[static_cast<std::size_t>(j)] = t.e[i];
            }
            if (r.within_caps(ex)) r.terms_.push_back({ex, t.c});
        }
        std::sort(r.terms_.begin(), r.terms_.end(),
                  [](const Term& x, const Term& y) { return x.e < y.e; });
        return r;
    }

    Series with_cap(const std::string& var, int cap) const {
        return retruncate(shape_.with_cap(var, cap));
    }

    // substitute 1 for `var` (project it away, keeping it in the shape)
    Series eval_one(const std::string& var) const {
        std::size_t i = static_cast<std::size_t>(shape_.require(var));
        Series r(shape_);
        std::map<Exponents, K> acc;
        for (const Term& t : terms_) {
            Exponents ex = t.e;
            ex[i] = 0;
            auto [it, fresh] = acc.emplace(ex, t.c);
            if (!fresh) it->second += t.c;
        }
        for (auto& [e, c] : acc)
            if (!field_ops<K>::is_zero(c)) r.terms_.push_back({e, c});
        return r;
    }

    // substitute 0 for `var`
    Series eval_zero(const std::string& var) const {
        std::size_t i = static_cast<std::size_t>(shape_.require(var));
        Series r(shape_);
        for (const Term& t : terms_)
            if (t.e[i] == 0) r.terms_.push_back(t);
        return r;
    }

    // var -> c * var
    Series scale_var(const std::string& var, const K& c) const {
        std::size_t i = static_cast<std::size_t>(shape_.require(var));
        Series r(shape_);
        r.terms_.reserve(terms_.size());
        for (const Term& t : terms_) {
            K v = t.c;
            for (std::uint16_t k = 0; k < t.e[i]; ++k) v = v * c;
            if (!field_ops<K>::is_zero(v)) r.terms_.push_back({t.e, std::move(v)});
        }
        return r;
    }

    Series mul_var_power(const std::string& var, int k) const {
        std::size_t i = static_cast<std::size_t>(shape_.require(var));
        Series r(shape_);
        for (const Term& t : terms_) {
            Exponents ex = t.e;
            long v = static_cast<long>(ex[i]) + k;
            if (v < 0) throw error("mul_var_power: exponent underflow; use div_var_power");
            ex[i] = static_cast<std::uint16_t>(v);
            if (r.within_caps(ex)) r.terms_.push_back({ex, t.c});
        }
        std::sort(r.terms_.begin(), r.terms_.end(),
                  [](const Term& x, const Term& y) { return x.e < y.e; });
        return r;
    }

    // exact division by var^k; throws if any term has a smaller exponent.
    // Note the quotient's top k coefficients are unknown at the same cap, so
    // the cap in `var` shrinks by k.
    Series div_var_power(const std::string& var, int k) const {
        std::size_t i = static_cast<std::size_t>(shape_.require(var));
        Shape sh = shape_;
        if (sh.vars[i].cap >= 0) sh.vars[i].cap -= k;
        Series r(sh);
        for (const Term& t : terms_) {
            if (t.e[i] < k) throw error("div_var_power: remainder (valuation too small)");
            Exponents ex = t.e;
            ex[i] = static_cast<std::uint16_t>(ex[i] - k);
            if (r.within_caps(ex)) r.terms_.push_back({ex, t.c});
        }
        std::sort(r.terms_.begin(), r.terms_.end(),
                  [](const Term& x, const Term& y) { return x.e < y.e; });
        return r;
    }

    // pointing: var * d/d(var)
    Series point(const std::string& var) const {
        std::size_t i = static_cast<std::size_t>(shape_.require(var));
        Series r(shape_);
        for (const Term& t : terms_) {
            if (t.e[i] == 0) continue;
            K v = t.c * field_ops<K>::from_rational(Rational(static_cast<long>(t.e[i])));
            r.terms_.push_back({t.e, std::move(v)});
        }
        return r;
    }

    K constant_term() const {
        if (terms_.empty()) return K(0);
        if (terms_.front().e.total() == 0) return terms_.front().c;
        return K(0);
    }

    int min_degree(std::size_t var_index) const {
        int m = std::numeric_limits<int>::max();
        for (const Term& t : terms_) m = std::min(m, static_cast<int>(t.e[var_index]));
        return terms_.empty() ? std::numeric_limits<int>::max() : m;
    }

    bool within_caps(const Exponents& ex) const {
        long w = 0;
        for (std::size_t i = 0; i < shape_.vars.size(); ++i) {
            const VarSpec& v = shape_.vars[i];
            if (v.cap >= 0 && ex[i] > v.cap) return false;
            if (v.weight) w += static_cast<long>(v.weight) * ex[i];
        }
        return shape_.weighted_cap < 0 || w <= shape_.weighted_cap;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const Term& t : terms_) {
            if (!first) os << " + ";
            first = false;
            os << "(" << field_ops<K>::str(t.c) << ")";
            for (std::size_t i = 0; i < var_count(); ++i)
                if (t.e[i]) {
                    os << "*" << shape_.vars[i].name;
                    if (t.e[i] > 1) os << "^" << t.e[i];
                }
        }
        return os.str();
    }

    // raw access for module code that builds series directly
    void set_coefficient(const std::vector<int>& exps, K c) {
        Exponents ex{static_cast<std::uint8_t>(var_count()), {}};
        for (std::size_t i = 0; i < exps.size(); ++i)
            ex[i] = static_cast<std::uint16_t>(exps[i]);
        if (!within_caps(ex)) throw error("set_coefficient outside truncation");
        auto it = std::lower_bound(terms_.begin(), terms_.end(), ex,
                                   [](const Term& t, const Exponents& k) { return t.e < k; });
        if (it != terms_.end() && it->e == ex) {
            if (field_ops<K>::is_zero(c))
                terms_.erase(it);
            else
                it->c = std::move(c);
        } else if (!field_ops<K>::is_zero(c)) {
            terms_.insert(it, Term{ex, std::move(c)});
        }
    }

  private:
    Shape shape_;
    std::vector<Term> terms_;  // sorted lex by exponents, coefficients nonzero

    void check_shape() const {
        if (shape_.vars.size() > kMaxVars) throw error("too many variables");
    }

    // 64-bit packing of exponent vectors (big-endian by variable order, so
    // packed order == lex order) with one guard bit per field and one extra
    // field carrying the weighted degree. Used to make multiplication's
    // truncation test and accumulation cheap.
    struct PackSpec {
        bool ok = false;
        std::array<int, kMaxVars + 1> shift{};
        std::array<std::uint64_t, kMaxVars + 1> fcap{};
        std::uint64_t guards = 0;
        std::uint64_t capped = 0;  // packed caps with guard bits set
        std::size_t nf = 0;
    };

    static PackSpec make_pack(const Shape& sh, const std::vector<const Series*>& srcs) {
        PackSpec p;
        std::size_t nv = sh.vars.size();
        bool weighted = sh.weighted_cap >= 0;
        p.nf = nv + (weighted ? 1 : 0);
        std::array<std::uint64_t, kMaxVars + 1> caps{};
        for (std::size_t i = 0; i < nv; ++i) {
            long c = sh.vars[i].cap;
            if (c < 0) {
                // unbounded: bound by the largest exponent actually present
                long m = 0;
                for (const Series* s : srcs)
                    for (const Term& t : s->terms_) m = std::max(m, static_cast<long>(t.e[i]));
                c = 2 * m + 1;
            }
            caps[i] = static_cast<std::uint64_t>(c);
        }
        if (weighted) caps[nv] = static_cast<std::uint64_t>(sh.weighted_cap);
        int bit = 0;
        for (std::size_t f = 0; f < p.nf; ++f) {
            int width = 1;
            while ((1ull << width) <= caps[f]) ++width;
            ++width;  // guard bit
            p.shift[f] = bit;
            p.fcap[f] = caps[f];
            bit += width;
            if (bit > 64) return p;  // gives ok=false
        }
        // big-endian: invert shifts so var 0 occupies the high bits
        for (std::size_t f = 0; f < p.nf; ++f) p.shift[f] = 64 - p.shift[f] - shift_width(p, f);
        for (std::size_t f = 0; f < p.nf; ++f) {
            p.capped |= p.fcap[f] << p.shift[f];
            p.guards |= 1ull << (p.shift[f] + shift_width(p, f) - 1);
        }
        p.ok = true;
        return p;
    }
    static int shift_width(const PackSpec& p, std::size_t f) {
        int width = 1;
        while ((1ull << width) <= p.fcap[f]) ++width;
        return width + 1;
    }

    std::uint64_t pack_term(const PackSpec& p, const Exponents& ex) const {
        std::uint64_t k = 0;
        long w = 0;
        std::size_t nv = shape_.vars.size();
        for (std::size_t i = 0; i < nv; ++i) {
            k |= static_cast<std::uint64_t>(ex[i]) << p.shift[i];
            if (shape_.vars[i].weight) w += static_cast<long>(shape_.vars[i].weight) * ex[i];
        }
        if (p.nf > nv) k |= static_cast<std::uint64_t>(w) << p.shift[nv];
        return k;
    }

    static Series add_sub(const Series& a, const Series& b, bool sub) {
        Shape sh = unify(a.shape_, b.shape_);
        Series x = a.shape_ == sh ? a : a.retruncate(sh);
        Series y = b.shape_ == sh ? b : b.retruncate(sh);
        Series r(sh);
        r.terms_.reserve(x.terms_.size() + y.terms_.size());
        std::size_t i = 0, j = 0;
        while (i < x.terms_.size() || j < y.terms_.size()) {
            bool takex;
            if (i >= x.terms_.size())
                takex = false;
            else if (j >= y.terms_.size())
                takex = true;
            else if (x.terms_[i].e == y.terms_[j].e) {
                K c = sub ? K(x.terms_[i].c - y.terms_[j].c) : K(x.terms_[i].c + y.terms_[j].c);
                if (!field_ops<K>::is_zero(c)) r.terms_.push_back({x.terms_[i].e, std::move(c)});
                ++i, ++j;
                continue;
            } else
                takex = x.terms_[i].e < y.terms_[j].e;
            if (takex)
                r.terms_.push_back(x.terms_[i++]);
            else {
                Term t = y.terms_[j++];
                if (sub) t.c = K(0) - t.c;
                r.terms_.push_back(std::move(t));
            }
        }
        return r;
    }

    static Series multiply(const Series& a, const Series& b) {
        Shape sh = unify(a.shape_, b.shape_);
        const Series& x = a.shape_ == sh ? a : a.retruncate(sh);
        const Series& y = b.shape_ == sh ? b : b.retruncate(sh);
        Series r(sh);
        if (x.terms_.empty() || y.terms_.empty()) return r;

        PackSpec p = make_pack(sh, {&x, &y});
        if (p.ok) {
            std::vector<std::uint64_t> ka(x.terms_.size()), kb(y.terms_.size());
            for (std::size_t i = 0; i < x.terms_.size(); ++i) ka[i] = x.pack_term(p, x.terms_[i].e);
            for (std::size_t j = 0; j < y.terms_.size(); ++j) kb[j] = y.pack_term(p, y.terms_[j].e);
            std::unordered_map<std::uint64_t, K> acc;
            acc.reserve(x.terms_.size() + y.terms_.size());
            K tmp;
            for (std::size_t i = 0; i < x.terms_.size(); ++i) {
                const K& ca = x.terms_[i].c;
                for (std::size_t j = 0; j < y.terms_.size(); ++j) {
                    std::uint64_t k = ka[i] + kb[j];
                    // fieldwise k <= caps  <=>  no borrow out of any field
                    if ((((p.capped | p.guards) - k) & p.guards) != p.guards) continue;
                    tmp = ca * y.terms_[j].c;
                    auto [it, fresh] = acc.emplace(k, tmp);
                    if (!fresh) it->second += tmp;
                }
            }
            std::vector<std::pair<std::uint64_t, K>> flat(acc.begin(), acc.end());
            std::sort(flat.begin(), flat.end(),
                      [](const auto& u, const auto& v) { return u.first < v.first; });
            r.terms_.reserve(flat.size());
            std::size_t nv = sh.vars.size();
            for (auto& [k, c] : flat) {
                if (field_ops<K>::is_zero(c)) continue;
                Exponents ex{static_cast<std::uint8_t>(nv), {}};
                for (std::size_t f = 0; f < nv; ++f) {
                    int w = shift_width(p, f);
                    ex[f] = static_cast<std::uint16_t>((k >> p.shift[f]) & ((1ull << w) - 1));
                }
                r.terms_.push_back({ex, std::move(c)});
            }
            return r;
        }

        // generic fallback: ordered-map accumulation
        std::map<Exponents, K> acc;
        std::size_t nv = sh.vars.size();
        for (const Term& ta : x.terms_)
            for (const Term& tb : y.terms_) {
                Exponents ex{static_cast<std::uint8_t>(nv), {}};
                for (std::size_t i = 0; i < nv; ++i)
                    ex[i] = static_cast<std::uint16_t>(ta.e[i] + tb.e[i]);
                if (!r.within_caps(ex)) continue;
                K c = ta.c * tb.c;
                auto it = acc.find(ex);
                if (it == acc.end())
                    acc.emplace(ex, std::move(c));
                else
                    it->second += c;
            }
        for (auto& [e, c] : acc)
            if (!field_ops<K>::is_zero(c)) r.terms_.push_back({e, c});
        return r;
    }
};

using RSeries = Series<Rational>;

}  // namespace mindeg
