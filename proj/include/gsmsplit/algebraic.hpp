#pragma once

// Coefficient rings for the formal series machinery.
//
// The order-by-order recurrence only ever divides by rationals, so the
// formal solution can be carried either in floating complex arithmetic or
// exactly in Q[s]/(s^d - q), where s stands for the algebraic leading
// amplitude (c0 with c0^{n-1} = -r(r+1) in the power case, the prefix
// amplitude with s^{n-1} = -r in the exponential case). The exact ring is
// what makes the residual-order checks symbolic rather than tolerance-based.

#include "values.hpp"

#include <cstddef>
#include <vector>

namespace gsmsplit {

// Element of Q[s]/(s^d - q) in the power basis {1, s, ..., s^{d-1}}.
struct AlgValue {
    std::vector<Rational> c;

    bool operator==(const AlgValue&) const = default;
};

class AlgebraicRing {
    int deg_;
    Rational q_;

public:
    using value_type = AlgValue;

    AlgebraicRing(int deg, Rational s_pow_deg) : deg_(deg), q_(std::move(s_pow_deg)) {}

    int degree() const { return deg_; }
    const Rational& relation() const { return q_; }

    AlgValue zero() const { return AlgValue{std::vector<Rational>(deg_, Rational(0))}; }
    AlgValue one() const { return from_rational(Rational(1)); }

    AlgValue from_rational(const Rational& v) const {
        AlgValue a = zero();
        a.c[0] = v;
        return a;
    }

    // the symbol s itself (for d = 1, s is just the number q)
    AlgValue symbol() const {
        if (deg_ == 1) return from_rational(q_);
        AlgValue a = zero();
        a.c[1] = 1;
        return a;
    }

    bool is_zero(const AlgValue& a) const {
        for (const auto& x : a.c)
            if (x != 0) return false;
        return true;
    }

    AlgValue add(const AlgValue& a, const AlgValue& b) const {
        AlgValue out = a;
        for (int i = 0; i < deg_; ++i) out.c[i] += b.c[i];
        return out;
    }

    AlgValue sub(const AlgValue& a, const AlgValue& b) const {
        AlgValue out = a;
        for (int i = 0; i < deg_; ++i) out.c[i] -= b.c[i];
        return out;
    }

    AlgValue neg(const AlgValue& a) const {
        AlgValue out = a;
        for (auto& x : out.c) x = -x;
        return out;
    }

    AlgValue mul(const AlgValue& a, const AlgValue& b) const {
        std::vector<Rational> full(2 * deg_ - 1, Rational(0));
        for (int i = 0; i < deg_; ++i) {
            if (a.c[i] == 0) continue;
            for (int j = 0; j < deg_; ++j) {
                if (b.c[j] == 0) continue;
                full[i + j] += a.c[i] * b.c[j];
            }
        }
        AlgValue out = zero();
        for (int p = static_cast<int>(full.size()) - 1; p >= 0; --p) {
            if (p >= deg_)
                full[p - deg_] += q_ * full[p];  // s^d = q
            else
                out.c[p] = full[p];
        }
        return out;
    }

    AlgValue mul_rat(const AlgValue& a, const Rational& v) const {
        AlgValue out = a;
        for (auto& x : out.c) x *= v;
        return out;
    }

    AlgValue div_rat(const AlgValue& a, const Rational& v) const {
        AlgValue out = a;
        for (auto& x : out.c) x /= v;
        return out;
    }

    // collapse to a number, substituting a concrete root for s
    template <class C>
    C materialize(const AlgValue& a, const C& s_value) const {
        C out(0);
        for (int i = deg_ - 1; i >= 0; --i) {
            out = out * s_value + to_complex<C>(ValueLit{a.c[i], Rational(0)});
        }
        return out;
    }
};

// Floating-point coefficient ring over a complex type.
template <class C>
class NumericRing {
public:
    using value_type = C;

    C zero() const { return C(0); }
    C one() const { return C(1); }
    C from_rational(const Rational& v) const { return to_complex<C>(ValueLit{v, Rational(0)}); }
    bool is_zero(const C& a) const { return a == C(0); }
    C add(const C& a, const C& b) const { return a + b; }
    C sub(const C& a, const C& b) const { return a - b; }
    C neg(const C& a) const { return -a; }
    C mul(const C& a, const C& b) const { return a * b; }
    C mul_rat(const C& a, const Rational& v) const { return a * from_rational(v); }
    C div_rat(const C& a, const Rational& v) const { return a / from_rational(v); }
};

} // namespace gsmsplit
