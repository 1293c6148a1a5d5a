#pragma once

// The inner equation attached to a generalized standard map:
//   power case:        D2(phi) = -phi^n + sum_{k>n} G_k phi^k
//   exponential case:  D2(phi) = -e^{(n-1)phi} + sum_{k>=n} G_k e^{k phi}
// Branch data (lambda root, c0 root) is kept exact/symbolic here and only
// materialized at a requested precision.

#include "values.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gsmsplit {

enum class MapCase { polynomial, trigonometric };

namespace detail {

// exact integer n-th root if it exists
inline std::optional<BigInt> exact_root(const BigInt& v, int n) {
    if (v < 0) return std::nullopt;
    if (v == 0) return BigInt(0);
    BigInt lo = 1, hi = 1;
    while (pow(hi, n) < v) hi <<= 1;
    while (lo < hi) {
        BigInt mid = (lo + hi) / 2;
        if (pow(mid, n) < v)
            lo = mid + 1;
        else
            hi = mid;
    }
    return pow(lo, n) == v ? std::optional<BigInt>(lo) : std::nullopt;
}

inline std::optional<Rational> exact_root(const Rational& v, int n) {
    if (v < 0) return std::nullopt;
    auto num = exact_root(numerator(v), n);
    auto den = exact_root(denominator(v), n);
    if (!num || !den) return std::nullopt;
    return Rational(*num) / Rational(*den);
}

} // namespace detail

struct InnerEquation {
    MapCase kind = MapCase::polynomial;
    int n = 0;                       // nonlinearity order; r = 2/(n-1)
    Rational alpha;                  // scaling exponent of the blow-up
    std::vector<int> I;              // argmax set of the degree/order ratio
    std::map<int, ValueLit> gtilde;  // power -> exact pre-lambda coefficient
    int lambda_branch = 0;           // offsets from the smallest-nonneg-argument root
    int c0_branch = 0;               // offsets from the default c0 root

    Rational r() const { return Rational(2, n - 1); }

    // growth exponent of the linear-basis solution xi_s = z^E
    Rational E() const {
        return kind == MapCase::polynomial ? r() + 2 : Rational(2);
    }

    // resonance index: for odd n = 2m-1 the recurrence coefficient vanishes
    // once (at order m in the power case, m-1 in the exponential case)
    int resonant_order() const {
        if (n % 2 == 0) return 0;
        int m = (n + 1) / 2;
        return kind == MapCase::polynomial ? m : m - 1;
    }

    // s^{deg} = s_relation: minimal relation of the symbolic amplitude
    int symbol_degree() const { return n - 1; }
    Rational symbol_relation() const {
        Rational rr = r();
        return kind == MapCase::polynomial ? Rational(-rr * (rr + 1)) : Rational(-rr);
    }

    // lambda as an exact rational when the leading coefficient allows it
    std::optional<Rational> rational_lambda() const {
        const ValueLit& gn = gtilde.at(n_leading());
        if (gn.im != 0) return std::nullopt;
        Rational x = kind == MapCase::polynomial ? Rational(-1) / gn.re
                                                 : gn.re / Rational(-1);
        // polynomial: lambda^{n-1} = -1/gtilde_n; trig: lambda^{-(n-1)} = -1/gtilde_{n-1}
        if (n == 2) return x;  // single root
        if (lambda_branch != 0) return std::nullopt;
        if (x <= 0) return std::nullopt;  // smallest-arg root is complex for x < 0
        return detail::exact_root(x, n - 1);
    }

    // all G_k (lambda-scaled) as exact rationals, when possible
    std::optional<std::map<int, Rational>> rational_G() const {
        auto lam = rational_lambda();
        if (!lam) return std::nullopt;
        std::map<int, Rational> out;
        for (const auto& [k, v] : gtilde) {
            if (k == n_leading()) continue;
            if (v.im != 0) return std::nullopt;
            long e = kind == MapCase::polynomial ? k - 1 : -k;
            out[k] = v.re * pow_rational(*lam, e);
        }
        return out;
    }

    template <class C>
    C lambda() const {
        using R = std::remove_cvref_t<decltype(std::declval<C>().real())>;
        const ValueLit& gn = gtilde.at(n_leading());
        C g = to_complex<C>(gn);
        C x = C(-1) / g;  // lambda^{+-(n-1)} = -1/gtilde
        if (n == 2) {
            // single root; trig n=2 wants lambda^{-1} = x
            return kind == MapCase::polynomial ? x : C(1) / x;
        }
        using std::atan2, std::atan, std::abs, std::pow, std::cos, std::sin;
        R theta = atan2(x.imag(), x.real());
        const R pi_v = R(4) * atan(R(1));
        if (theta < 0) theta += 2 * pi_v;  // principal arg in [0, 2pi)
        R mag = abs(x);
        int d = n - 1;
        R root_arg = (theta + 2 * pi_v * lambda_branch) / d;
        C root = C(pow(mag, R(1) / d)) * C(cos(root_arg), sin(root_arg));
        if (kind == MapCase::trigonometric) root = C(1) / root;
        return root;
    }

    // G_k = gtilde_k * lambda^{k-1} (power) or gtilde_k * lambda^{-k} (trig)
    template <class C>
    std::map<int, C> G() const {
        std::map<int, C> out;
        C lam = lambda<C>();
        for (const auto& [k, v] : gtilde) {
            if (k == n_leading()) continue;
            C scale = pow(lam, C(kind == MapCase::polynomial ? k - 1 : -k));
            out[k] = to_complex<C>(v) * scale;
        }
        return out;
    }

    // c0 with c0^{n-1} = -r(r+1): default root has argument -pi/(n-1),
    // which is the one matching the singularity in the upper half plane.
    template <class C>
    C c0() const {
        return symbol_value<C>(-r() * (r() + 1));
    }

    // materialized symbolic amplitude (c0 in the power case, the e^{phi0}
    // amplitude s with s^{n-1} = -r in the exponential case)
    template <class C>
    C symbol_value() const {
        return symbol_value<C>(symbol_relation());
    }

    // d_E of the unified notation: c0 (power) or 1 (trig)
    template <class C>
    C dE() const {
        return kind == MapCase::polynomial ? c0<C>() : C(1);
    }

    int n_leading() const { return kind == MapCase::polynomial ? n : n - 1; }

private:
    template <class C>
    C symbol_value(const Rational& rel) const {
        using R = std::remove_cvref_t<decltype(std::declval<C>().real())>;
        using std::atan, std::pow, std::cos, std::sin;
        int d = n - 1;
        R mag = to_real<R>(abs(rel));
        const R pi_v = R(4) * atan(R(1));
        // rel < 0 always here; roots at arg pi(2b-1)/d, b = c0_branch offset
        R root_arg = pi_v * (2 * c0_branch - 1) / d;
        R m = pow(mag, R(1) / d);
        return C(m * cos(root_arg), m * sin(root_arg));
    }
};

} // namespace gsmsplit
