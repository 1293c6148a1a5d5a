#pragma once

// Adaptive quadrature with an embedded Gauss pair (7- and 15-point
// Gauss-Legendre on each panel, difference as the error estimate). Nodes
// are generated at the working precision by Newton on the Legendre
// recurrence and cached per precision, so the same integrator serves long
// double and dynamic-precision mpfr runs.

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

namespace gsmsplit {

template <class Real>
struct GaussRule {
    std::vector<Real> x, w;  // full node set on [-1, 1]
};

namespace detail {

template <class Real>
GaussRule<Real> make_gauss_rule(int n) {
    using std::abs, std::cos, std::atan;
    const Real pi = Real(4) * atan(Real(1));
    const Real eps = std::numeric_limits<Real>::epsilon();
    GaussRule<Real> rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        Real x = cos(pi * (Real(i) + Real(3) / 4) / (Real(n) + Real(1) / 2));
        Real dp = 0;
        for (int it = 0; it < 200; ++it) {
            // Legendre recurrence
            Real p0 = 1, p1 = x;
            for (int k = 1; k < n; ++k) {
                Real p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
                p0 = p1;
                p1 = p2;
            }
            dp = Real(n) * (x * p1 - p0) / (x * x - 1);
            Real step = p1 / dp;
            x -= step;
            if (abs(step) < 8 * eps * (abs(x) + 1)) break;
        }
        // recompute dp at the converged node for the weight
        {
            Real p0 = 1, p1 = x;
            for (int k = 1; k < n; ++k) {
                Real p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
                p0 = p1;
                p1 = p2;
            }
            dp = Real(n) * (x * p1 - p0) / (x * x - 1);
        }
        Real w = Real(2) / ((1 - x * x) * dp * dp);
        rule.x[i] = -x;  // ascending order
        rule.w[i] = w;
        rule.x[n - 1 - i] = x;
        rule.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.x[n / 2] = 0;
    return rule;
}

template <class Real>
const GaussRule<Real>& gauss_rule(int n) {
    if constexpr (std::is_floating_point_v<Real>) {
        static const std::map<int, GaussRule<Real>> cache = {
            {7, make_gauss_rule<Real>(7)}, {15, make_gauss_rule<Real>(15)}};
        return cache.at(n);
    } else {
        // dynamic precision: key the cache by the current digit setting
        thread_local std::map<std::pair<int, unsigned>, GaussRule<Real>> cache;
        unsigned digits = Real::default_precision();
        auto key = std::make_pair(n, digits);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, make_gauss_rule<Real>(n)).first;
        return it->second;
    }
}

} // namespace detail

template <class Real>
struct QuadResult {
    Real value{};
    Real error{};
    bool converged = true;
    int panels = 0;
};

// Integrate f over [a, b] to absolute tolerance tol.
template <class Real, class F>
QuadResult<Real> adaptive_gauss(F&& f, Real a, Real b, Real tol, int max_depth = 48) {
    using std::abs;
    const auto& g7 = detail::gauss_rule<Real>(7);
    const auto& g15 = detail::gauss_rule<Real>(15);
    auto panel = [&](const Real& lo, const Real& hi, Real& err) {
        Real mid = (lo + hi) / 2, half = (hi - lo) / 2;
        Real s7 = 0, s15 = 0;
        for (int i = 0; i < 7; ++i) s7 += g7.w[i] * f(mid + half * g7.x[i]);
        for (int i = 0; i < 15; ++i) s15 += g15.w[i] * f(mid + half * g15.x[i]);
        s7 *= half;
        s15 *= half;
        err = abs(s15 - s7);
        return s15;
    };
    struct Seg {
        Real lo, hi, tol;
        int depth;
    };
    std::vector<Seg> stack{{a, b, tol, 0}};
    QuadResult<Real> out;
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        Real err;
        Real v = panel(s.lo, s.hi, err);
        if (err <= s.tol || s.depth >= max_depth) {
            out.value += v;
            out.error += err;
            ++out.panels;
            if (s.depth >= max_depth && err > s.tol) out.converged = false;
        } else {
            Real mid = (s.lo + s.hi) / 2;
            stack.push_back({s.lo, mid, s.tol / 2, s.depth + 1});
            stack.push_back({mid, s.hi, s.tol / 2, s.depth + 1});
        }
    }
    return out;
}

} // namespace gsmsplit
