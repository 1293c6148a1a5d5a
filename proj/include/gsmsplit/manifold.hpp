#pragma once

// Multiprecision invariant-manifold computation for polynomial maps:
// Fourier-Taylor coefficients b_k of x(t) = sum b_k e^{kt}, orbit marching
// through the map recurrence with tangent propagation, the first
// homoclinic phase (x(0) = x(-h)), and the Lazutkin invariant. Everything
// runs in dynamic-precision mpfr; omega cancels to ~2pi|chi|/(h ln 10)
// digits, so precision is set per run by the digit policy.

#include "map_spec.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsmsplit {

using MpReal = boost::multiprecision::mpfr_float;

// working decimal digits: the determinant cancels to ~2 pi |chi| / (h ln 10)
// digits, plus a guard band
inline int digits_auto(double chi_abs, double h, int guard = 30) {
    return static_cast<int>(std::ceil(2 * 3.14159265358979324 * chi_abs / (h * std::log(10.0)))) +
           guard;
}

template <class Real>
struct ManifoldExpansion {
    Real h;         // config parameter
    Real h_step;    // parametrization step: the map's weak-hyperbolicity
                    // exponent (equals h exactly for eps-basis tables)
    Real eps_lin;   // d_x f(0,h) from the table at run precision
    int M = 0;
    std::vector<Real> b;      // b[0] unused; b[1] = 1
    std::vector<Real> fpoly;  // collapsed f coefficients, fpoly[d] x^d
    int precision_digits = 0;
};

namespace detail {

template <class Real>
std::vector<Real> collapse_f(const MapSpec& spec, const Real& h) {
    if (spec.kind != MapCase::polynomial)
        throw std::domain_error("manifold: polynomial maps only (enter trig families truncated)");
    Real eps = epsilon_of_h(h);
    int maxdeg = 0;
    for (const auto& [kj, v] : spec.coeffs) maxdeg = std::max(maxdeg, kj.second);
    std::vector<Real> c(maxdeg + 1, Real(0));
    for (const auto& [kj, v] : spec.coeffs)
        c[kj.second] += row_weight(spec, kj.first, h, eps) * to_real<Real>(v.re);
    return c;
}

template <class Real>
Real poly_eval(const std::vector<Real>& c, const Real& x) {
    Real v(0);
    for (int d = static_cast<int>(c.size()) - 1; d >= 0; --d) v = v * x + c[d];
    return v;
}

template <class Real>
Real poly_eval_dx(const std::vector<Real>& c, const Real& x) {
    Real v(0);
    for (int d = static_cast<int>(c.size()) - 1; d >= 1; --d) v = v * x + d * c[d];
    return v;
}

} // namespace detail

// Solve the triangular coefficient recurrence
//   4 sinh^2(k h/2) b_k = [e^{kt}] f(sum b_j e^{jt}, h),  b_1 = 1.
// The k = 1 equation is the degenerate identity eps b_1 = eps b_1; the
// normalization is fixed later by the homoclinic phase shift.
template <class Real>
ManifoldExpansion<Real> unstable_coeffs(const MapSpec& spec, const Real& h, int M) {
    using std::sinh, std::asinh, std::sqrt;
    if (M < 3) throw std::invalid_argument("unstable_coeffs: M >= 3");
    ManifoldExpansion<Real> ex;
    ex.h = h;
    ex.fpoly = detail::collapse_f(spec, h);
    ex.eps_lin = ex.fpoly.size() > 1 ? ex.fpoly[1] : Real(0);
    if (!(ex.eps_lin > 0))
        throw std::domain_error("unstable_coeffs: map is not weakly hyperbolic (d_x f(0,h) <= 0)");
    ex.h_step = spec.basis == CoeffBasis::eps ? h : 2 * asinh(sqrt(ex.eps_lin) / 2);
    ex.M = M;
    ex.precision_digits = static_cast<int>(Real::default_precision());
    const int maxdeg = static_cast<int>(ex.fpoly.size()) - 1;
    ex.b.assign(M + 1, Real(0));
    ex.b[1] = 1;
    // pows[d][j] = [e^{jt}] x(t)^d, filled column by column (triangular)
    std::vector<std::vector<Real>> pows(maxdeg + 1, std::vector<Real>(M + 1, Real(0)));
    if (maxdeg >= 1) pows[1][1] = 1;
    for (int k = 2; k <= M; ++k) {
        for (int d = 2; d <= maxdeg; ++d) {
            Real s(0);
            for (int i = 1; i < k; ++i)
                if (pows[d - 1][k - i] != 0 && ex.b[i] != 0) s += pows[d - 1][k - i] * ex.b[i];
            pows[d][k] = s;
        }
        Real rhs(0);
        for (int d = 2; d <= maxdeg; ++d)
            if (ex.fpoly[d] != 0) rhs += ex.fpoly[d] * pows[d][k];
        Real sk = sinh(k * ex.h_step / 2);
        Real den = 4 * sk * sk - ex.eps_lin;
        if (!(den > 0))
            throw std::logic_error("unstable_coeffs: resonant_denominator (cannot occur for h>0)");
        ex.b[k] = rhs / den;
        if (maxdeg >= 1) pows[1][k] = ex.b[k];
    }
    return ex;
}

// Independent verification of the coefficient recurrence: recompute the
// e^{kt} coefficients of f(x(t),h) by plain repeated convolution with the
// final b table and return |4 sinh^2(k h/2) b_k - coeff_k| for k = 2..M.
template <class Real>
std::vector<Real> recurrence_residuals(const ManifoldExpansion<Real>& ex) {
    using std::abs, std::sinh;
    const int M = ex.M;
    const int maxdeg = static_cast<int>(ex.fpoly.size()) - 1;
    std::vector<std::vector<Real>> pw(maxdeg + 1, std::vector<Real>(M + 1, Real(0)));
    for (int k = 1; k <= M; ++k) pw[1][k] = ex.b[k];
    for (int d = 2; d <= maxdeg; ++d)
        for (int k = d; k <= M; ++k) {
            Real s(0);
            for (int i = 1; i < k; ++i) s += pw[d - 1][k - i] * ex.b[i];
            pw[d][k] = s;
        }
    std::vector<Real> out;
    for (int k = 2; k <= M; ++k) {
        Real rhsk(0);
        for (int d = 1; d <= maxdeg; ++d)
            if (ex.fpoly[d] != 0) rhsk += ex.fpoly[d] * pw[d][k];
        Real sk = sinh(k * ex.h_step / 2);
        out.push_back(abs(4 * sk * sk * ex.b[k] - rhsk));
    }
    return out;
}

template <class Real>
struct OrbitPoint {
    Real t;       // parameter of the leading point
    Real x;       // x(t)
    Real x_prev;  // x(t - h_step)
    Real xdot;    // dx/dt, propagated through the linearized recurrence
    Real xdot_prev;
};

namespace detail {

template <class Real>
void series_seed(const ManifoldExpansion<Real>& ex, const Real& t, Real& x, Real& xdot) {
    using std::exp;
    Real et = exp(t), ek(1);
    x = 0;
    xdot = 0;
    for (int k = 1; k <= ex.M; ++k) {
        ek *= et;
        x += ex.b[k] * ek;
        xdot += k * ex.b[k] * ek;
    }
}

} // namespace detail

// Evaluate the expansion at t0 << 0 and iterate the map recurrence
//   x(t+h) = 2x(t) - x(t-h) + f(x(t),h)
// for `steps` steps; the tangent rides the linearized recurrence.
template <class Real>
OrbitPoint<Real> march_orbit(const ManifoldExpansion<Real>& ex, const Real& t0, long steps,
                             std::vector<Real>* y_trace = nullptr) {
    using std::abs;
    if (steps < 0) throw std::invalid_argument("march_orbit: negative step count");
    Real x0, d0, x1, d1;
    detail::series_seed(ex, Real(t0 - ex.h_step), x0, d0);
    detail::series_seed(ex, t0, x1, d1);
    if (y_trace) {
        y_trace->clear();
        y_trace->push_back(x1 - x0);
    }
    for (long s = 0; s < steps; ++s) {
        Real fx = detail::poly_eval(ex.fpoly, x1);
        Real dfx = detail::poly_eval_dx(ex.fpoly, x1);
        Real x2 = 2 * x1 - x0 + fx;
        Real d2 = 2 * d1 - d0 + dfx * d1;
        x0 = x1;
        d0 = d1;
        x1 = x2;
        d1 = d2;
        if (!(abs(x1) < Real(1e10)))
            throw std::runtime_error("march_orbit: overflow at step " + std::to_string(s));
        if (y_trace) y_trace->push_back(x1 - x0);
    }
    return {t0 + steps * ex.h_step, x1, x0, d1, d0};
}

// march to a target parameter value; (t_target - t0)/h_step is rounded to
// an integer step count, shifting t0 if needed
template <class Real>
OrbitPoint<Real> march_orbit_to(const ManifoldExpansion<Real>& ex, const Real& t0,
                                const Real& t_target) {
    using std::floor;
    long steps = static_cast<long>(floor((t_target - t0) / ex.h_step + Real(1) / 2));
    if (steps < 0) throw std::invalid_argument("march_orbit_to: target left of the seed");
    Real t0_adj = t_target - steps * ex.h_step;
    return march_orbit(ex, t0_adj, steps);
}

// seed truncation estimate |b_M e^{M t0}|
template <class Real>
Real seed_tail(const ManifoldExpansion<Real>& ex, const Real& t0) {
    using std::abs, std::exp;
    return abs(ex.b[ex.M]) * exp(ex.M * t0);
}

template <class Real>
struct PhaseResult {
    Real shift;        // s with x(s) = x(s - h_step): the first homoclinic phase
    Real x_at_root;    // x(s)
    Real g_residual;   // |x(s) - x(s-h)| after Newton
    long grid_index;   // steps from t0 to the bracketing grid point
    int newton_iters = 0;
    bool multiple_roots = false;
};

// Find the first sign change of y(t) = x(t) - x(t-h) along the rising
// branch, then Newton (with the marched tangent) on g(s) = x(s) - x(s-h).
template <class Real>
PhaseResult<Real> first_homoclinic_phase(const ManifoldExpansion<Real>& ex, const Real& t0,
                                         int digits) {
    using std::abs, std::ceil;
    Real span = Real(6) - t0;
    long cap = static_cast<long>(ceil(span / ex.h_step));
    std::vector<Real> ys;
    march_orbit(ex, t0, cap, &ys);
    long jstar = -1;
    for (long j = 1; j < static_cast<long>(ys.size()); ++j) {
        if (!(ys[j] > 0)) {
            jstar = j;
            break;
        }
    }
    if (jstar < 0)
        throw std::runtime_error("first_homoclinic_phase: no_root_in_window (y stayed positive)");
    PhaseResult<Real> out;
    out.grid_index = jstar;
    // extra sign changes within the next period would mean several
    // candidate intersections; flag them
    for (long j = jstar + 1; j < std::min<long>(jstar + 3, ys.size()); ++j)
        if (ys[j] > 0) out.multiple_roots = true;

    // Newton on tau with bracket [t0 + (jstar-1) h, t0 + jstar h]
    Real lo = t0 + (jstar - 1) * ex.h_step;
    Real hi = t0 + jstar * ex.h_step;
    Real tau = hi;
    using std::pow;
    const Real tol = pow(Real(10), -(digits - 5));
    for (int it = 0; it < 200; ++it) {
        ++out.newton_iters;
        OrbitPoint<Real> p = march_orbit(ex, Real(tau - jstar * ex.h_step), jstar);
        Real g = p.x - p.x_prev;
        Real dg = p.xdot - p.xdot_prev;
        Real step = g / dg;
        Real next = tau - step;
        if (!(next > lo) || !(next < hi)) next = (lo + hi) / 2;  // safeguard
        if (g > 0)
            lo = tau;
        else
            hi = tau;
        bool done = abs(next - tau) < tol * (1 + abs(tau));
        tau = next;
        if (done) break;
    }
    OrbitPoint<Real> fin = march_orbit(ex, Real(tau - jstar * ex.h_step), jstar);
    out.shift = tau;
    out.x_at_root = fin.x;
    out.g_residual = abs(fin.x - fin.x_prev);
    return out;
}

template <class Real>
struct SplittingResult {
    Real h;
    Real h_step;
    Real chi_abs;
    Real omega;        // Lazutkin invariant at the first homoclinic point
    Real omega_at_Fp;  // same invariant one map step along the orbit
    Real omega_tilde;
    Real shift;        // homoclinic phase
    Real x0;           // x at the homoclinic point (near the hump top)
    // diagnostics
    int M = 0;
    Real t0;
    long steps = 0;
    Real seed_tail;
    Real phase_residual;
    int precision_digits = 0;
};

// omega_tilde(h) = h^{2 alpha + 2} lambda^{-2} e^{2 pi |chi| / h} omega
template <class Real>
Real omega_tilde(const Real& omega, const Real& h, const Rational& alpha, const Real& lambda,
                 const Real& chi_abs) {
    using std::pow, std::exp, std::atan;
    const Real pi = Real(4) * atan(Real(1));
    Real expo = to_real<Real>(2 * alpha + 2);
    return pow(h, expo) / (lambda * lambda) * exp(2 * pi * chi_abs / h) * omega;
}

// Core pipeline. Caller has already set the working precision and built h
// at it. The stable manifold enters through the reflection
// x^s(t) = x^u(-t - h), which pins gamma^s(0) = p once x(0) = x(-h); the
// invariant collapses to
//   omega(p) = xdot(0)^2 - xdot(-h)^2,
// and one map step along the orbit gives the cross-check
//   omega(F p) = xdot(h) xdot(-h) - xdot(0) xdot(-2h).
template <class Real>
SplittingResult<Real> lazutkin_omega(const MapSpec& spec, const Real& h, int digits,
                                     const Real& chi_abs, const Rational& alpha,
                                     const Real& lambda, int extra_M = 0, int extra_t0 = 0) {
    using std::abs, std::ceil, std::log, std::pow, std::min, std::max;
    const Real ln10 = log(Real(10));
    // seed/order policy: |b_M e^{M t0}| < 10^{-digits} with t0 >= -40
    // (extra_M / extra_t0 deepen it, for stability cross-checks)
    Real t0 = -min(Real(40), max(Real(20), Real(digits) * ln10 / 16)) - extra_t0;
    int M = static_cast<int>(ceil((digits * ln10 + 16) / abs(t0))) + 4 + extra_M;
    ManifoldExpansion<Real> ex = unstable_coeffs(spec, h, M);
    while (seed_tail(ex, Real(t0 + ex.h_step)) > pow(Real(10), -digits)) {
        if (M > 4000)
            throw std::runtime_error("lazutkin_omega: seed bound unreachable with t0 >= -40");
        M = M * 3 / 2;
        ex = unstable_coeffs(spec, h, M);
    }
    PhaseResult<Real> ph = first_homoclinic_phase(ex, t0, digits);
    // one final march from the common seed, recording x/xdot at
    // tau + {-2h, -h, 0, +h}
    long J = ph.grid_index + 1;  // steps from seed to tau + h
    Real seed = ph.shift + ex.h_step - J * ex.h_step;
    Real xs[4], ds[4];  // offsets -2h, -h, 0, +h
    {
        Real x0v, d0v, x1v, d1v;
        detail::series_seed(ex, Real(seed - ex.h_step), x0v, d0v);
        detail::series_seed(ex, seed, x1v, d1v);
        for (long s = 0; s < J; ++s) {
            Real fx = detail::poly_eval(ex.fpoly, x1v);
            Real dfx = detail::poly_eval_dx(ex.fpoly, x1v);
            Real x2 = 2 * x1v - x0v + fx;
            Real d2 = 2 * d1v - d0v + dfx * d1v;
            x0v = x1v;
            d0v = d1v;
            x1v = x2;
            d1v = d2;
            long off = s - (J - 4);  // s = J-4..J-1 -> offsets -2h..+h
            if (off >= 0 && off < 4) {
                xs[off] = x1v;
                ds[off] = d1v;
            }
        }
    }
    SplittingResult<Real> out;
    out.h = h;
    out.h_step = ex.h_step;
    out.chi_abs = chi_abs;
    out.omega = ds[2] * ds[2] - ds[1] * ds[1];
    out.omega_at_Fp = ds[3] * ds[1] - ds[2] * ds[0];
    if (abs(out.omega) < pow(Real(10), -digits + 10))
        throw std::runtime_error(
            "lazutkin_omega: precision_insufficient (omega cancels below the digit budget; "
            "raise --digits)");
    out.omega_tilde = omega_tilde(out.omega, ex.h_step, alpha, lambda, chi_abs);
    out.shift = ph.shift;
    out.x0 = xs[2];
    out.M = ex.M;
    out.t0 = t0;
    out.steps = J;
    out.seed_tail = seed_tail(ex, t0);
    out.phase_residual = ph.g_residual;
    out.precision_digits = digits;
    return out;
}

} // namespace gsmsplit
