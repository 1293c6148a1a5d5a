#pragma once

// Singularity of the (higher-order) limit-flow homoclinic: the time from
// the turning point to infinity,
//   rho(h) = i * int_{x_turn}^inf dx / sqrt(-2U(x)),
// with U the energy polynomial (U(x_turn) = 0, U < 0 beyond). The improper
// ends are removed by u^2 = x - x_turn at the turning point and v = 1/x at
// infinity. Also: the chi rules used by the comparison pipeline and the
// power-basis least-squares extrapolator.

#include "map_spec.hpp"
#include "quadrature.hpp"
#include "values.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace gsmsplit {

// U(x) = sum rows (p, j) -> c * eps^p * x^j; no constant term
struct EnergyPoly {
    std::map<std::pair<int, int>, Rational> rows;

    int degree() const {
        int d = 0;
        for (const auto& [pj, c] : rows) d = std::max(d, pj.second);
        return d;
    }
};

// higher-order limit flow of an eps-basis polynomial map:
// xdd = sum_p eps^p g_p(x), U = integral of the right side
inline EnergyPoly energy_from_map(const MapSpec& spec) {
    if (spec.kind != MapCase::polynomial || spec.basis != CoeffBasis::eps)
        throw std::domain_error("energy_from_map: needs a polynomial eps-basis map");
    EnergyPoly U;
    for (const auto& [kj, v] : spec.coeffs) {
        if (!v.is_real()) throw std::domain_error("energy_from_map: complex coefficient");
        U.rows[{kj.first / 2, kj.second + 1}] += v.re / (kj.second + 1);
    }
    return U;
}

template <class Real>
struct RhoResult {
    Real h{};
    Real x_turn{};
    Real rho_abs{};  // rho = i * rho_abs, Im > 0
    Real quadrature_error{};
    bool converged = true;
};

namespace detail {

template <class Real>
Real eval_poly(const std::vector<Real>& desc, const Real& x) {
    Real v(0);
    for (const auto& c : desc) v = v * x + c;
    return v;
}

} // namespace detail

template <class Real>
RhoResult<Real> singularity_rho(const EnergyPoly& U, const Real& h, const Real& tol) {
    using std::abs, std::sqrt;
    Real eps = epsilon_of_h(h);
    const int D = U.degree();
    if (D % 2 != 0 || D < 2)
        throw std::domain_error("singularity_rho: energy degree must be even and >= 2");
    // Q = -2U, descending coefficients
    std::vector<Real> q(D + 1, Real(0));
    for (const auto& [pj, c] : U.rows) {
        Real w(1);
        for (int p = 0; p < pj.first; ++p) w *= eps;
        q[D - pj.second] += Real(-2) * to_real<Real>(c) * w;
    }
    auto Q = [&](const Real& x) { return detail::eval_poly(q, x); };
    // positive turning point: Q < 0 on (0, x_turn), > 0 beyond
    Real lo = 0, hi = 0;
    {
        Real x = Real(1) / 4;
        int guard = 0;
        while (Q(x) <= 0) {
            lo = x;
            x *= 2;
            if (++guard > 200) throw std::domain_error("singularity_rho: no_positive_root");
        }
        hi = x;
    }
    // bisection then Newton polish
    for (int it = 0; it < 80; ++it) {
        Real mid = (lo + hi) / 2;
        (Q(mid) <= 0 ? lo : hi) = mid;
    }
    Real xt = (lo + hi) / 2;
    {
        std::vector<Real> dq(D);
        for (int i = 0; i < D; ++i) dq[i] = q[i] * (D - i);
        const Real eps_m = std::numeric_limits<Real>::epsilon();
        for (int it = 0; it < 200; ++it) {
            Real step = Q(xt) / detail::eval_poly(dq, xt);
            xt -= step;
            if (abs(step) < 4 * eps_m * (abs(xt) + 1)) break;
        }
    }
    // T = Q / (x - x_turn) by synthetic division (exact cancellation at xt)
    std::vector<Real> t(D);
    t[0] = q[0];
    for (int i = 1; i < D; ++i) t[i] = t[i - 1] * xt + q[i];
    auto T = [&](const Real& x) { return detail::eval_poly(t, x); };

    RhoResult<Real> out;
    out.h = h;
    out.x_turn = xt;
    Real xmid = xt + 1;
    // near part: x = xt + u^2
    auto near_f = [&](const Real& u) -> Real { return Real(2) / sqrt(T(xt + u * u)); };
    QuadResult<Real> near = adaptive_gauss<Real>(near_f, Real(0), sqrt(xmid - xt), tol / 2);
    // far part: v = 1/x; integrand v^{D/2-2} / sqrt(rev(Q)(v))
    std::vector<Real> qq(q.rbegin(), q.rend());
    auto far_f = [&](const Real& v) -> Real {
        Real num(1);
        for (int i = 0; i < D / 2 - 2; ++i) num *= v;
        return num / sqrt(detail::eval_poly(qq, v));
    };
    QuadResult<Real> far = adaptive_gauss<Real>(far_f, Real(0), 1 / xmid, tol / 2);
    out.rho_abs = near.value + far.value;
    out.quadrature_error = near.error + far.error;
    out.converged = near.converged && far.converged;
    if (!out.converged)
        throw std::runtime_error("singularity_rho: quadrature_nonconvergence");
    return out;
}

// 2^{1/4} Gamma(3/4)^2 / sqrt(pi): the sqrt(h) coefficient of the
// singularity recession for the x - x^3 - eps x^7 flow
template <class Real>
Real rho_sqrt_coefficient() {
    using std::sqrt, std::pow, std::atan;
    const Real pi = Real(4) * atan(Real(1));
    Real g = boost::math::tgamma(Real(3) / 4);
    return pow(Real(2), Real(1) / 4) * g * g / sqrt(pi);
}

enum class ChiRule {
    constant_half_pi,  // chi = i pi/2 (f2 and h -> 0 limit)
    truncated_sqrt,    // chi = i (pi/2 - C h^{1/2}) (f1 default)
    full_rho,          // chi = i |rho(h)| from the quadrature
};

// |chi|(h) with Im chi > 0
template <class Real>
Real chi_abs_for(ChiRule rule, const EnergyPoly* energy, const Real& h) {
    using std::atan, std::sqrt;
    const Real pi = Real(4) * atan(Real(1));
    switch (rule) {
        case ChiRule::constant_half_pi:
            return pi / 2;
        case ChiRule::truncated_sqrt:
            return pi / 2 - rho_sqrt_coefficient<Real>() * sqrt(h);
        case ChiRule::full_rho: {
            if (!energy) throw std::domain_error("chi: full_rho rule needs an energy polynomial");
            Real tol = std::numeric_limits<Real>::epsilon() * 100;
            return singularity_rho(*energy, h, tol).rho_abs;
        }
    }
    throw std::logic_error("chi: bad rule");
}

// ---- power-basis least-squares extrapolation ----

template <class Real>
struct ExtrapolationModel {
    std::vector<Real> basis;             // exponents b_i
    std::vector<std::pair<Real, Real>> samples;
    Real limit{};
    std::vector<Real> coeffs;            // a_i of limit + sum a_i h^{b_i}
    Real fit_residual{};
    Real cond_estimate{};
    Real drop_largest_limit{};           // refit limit without the largest-h sample
};

namespace detail {

// solve the small dense normal equations by Gauss elimination with partial
// pivoting; returns a max/min pivot ratio as the conditioning proxy
template <class Real>
std::vector<Real> solve_dense(std::vector<std::vector<Real>> A, std::vector<Real> b,
                              Real& pivot_ratio) {
    using std::abs;
    const int n = static_cast<int>(A.size());
    Real pmax(0), pmin(0);
    for (int col = 0; col < n; ++col) {
        int best = col;
        for (int r = col + 1; r < n; ++r)
            if (abs(A[r][col]) > abs(A[best][col])) best = r;
        std::swap(A[best], A[col]);
        std::swap(b[best], b[col]);
        Real p = abs(A[col][col]);
        if (p == 0) throw std::domain_error("extrapolate: singular normal equations");
        pmax = col == 0 ? p : std::max(pmax, p);
        pmin = col == 0 ? p : std::min(pmin, p);
        for (int r = col + 1; r < n; ++r) {
            Real f = A[r][col] / A[col][col];
            for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<Real> x(n);
    for (int r = n - 1; r >= 0; --r) {
        Real s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
        x[r] = s / A[r][r];
    }
    pivot_ratio = pmin > 0 ? pmax / pmin : Real(0);
    return x;
}

} // namespace detail

// least-squares fit value(h) = limit + sum_i a_i h^{basis_i}
template <class Real>
ExtrapolationModel<Real> extrapolate(const std::vector<std::pair<Real, Real>>& samples,
                                     const std::vector<Real>& basis, int k_terms) {
    using std::abs, std::pow, std::sqrt;
    if (k_terms > static_cast<int>(basis.size()))
        throw std::invalid_argument("extrapolate: k_terms exceeds basis size");
    const int m = static_cast<int>(samples.size());
    const int n = k_terms + 1;
    if (m < n) throw std::invalid_argument("extrapolate: needs >= k_terms+1 samples");
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (samples[i].first == samples[j].first)
                throw std::invalid_argument("extrapolate: duplicate h values");

    auto fit = [&](const std::vector<std::pair<Real, Real>>& pts, Real& residual,
                   Real& cond) -> std::vector<Real> {
        const int mm = static_cast<int>(pts.size());
        std::vector<std::vector<Real>> X(mm, std::vector<Real>(n));
        for (int i = 0; i < mm; ++i) {
            X[i][0] = 1;
            for (int j = 1; j < n; ++j) X[i][j] = pow(pts[i].first, basis[j - 1]);
        }
        std::vector<std::vector<Real>> G(n, std::vector<Real>(n, Real(0)));
        std::vector<Real> rhs(n, Real(0));
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b)
                for (int i = 0; i < mm; ++i) G[a][b] += X[i][a] * X[i][b];
            for (int i = 0; i < mm; ++i) rhs[a] += X[i][a] * pts[i].second;
        }
        std::vector<Real> coef = detail::solve_dense(G, rhs, cond);
        Real ss(0);
        for (int i = 0; i < mm; ++i) {
            Real pred = coef[0];
            for (int j = 1; j < n; ++j) pred += coef[j] * X[i][j];
            ss += (pts[i].second - pred) * (pts[i].second - pred);
        }
        residual = sqrt(ss);
        return coef;
    };

    ExtrapolationModel<Real> model;
    model.basis = basis;
    model.samples = samples;
    std::vector<Real> coef = fit(samples, model.fit_residual, model.cond_estimate);
    const Real cond_guard = pow(std::numeric_limits<Real>::epsilon(), Real(-3) / 4);
    if (model.cond_estimate > cond_guard)
        throw std::domain_error("extrapolate: ill_conditioned basis/sample combination");
    model.limit = coef[0];
    model.coeffs.assign(coef.begin() + 1, coef.end());
    // stability diagnostic: drop the largest-h sample and refit (one fewer
    // term if the system would become underdetermined)
    model.drop_largest_limit = model.limit;
    if (m > 2) {
        auto pts = samples;
        auto largest = std::max_element(pts.begin(), pts.end(),
                                        [](auto& a, auto& b) { return a.first < b.first; });
        pts.erase(largest);
        int kk = std::min<int>(k_terms, static_cast<int>(pts.size()) - 1);
        try {
            model.drop_largest_limit = extrapolate(pts, basis, kk).limit;
        } catch (const std::domain_error&) {
            // sub-fit degenerate; keep the full-fit limit as the diagnostic
        }
    }
    return model;
}

} // namespace gsmsplit
