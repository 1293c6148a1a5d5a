#pragma once

// Numerical realization of the analytic inner solutions: evaluate the
// formal series far out on the horizontal line through z, then march the
// second-order recurrence toward z (rightward for the unstable branch,
// leftward for the stable one). Derivatives ride along through the
// linearized recurrence. The difference invariant
//   omega_in(z) ~ 2 pi i W(phi_u - phi_s, d_z phi_s)(z)
//   omega_tilde_in(z) = 2 e^{2 pi i z} Re omega_in(z)
// plateaus at the constant that predicts the splitting amplitude.

#include "inner_equation.hpp"
#include "log_series.hpp"

#include <cmath>
#include <stdexcept>

namespace gsmsplit {

template <class C>
using real_of = std::remove_cvref_t<decltype(std::declval<C>().real())>;

enum class Branch { unstable, stable };

template <class C>
struct InnerSample {
    C z;
    Branch branch = Branch::unstable;
    C phi;
    C dphi;
    real_of<C> residual{};  // |D2 phi - g(phi)| at z from the marched triple
};

template <class C>
struct SeriesValue {
    C value;
    C deriv;
    real_of<C> tail{};       // magnitude of the last retained term
    bool decreasing = true;  // optimal-truncation check at this z
};

namespace detail {

template <class C>
C pi_value() {
    using R = real_of<C>;
    using std::atan;
    return C(R(4) * atan(R(1)));
}

} // namespace detail

// Evaluate the truncated formal solution and its z-derivative at z.
// Principal log branch; callers keep Re z != 0 or Im z < 0.
template <class C>
SeriesValue<C> eval_series(const FormalSolution<NumericRing<C>>& fs, const C& z) {
    using R = real_of<C>;
    using std::abs;
    const int n = fs.n;
    const Rational r(2, n - 1);
    const R rr = to_real<R>(r);
    C L = log(z);
    C zmr = exp(C(-rr) * L);  // z^{-r}
    C zk = C(1);
    SeriesValue<C> out{C(0), C(0), R(0), true};
    R prev_mag = R(0);
    bool have_prev = false;
    int bad = 0;
    for (int k = 1; k <= fs.u.kmax(); ++k) {
        zk = zk * zmr;
        const auto& row = fs.u.t[k];
        if (row.empty()) continue;
        C poly(0), dpoly(0);
        for (int j = static_cast<int>(row.size()) - 1; j >= 1; --j) {
            poly = poly * L + row[j];
            dpoly = dpoly * L + C(j) * row[j];
        }
        if (!row.empty()) poly = poly * L + row[0];
        C term = zk * poly;
        C dterm = zk / z * (C(-k * rr) * poly + dpoly);
        out.value += term;
        out.deriv += dterm;
        R mag = abs(term);
        out.tail = mag;
        if (have_prev && mag > prev_mag && ++bad > 2) out.decreasing = false;
        prev_mag = mag;
        have_prev = true;
    }
    if (fs.kind == MapCase::trigonometric) {
        // phi0 = (1/(n-1)) log(-r z^{-2})
        out.value += log(C(-rr) * exp(C(R(-2)) * L)) / C(R(n - 1));
        out.deriv += C(-rr) / z;
    }
    return out;
}

// g(phi) and its derivative for pointwise marching
template <class C>
C g_rhs(const InnerRHS<NumericRing<C>>& rhs, const C& phi) {
    C out(0);
    if (rhs.kind == MapCase::polynomial) {
        C p = pow(phi, rhs.n);
        out = -p;
        for (const auto& [k, gk] : rhs.G) out += gk * pow(phi, k);
    } else {
        out = -exp(C(rhs.n - 1) * phi);
        for (const auto& [k, gk] : rhs.G) out += gk * exp(C(k) * phi);
    }
    return out;
}

template <class C>
C dg_rhs(const InnerRHS<NumericRing<C>>& rhs, const C& phi) {
    C out(0);
    if (rhs.kind == MapCase::polynomial) {
        out = C(-rhs.n) * pow(phi, rhs.n - 1);
        for (const auto& [k, gk] : rhs.G) out += C(k) * gk * pow(phi, k - 1);
    } else {
        out = C(-(rhs.n - 1)) * exp(C(rhs.n - 1) * phi);
        for (const auto& [k, gk] : rhs.G) out += C(k) * gk * exp(C(k) * phi);
    }
    return out;
}

template <class C>
struct BranchData {
    InnerSample<C> at_z;
    C phi_z1, dphi_z1;        // values at z + 1
    real_of<C> seed_residual; // series self-consistency at the seed
    real_of<C> seed_tail;
};

// Seed at z -/+ K and march to z (and z+1). The unstable branch marches
// rightward from {z-K-1, z-K}, the stable one leftward from {z+K+1, z+K};
// both schedules visit the same offsets, which maximizes cancellation in
// the difference phi_u - phi_s.
template <class C>
BranchData<C> march_inner(const InnerRHS<NumericRing<C>>& rhs,
                          const FormalSolution<NumericRing<C>>& fs, const C& z, int K,
                          Branch branch) {
    using R = real_of<C>;
    using std::abs;
    if (K < 2) throw std::invalid_argument("march_inner: K too small");
    const int dir = branch == Branch::unstable ? +1 : -1;
    // seeds at offsets -dir*(K+1), -dir*K from z; march toward +dir until
    // the offsets -1, 0, +1 have all been visited
    int p0 = -dir * (K + 1), p1 = -dir * K;
    C w0 = z + C(R(p0)), w1 = z + C(R(p1));
    SeriesValue<C> s0 = eval_series(fs, w0);
    SeriesValue<C> s1 = eval_series(fs, w1);
    if (!s0.decreasing || !s1.decreasing)
        throw std::runtime_error("march_inner: seed_divergence (series not decreasing at seed)");
    BranchData<C> out;
    out.seed_tail = s0.tail + s1.tail;
    // seed self-consistency: recurrence prediction vs series one point in
    {
        SeriesValue<C> s2 = eval_series(fs, z + C(R(p1 + dir)));
        out.seed_residual = abs(s2.value - (C(2) * s1.value - s0.value + g_rhs(rhs, s1.value)));
    }
    C f0 = s0.value, f1 = s1.value, d0 = s0.deriv, d1 = s1.deriv;
    C at[3]{}, dat[3]{};  // offsets -1, 0, +1
    int need = 3;
    for (int pos = p1; need > 0; ) {
        pos += dir;
        C f2 = C(2) * f1 - f0 + g_rhs(rhs, f1);
        C d2 = C(2) * d1 - d0 + dg_rhs(rhs, f1) * d1;
        f0 = f1;
        d0 = d1;
        f1 = f2;
        d1 = d2;
        if (!(abs(f1) < R(1e30)))  // also trips on nan/inf
            throw std::runtime_error("march_inner: overflow at offset " + std::to_string(pos));
        if (pos >= -1 && pos <= 1) {
            at[pos + 1] = f1;
            dat[pos + 1] = d1;
            --need;
        }
        if ((dir > 0 && pos > 1) || (dir < 0 && pos < -1))
            throw std::logic_error("march_inner: walked past target");
    }
    out.at_z.z = z;
    out.at_z.branch = branch;
    out.at_z.phi = at[1];
    out.at_z.dphi = dat[1];
    out.phi_z1 = at[2];
    out.dphi_z1 = dat[2];
    out.at_z.residual = abs(at[2] - C(2) * at[1] + at[0] - g_rhs(rhs, at[1]));
    return out;
}

// Public sample interface: seed-plus-march evaluation of one branch.
template <class C>
InnerSample<C> eval_inner_solution(const InnerRHS<NumericRing<C>>& rhs,
                                   const FormalSolution<NumericRing<C>>& fs, const C& z, int K,
                                   Branch branch) {
    return march_inner(rhs, fs, z, K, branch).at_z;
}

template <class C>
struct OmegaInResult {
    C z;
    C omega_in;
    real_of<C> omega_in_tilde{};
    real_of<C> error_budget{};  // theoretical term magnitude (unit constant) + round-off
    real_of<C> seed_tail{};
    int K = 0;
};

// omega_in(z) ~ 2 pi i [Theta(z) D(d_z phi_s)(z) - d_z phi_s(z) D(Theta)(z)],
// Theta = phi_u - phi_s; omega_tilde_in = 2 e^{2 pi i z} Re omega_in.
template <class C>
OmegaInResult<C> omega_in(const InnerRHS<NumericRing<C>>& rhs,
                          const FormalSolution<NumericRing<C>>& fs, const C& z, int K) {
    using R = real_of<C>;
    using std::abs, std::exp, std::pow;
    BranchData<C> un = march_inner(rhs, fs, z, K, Branch::unstable);
    BranchData<C> st = march_inner(rhs, fs, z, K, Branch::stable);
    C theta = un.at_z.phi - st.at_z.phi;
    C theta1 = un.phi_z1 - st.phi_z1;
    C dphis = st.at_z.dphi;
    C dphis1 = st.dphi_z1;
    C X = theta * (dphis1 - dphis) - dphis * (theta1 - theta);
    const C I(R(0), R(1));
    const C pi = detail::pi_value<C>();
    OmegaInResult<C> out;
    out.z = z;
    out.K = K;
    out.omega_in = R(2) * pi * I * X;
    C scale = exp(R(2) * pi * I * z);
    out.omega_in_tilde = R(2) * (scale * C(out.omega_in.real())).real();
    out.seed_tail = un.seed_tail + st.seed_tail;
    // error terms of the computable formula: O(e^{-2 pi i z} z^{2r+2}) and
    // O(e^{-2 pi i z}), both with unquantified constants taken as 1, plus a
    // round-off estimate for the cancellation in Theta
    R absz = abs(z);
    R r2 = to_real<R>(Rational(2) * Rational(2, rhs.n - 1) + 2);
    R expfac = abs(exp(-R(2) * pi * I * z));
    out.error_budget = expfac * (pow(absz, r2) + 1);
    R eps_mach = std::numeric_limits<R>::epsilon();
    R roundoff = eps_mach * abs(scale) * R(4) * abs(pi) *
                 (abs(un.at_z.phi) + abs(st.at_z.phi)) * (abs(dphis) + abs(dphis1) + R(1));
    out.error_budget += roundoff;
    // Theta underflow guard: the expected size e^{-2pi|Im z|} |z|^E sits
    // below the round-off floor of phi, so the difference would be noise
    R expected = expfac * pow(absz, to_real<R>(Rational(2, rhs.n - 1) + 2)) * R(1e4);
    if (expected < eps_mach * (abs(un.at_z.phi) + abs(st.at_z.phi)))
        throw std::runtime_error(
            "omega_in: precision_insufficient (phi_u - phi_s below round-off; "
            "increase working precision)");
    return out;
}

} // namespace gsmsplit
