#pragma once

// The model linear difference equation D2(phi) = H(z) phi with
//   H(z) = (1+1/z)^E - 2 + (1-1/z)^E.
// xi_s(z) = z^E solves it exactly; xi_p = b xi_s with
// Delta b = -1/(xi_s(z) xi_s(z+1)) is the independent solution normalized
// to W(xi_p, xi_s) = 1. All powers use the principal branch; callers keep
// z, z+-1 and the sum path z-k off the negative real axis.

#include "values.hpp"

#include <cmath>
#include <stdexcept>

namespace gsmsplit {

template <class C>
C principal_pow(const C& z, const std::remove_cvref_t<decltype(std::declval<C>().real())>& e) {
    return exp(C(e) * log(z));
}

template <class C>
C linear_H(const C& z, const Rational& E) {
    using R = std::remove_cvref_t<decltype(std::declval<C>().real())>;
    R e = to_real<R>(E);
    C one(1);
    return principal_pow(one + one / z, e) - C(2) + principal_pow(one - one / z, e);
}

template <class C>
C xi_s(const C& z, const Rational& E) {
    using R = std::remove_cvref_t<decltype(std::declval<C>().real())>;
    return principal_pow(z, to_real<R>(E));
}

// W(u1, u2)(z) = u1(z) u2(z+1) - u2(z) u1(z+1)
template <class C>
C wronskian(const C& u1_z, const C& u1_z1, const C& u2_z, const C& u2_z1) {
    return u1_z * u2_z1 - u2_z * u1_z1;
}

template <class C>
struct XiPair {
    C xi_s, xi_p;
    std::remove_cvref_t<decltype(std::declval<C>().real())> tail_bound{};
    int terms = 0;
};

// xi_p(z) = -z^E sum_{k>=1} 1/((z-k)^E (z-k+1)^E), truncated once the
// integral-comparison tail bound |z-k|^{1-2E}/(2E-1) drops below tol.
template <class C>
XiPair<C> linear_basis_H(const Rational& E, const C& z,
                         const std::remove_cvref_t<decltype(std::declval<C>().real())>& tol,
                         int max_terms = 2000000) {
    using R = std::remove_cvref_t<decltype(std::declval<C>().real())>;
    using std::abs;
    R e = to_real<R>(E);
    if (!(e > R(0.5)))
        throw std::invalid_argument("linear_basis_H: needs E > 1/2 for the tail to converge");
    XiPair<C> out;
    out.xi_s = principal_pow(z, e);
    C prev_pow = principal_pow(z, -e);  // (z-k+1)^{-E} for k = 1
    C sum(0);
    int k = 1;
    for (;; ++k) {
        if (k > max_terms)
            throw std::runtime_error("linear_basis_H: tail_not_converged at k=" +
                                     std::to_string(k));
        C cur_pow = principal_pow(z - C(R(k)), -e);
        sum += cur_pow * prev_pow;
        prev_pow = cur_pow;
        R rem = abs(principal_pow(z - C(R(k)), R(1) - 2 * e)) / (2 * e - 1);
        if (rem < tol && k >= 4) {
            out.tail_bound = rem;
            break;
        }
    }
    out.terms = k;
    out.xi_p = -out.xi_s * sum;
    return out;
}

} // namespace gsmsplit
