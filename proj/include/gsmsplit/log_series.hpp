#pragma once

// Formal series in z^{-r} and log z on the lattice r = 2/(n-1), which is
// closed under the +2 exponent shift of Delta^2, and the order-by-order
// solver for the inner equation. All divisions in the recurrence are by
// rationals, so the same code runs over floating complex coefficients or
// exactly over Q[s]/(s^{n-1} - q).

#include "algebraic.hpp"
#include "inner_equation.hpp"
#include "values.hpp"

#include <map>
#include <stdexcept>
#include <vector>

namespace gsmsplit {

// t[k][j] = coefficient of z^{-k r} log^j z. k = 0 (constants) is allowed
// internally; solutions of the inner equation never carry one.
template <class Ring>
struct LogSeries {
    using V = typename Ring::value_type;
    std::vector<std::vector<V>> t;

    int kmax() const { return static_cast<int>(t.size()) - 1; }

    static LogSeries zero(const Ring& R, int kcap) {
        LogSeries s;
        s.t.assign(kcap + 1, {});
        (void)R;
        return s;
    }

    void add_term(const Ring& R, int k, int j, const V& c) {
        if (k > kmax()) return;
        auto& row = t[k];
        if (static_cast<int>(row.size()) <= j) row.resize(j + 1, R.zero());
        row[j] = R.add(row[j], c);
    }

    const V* term(int k, int j) const {
        if (k < 0 || k > kmax() || j < 0 || j >= static_cast<int>(t[k].size())) return nullptr;
        return &t[k][j];
    }
};

// the recurrence coefficient lambda_N (exact rational):
//   power case:  N r (N r + 1) + n c0^{n-1} = (4/(n-1)^2)(N - (n+1)/2)(N + n)
//   exponential: N r (N r + 1) - 2
inline Rational lambda_N(MapCase kind, int n, long N) {
    Rational r(2, n - 1);
    Rational Nr = N * r;
    if (kind == MapCase::polynomial) return Nr * (Nr + 1) - n * r * (r + 1);
    return Nr * (Nr + 1) - 2;
}

namespace series {

template <class Ring>
LogSeries<Ring> add(const Ring& R, const LogSeries<Ring>& a, const LogSeries<Ring>& b) {
    LogSeries<Ring> out = a;
    for (int k = 0; k <= b.kmax() && k <= out.kmax(); ++k)
        for (int j = 0; j < static_cast<int>(b.t[k].size()); ++j)
            out.add_term(R, k, j, b.t[k][j]);
    return out;
}

template <class Ring>
LogSeries<Ring> negate(const Ring& R, const LogSeries<Ring>& a) {
    LogSeries<Ring> out = a;
    for (auto& row : out.t)
        for (auto& c : row) c = R.neg(c);
    return out;
}

template <class Ring>
LogSeries<Ring> mul(const Ring& R, const LogSeries<Ring>& a, const LogSeries<Ring>& b,
                    int kcap) {
    LogSeries<Ring> out = LogSeries<Ring>::zero(R, kcap);
    for (int k1 = 0; k1 <= a.kmax(); ++k1) {
        if (a.t[k1].empty()) continue;
        for (int k2 = 0; k2 + k1 <= kcap && k2 <= b.kmax(); ++k2) {
            if (b.t[k2].empty()) continue;
            for (int j1 = 0; j1 < static_cast<int>(a.t[k1].size()); ++j1) {
                if (R.is_zero(a.t[k1][j1])) continue;
                for (int j2 = 0; j2 < static_cast<int>(b.t[k2].size()); ++j2) {
                    if (R.is_zero(b.t[k2][j2])) continue;
                    out.add_term(R, k1 + k2, j1 + j2, R.mul(a.t[k1][j1], b.t[k2][j2]));
                }
            }
        }
    }
    return out;
}

// Delta^2 = sum_{p>=1} (2/(2p)!) d^{2p}/dz^{2p}; each term z^{-kr} log^j
// walks down a rational-weight cascade, two derivative steps per p.
template <class Ring>
LogSeries<Ring> delta2(const Ring& R, const LogSeries<Ring>& s, int n, int kcap) {
    Rational r(2, n - 1);
    LogSeries<Ring> out = LogSeries<Ring>::zero(R, kcap);
    for (int k = 0; k <= s.kmax(); ++k) {
        for (int j = 0; j < static_cast<int>(s.t[k].size()); ++j) {
            const auto& coeff = s.t[k][j];
            if (R.is_zero(coeff)) continue;
            std::vector<Rational> w(j + 1, Rational(0));  // log-power weights
            w[j] = 1;
            Rational fact(1);
            for (int p = 1;; ++p) {
                int kk = k + p * (n - 1);
                if (kk > kcap) break;
                for (int step = 0; step < 2; ++step) {
                    Rational a = k * r + (2 * (p - 1) + step);
                    std::vector<Rational> nw(w.size(), Rational(0));
                    for (int jj = static_cast<int>(w.size()) - 1; jj >= 0; --jj) {
                        if (w[jj] == 0) continue;
                        nw[jj] += -a * w[jj];
                        if (jj >= 1) nw[jj - 1] += jj * w[jj];
                    }
                    w = std::move(nw);
                }
                fact *= (2 * p - 1) * (2 * p);
                Rational scale = Rational(2) / fact;
                for (int jj = 0; jj < static_cast<int>(w.size()); ++jj) {
                    if (w[jj] == 0) continue;
                    out.add_term(R, kk, jj, R.mul_rat(coeff, scale * w[jj]));
                }
            }
        }
    }
    return out;
}

// exp of a series with no constant term
template <class Ring>
LogSeries<Ring> exp_no_const(const Ring& R, const LogSeries<Ring>& u, int kcap) {
    LogSeries<Ring> out = LogSeries<Ring>::zero(R, kcap);
    out.add_term(R, 0, 0, R.one());
    LogSeries<Ring> upow = out;
    Rational fact(1);
    for (int p = 1; p <= kcap; ++p) {
        upow = mul(R, upow, u, kcap);
        fact *= p;
        bool any = false;
        for (int k = 0; k <= upow.kmax(); ++k)
            for (int j = 0; j < static_cast<int>(upow.t[k].size()); ++j)
                if (!R.is_zero(upow.t[k][j])) {
                    out.add_term(R, k, j, R.mul_rat(upow.t[k][j], Rational(1) / fact));
                    any = true;
                }
        if (!any) break;
    }
    return out;
}

} // namespace series

// Right-hand side g of the inner equation, with coefficients already in the
// ring. `sym` is the symbolic amplitude: unused in the power case, the
// e^{phi0} amplitude (s^{n-1} = -r) in the exponential case.
template <class Ring>
struct InnerRHS {
    MapCase kind = MapCase::polynomial;
    int n = 0;
    std::map<int, typename Ring::value_type> G;
    typename Ring::value_type sym{};
};

// exact-ring right-hand side; requires lambda-scaled G to be rational
inline InnerRHS<AlgebraicRing> make_exact_rhs(const AlgebraicRing& R, const InnerEquation& eq) {
    InnerRHS<AlgebraicRing> rhs;
    rhs.kind = eq.kind;
    rhs.n = eq.n;
    auto G = eq.rational_G();
    if (!G) throw std::domain_error("inner equation has no exact rational G; use a numeric ring");
    for (const auto& [k, v] : *G) rhs.G[k] = R.from_rational(v);
    rhs.sym = R.symbol();
    return rhs;
}

template <class C>
InnerRHS<NumericRing<C>> make_numeric_rhs(const NumericRing<C>&, const InnerEquation& eq) {
    InnerRHS<NumericRing<C>> rhs;
    rhs.kind = eq.kind;
    rhs.n = eq.n;
    for (const auto& [k, v] : eq.G<C>()) rhs.G[k] = v;
    if (eq.kind == MapCase::trigonometric) rhs.sym = eq.symbol_value<C>();
    return rhs;
}

namespace series {

// g(phi) truncated:
//   power:       -phi^n + sum_k G_k phi^k
//   exponential: r z^{-2} e^{(n-1)u} - ... with e^{k phi} = s^k z^{-kr} e^{ku}
template <class Ring>
LogSeries<Ring> compose_g(const Ring& R, const InnerRHS<Ring>& rhs, const LogSeries<Ring>& phi,
                          int kcap) {
    int n = rhs.n;
    LogSeries<Ring> out = LogSeries<Ring>::zero(R, kcap);
    if (rhs.kind == MapCase::polynomial) {
        int top = n;
        for (const auto& [k, v] : rhs.G) top = std::max(top, k);
        LogSeries<Ring> pw = phi;
        for (int p = 2; p <= top; ++p) {
            pw = mul(R, pw, phi, kcap);
            const typename Ring::value_type* gk = nullptr;
            auto it = rhs.G.find(p);
            if (it != rhs.G.end()) gk = &it->second;
            if (p != n && gk == nullptr) continue;
            for (int k = 0; k <= pw.kmax(); ++k)
                for (int j = 0; j < static_cast<int>(pw.t[k].size()); ++j) {
                    if (R.is_zero(pw.t[k][j])) continue;
                    if (p == n) out.add_term(R, k, j, R.neg(pw.t[k][j]));
                    if (gk) out.add_term(R, k, j, R.mul(pw.t[k][j], *gk));
                }
        }
        return out;
    }
    // exponential case: phi here is the u-series (prefix phi0 handled here)
    Rational r(2, n - 1);
    LogSeries<Ring> E = exp_no_const(R, phi, kcap);  // e^{u}
    // powers of s (reduced) and of e^{u}
    auto add_scaled = [&](const LogSeries<Ring>& Ek, int shift,
                          const typename Ring::value_type& scale) {
        for (int k = 0; k + shift <= kcap && k <= Ek.kmax(); ++k)
            for (int j = 0; j < static_cast<int>(Ek.t[k].size()); ++j) {
                if (R.is_zero(Ek.t[k][j])) continue;
                out.add_term(R, k + shift, j, R.mul(Ek.t[k][j], scale));
            }
    };
    int top = n - 1;
    for (const auto& [k, v] : rhs.G) top = std::max(top, k);
    LogSeries<Ring> Ek = E;
    typename Ring::value_type sp = rhs.sym;
    for (int p = 2; p <= top; ++p) {
        Ek = mul(R, Ek, E, kcap);
        sp = R.mul(sp, rhs.sym);
        if (p == n - 1) {
            // -e^{(n-1)phi} = -s^{n-1} z^{-2} e^{(n-1)u} = r z^{-2} e^{(n-1)u}
            add_scaled(Ek, n - 1, R.from_rational(r));
        }
        auto it = rhs.G.find(p);
        if (it != rhs.G.end()) add_scaled(Ek, p, R.mul(it->second, sp));
    }
    if (n - 1 == 1) add_scaled(E, 1, R.from_rational(r));
    if (auto it = rhs.G.find(1); it != rhs.G.end())
        add_scaled(E, 1, R.mul(it->second, rhs.sym));
    return out;
}

// eps(phi) = Delta^2(phi) - g(phi); exponential case includes Delta^2(phi0)
template <class Ring>
LogSeries<Ring> residual(const Ring& R, const InnerRHS<Ring>& rhs, const LogSeries<Ring>& phi,
                         int kcap) {
    int n = rhs.n;
    LogSeries<Ring> eps = delta2(R, phi, n, kcap);
    LogSeries<Ring> g = compose_g(R, rhs, phi, kcap);
    for (int k = 0; k <= g.kmax(); ++k)
        for (int j = 0; j < static_cast<int>(g.t[k].size()); ++j)
            if (!R.is_zero(g.t[k][j])) eps.add_term(R, k, j, R.neg(g.t[k][j]));
    if (rhs.kind == MapCase::trigonometric) {
        // Delta^2(phi0) = r sum_{p>=1} z^{-2p}/p
        Rational r(2, n - 1);
        for (int p = 1; p * (n - 1) <= kcap; ++p)
            eps.add_term(R, p * (n - 1), 0, R.from_rational(r / p));
    }
    return eps;
}

} // namespace series

template <class Ring>
struct FormalSolution {
    MapCase kind = MapCase::polynomial;
    int n = 0;
    int N = 0;           // truncation order (in z^{-r} steps)
    int m_resonant = 0;  // order where the log enters (0: none)
    typename Ring::value_type c0{};
    LogSeries<Ring> u;   // power case: the full series; exponential: phi - phi0
};

// admissible log power at order k
inline int log_bound(MapCase kind, int n, int k) {
    if (n % 2 == 0) return 0;
    int m = (n + 1) / 2;
    return kind == MapCase::polynomial ? (k - 1) / (m - 1) : k / (m - 1);
}

// admissible log power of the order-N truncation residual
inline int residual_log_bound(int n, int N) {
    if (n % 2 == 0) return 0;
    return N / ((n + 1) / 2 - 1);
}

// Order-by-order solution; the residual is recomputed after every order,
// so nonlinear cross terms need no separate bookkeeping.
template <class Ring>
FormalSolution<Ring> solve_formal(const Ring& R, const InnerRHS<Ring>& rhs, int N,
                                  const typename Ring::value_type& c0) {
    using V = typename Ring::value_type;
    const int n = rhs.n;
    const bool trig = rhs.kind == MapCase::trigonometric;
    const Rational r(2, n - 1);
    int m_res = 0;
    if (n % 2 == 1) m_res = trig ? (n + 1) / 2 - 1 : (n + 1) / 2;

    FormalSolution<Ring> fs;
    fs.kind = rhs.kind;
    fs.n = n;
    fs.N = N;
    fs.m_resonant = m_res;
    fs.c0 = c0;
    fs.u = LogSeries<Ring>::zero(R, N + n - 1);

    int k_start = 1;
    if (!trig) {
        fs.u.add_term(R, 1, 0, c0);
        k_start = 2;
    }
    for (int K = k_start; K <= N; ++K) {
        int kres = K + n - 1;  // k-index of exponent K r + 2
        LogSeries<Ring> eps = series::residual(R, rhs, fs.u, kres);
        std::vector<V> A = kres <= eps.kmax() ? eps.t[kres] : std::vector<V>{};
        int jmax = log_bound(rhs.kind, n, K);
        for (int j = jmax + 1; j < static_cast<int>(A.size()); ++j) {
            if constexpr (std::is_same_v<Ring, AlgebraicRing>) {
                if (!R.is_zero(A[j]))
                    throw std::logic_error("solve_formal: residual log power exceeds bound");
            }
        }
        auto Aat = [&](int j) { return j < static_cast<int>(A.size()) ? A[j] : R.zero(); };
        Rational Kr = K * r;
        Rational lamK = lambda_N(rhs.kind, n, K);
        std::vector<V> c(jmax + 3, R.zero());
        for (int j = jmax; j >= 0; --j) {
            if (K == m_res) {
                if (j == 1) continue;  // resolved together with j = 0
                if (j == 0) {
                    // lambda_K = 0: the log coefficient absorbs the residual,
                    // the plain coefficient is the free one (normalized to 0)
                    V c1 = R.add(Aat(0), R.mul_rat(c[2], Rational(2)));
                    c[1] = R.div_rat(c1, 2 * Kr + 1);
                    c[0] = R.zero();
                    continue;
                }
            }
            V v = Aat(j);
            v = R.sub(v, R.mul_rat(c[j + 1], (j + 1) * (2 * Kr + 1)));
            v = R.add(v, R.mul_rat(c[j + 2], Rational((j + 1) * (j + 2))));
            if (lamK == 0)
                throw std::logic_error("solve_formal: unexpected resonance");
            c[j] = R.div_rat(R.neg(v), lamK);
        }
        for (int j = 0; j <= jmax + 2; ++j)
            if (!R.is_zero(c[j])) fs.u.add_term(R, K, j, c[j]);
    }
    // trim capacity rows beyond N
    fs.u.t.resize(N + 1);
    return fs;
}

// Lowest surviving residual term of the order-N truncation, as the exact
// exponent q (term z^{-q}) and the top log power at that exponent.
struct ResidualOrder {
    Rational exponent;  // lowest exponent; contract: >= (N+1)r + 2
    int log_power = 0;  // max log power at that exponent
    bool empty = false; // residual identically zero to probe depth
};

inline ResidualOrder residual_order(const AlgebraicRing& R, const InnerRHS<AlgebraicRing>& rhs,
                                    const FormalSolution<AlgebraicRing>& fs, int probe = 0) {
    int n = rhs.n;
    // the Delta^2 tail jumps the exponent by 2 = (n-1) lattice steps, so
    // sparse (parity-constrained) residuals need a deep enough probe
    if (probe <= 0) probe = 2 * n + 6;
    int kcap = fs.N + n - 1 + probe;
    LogSeries<AlgebraicRing> eps = series::residual(R, rhs, fs.u, kcap);
    for (int k = 0; k <= eps.kmax(); ++k) {
        int top = -1;
        for (int j = 0; j < static_cast<int>(eps.t[k].size()); ++j)
            if (!R.is_zero(eps.t[k][j])) top = j;
        if (top >= 0) return {Rational(2 * k, n - 1), top, false};
    }
    return {Rational(0), 0, true};
}

} // namespace gsmsplit
