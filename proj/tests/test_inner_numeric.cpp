#include <gsmsplit/inner_march.hpp>
#include <gsmsplit/linear_basis.hpp>

#include <boost/multiprecision/cpp_complex.hpp>
#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

using namespace gsmsplit;
using C = std::complex<long double>;

namespace {

InnerEquation pure_power(int n) {
    InnerEquation eq;
    eq.kind = MapCase::polynomial;
    eq.n = n;
    eq.alpha = n == 7 ? Rational(2, 3) : Rational(1);
    eq.I = {0};
    eq.gtilde[n] = ValueLit{Rational(-1), Rational(0)};
    return eq;
}

struct InnerSetup {
    InnerEquation eq;
    NumericRing<C> R;
    InnerRHS<NumericRing<C>> rhs;
    FormalSolution<NumericRing<C>> fs;

    explicit InnerSetup(int n, int N = 48, int c0_branch = 0) : eq(pure_power(n)) {
        eq.c0_branch = c0_branch;
        rhs = make_numeric_rhs(R, eq);
        fs = solve_formal(R, rhs, N, eq.c0<C>());
    }
};

} // namespace

TEST_CASE("marched samples satisfy the recurrence at the endpoint") {
    InnerSetup s(3);
    for (auto br : {Branch::unstable, Branch::stable}) {
        auto data = march_inner(s.rhs, s.fs, C(0, -4), 25, br);
        CHECK(data.at_z.residual < 1e-17L);
        // tail is below round-off at this seed radius
        CHECK(data.seed_residual < 100 * data.seed_tail + 1e-18L);
    }
}

TEST_CASE("unstable and stable branches agree to exponential accuracy at -6i") {
    InnerSetup s(3);
    auto un = march_inner(s.rhs, s.fs, C(0, -6), 25, Branch::unstable);
    auto st = march_inner(s.rhs, s.fs, C(0, -6), 25, Branch::stable);
    long double diff = std::abs(un.at_z.phi - st.at_z.phi);
    // |Theta| <= K e^{-2 pi 6} |z|^E with a Stokes-sized K; far below the
    // solution scale but far above round-off
    CHECK(diff < std::exp(-12 * 3.14159265358979324L) * 216 * 1e4L);
    CHECK(diff > 1e-16L);
}

TEST_CASE("leading term dominates far down the imaginary axis") {
    // with c0 = +i sqrt(2) (branch 1): phi(-6i) ~ c0/(-6i) = -sqrt(2)/6
    InnerSetup s(3, 48, 1);
    auto sample = eval_inner_solution(s.rhs, s.fs, C(0, -6), 25, Branch::unstable);
    long double lead = std::sqrt(2.0L) / 6;
    CHECK(std::abs(sample.phi - C(-lead)) < 0.25L * lead);
}

TEST_CASE("omega_tilde_in reproduces the reference constants at z = -4i") {
    {
        InnerSetup s(7);
        auto om = omega_in(s.rhs, s.fs, C(0, -4), 25);
        CHECK(std::abs(om.omega_in_tilde - 871.683L) < 1.0L);
        // the invariant is essentially real there (2 Re form consistent)
        CHECK(std::abs(om.omega_in.imag()) / std::abs(om.omega_in) < 1e-3L);
    }
    {
        InnerSetup s(3);
        auto om = omega_in(s.rhs, s.fs, C(0, -4), 25);
        CHECK(std::abs(om.omega_in_tilde - 1.000832e5L) < 100.0L);
    }
}

TEST_CASE("the two conjugate c0 roots give the same invariant for n = 3") {
    // for odd n the roots +-i sqrt(2) are exchanged by phi -> -phi, and the
    // invariant is quadratic in the solution pair
    InnerSetup a(3, 48, 0), b(3, 48, 1);
    auto oa = omega_in(a.rhs, a.fs, C(0, -4), 25);
    auto ob = omega_in(b.rhs, b.fs, C(0, -4), 25);
    CHECK(std::abs(oa.omega_in_tilde - ob.omega_in_tilde) <
          1e-6L * std::abs(oa.omega_in_tilde));
}

TEST_CASE("seed independence: K and K+5 agree within the error budget") {
    InnerSetup s(7);
    auto a = omega_in(s.rhs, s.fs, C(0, -4), 25);
    auto b = omega_in(s.rhs, s.fs, C(0, -4), 30);
    CHECK(std::abs(a.omega_in_tilde - b.omega_in_tilde) <
          a.error_budget + b.error_budget);
}

TEST_CASE("doubling the working precision moves the value less than the budget") {
    using C50 = boost::multiprecision::cpp_complex_50;
    InnerEquation eq = pure_power(7);
    NumericRing<C50> R50;
    auto rhs50 = make_numeric_rhs(R50, eq);
    auto fs50 = solve_formal(R50, rhs50, 48, eq.c0<C50>());
    auto om50 = omega_in(rhs50, fs50, C50(0, -4), 25);
    InnerSetup s(7);
    auto om = omega_in(s.rhs, s.fs, C(0, -4), 25);
    long double hi = static_cast<long double>(om50.omega_in_tilde);
    CHECK(std::abs(om.omega_in_tilde - hi) < om.error_budget);
}

TEST_CASE("underflowing Theta reports precision_insufficient") {
    InnerSetup s(7);
    // e^{-2 pi 14} ~ 6e-39 is far below long double resolution of phi
    CHECK_THROWS_WITH(omega_in(s.rhs, s.fs, C(0, -14), 25),
                      Catch::Matchers::ContainsSubstring("precision_insufficient"));
}

TEST_CASE("xi_s = z^E solves the H-equation to round-off") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> re(-30, 30), im(-30, -1);
    for (const Rational& E : {Rational(3), Rational(7, 3), Rational(2)}) {
        for (int i = 0; i < 20; ++i) {
            C z{(long double)re(rng), (long double)im(rng)};
            C lhs = xi_s(z + C(1), E) - C(2) * xi_s(z, E) + xi_s(z - C(1), E);
            C rhs = linear_H(z, E) * xi_s(z, E);
            CAPTURE(z.real(), z.imag());
            CHECK(std::abs(lhs - rhs) <= 1e-12L * std::abs(rhs));
        }
    }
}

TEST_CASE("xi_p is an independent solution with unit wronskian") {
    const Rational E(3);  // n = 3 linear model
    for (C z : {C(0, -6), C(3, -4), C(-2, -5)}) {
        auto at = linear_basis_H(E, z, 1e-13L);
        auto at1 = linear_basis_H(E, z + C(1), 1e-13L);
        auto atm = linear_basis_H(E, z - C(1), 1e-13L);
        // solves the equation
        C lhs = at1.xi_p - C(2) * at.xi_p + atm.xi_p;
        C rhs = linear_H(z, E) * at.xi_p;
        CHECK(std::abs(lhs - rhs) < 1e-9L * (std::abs(at.xi_p) + 1));
        // W(xi_p, xi_s) = 1
        C w = wronskian(at.xi_p, at1.xi_p, at.xi_s, at1.xi_s);
        CAPTURE(z.real(), z.imag());
        CHECK(std::abs(w - C(1)) < 1e-8L);
    }
}

TEST_CASE("xi_p decays like z^{1-E} down the imaginary axis (xi_p in X_{E-1})") {
    const Rational E(3);
    long double expect = 1.0L / (2 * to_real<long double>(E) - 1);
    for (long double rho : {10.0L, 20.0L, 40.0L}) {
        auto side = linear_basis_H(E, C(0, -rho), 1e-12L);
        long double scaled = std::abs(side.xi_p) * std::pow(rho, to_real<long double>(E) - 1);
        CHECK(scaled < 5 * expect);
        CHECK(scaled > expect / 5);
    }
}

TEST_CASE("wronskian of marched solutions of a linear difference equation is constant") {
    // D2 u = M(z) u with M = H; transfer matrices have unit determinant
    const Rational E(7, 3);
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> init(-1, 1);
    C z0(-20, -5);
    C u0{(long double)init(rng), (long double)init(rng)}, u1{(long double)init(rng), (long double)init(rng)};
    C v0{(long double)init(rng), (long double)init(rng)}, v1{(long double)init(rng), (long double)init(rng)};
    C w0 = wronskian(u0, u1, v0, v1);
    CHECK(std::abs(wronskian(u0, u1, u0, u1)) == 0.0L);  // W(f, f) = 0
    C zu = z0;
    C a0 = u0, a1 = u1, b0 = v0, b1 = v1;
    for (int s = 0; s < 50; ++s) {
        C m = linear_H(zu + C(1), E);
        C a2 = C(2) * a1 - a0 + m * a1;
        C b2 = C(2) * b1 - b0 + m * b1;
        a0 = a1; a1 = a2;
        b0 = b1; b1 = b2;
        zu += C(1);
        C w = wronskian(a0, a1, b0, b1);
        CAPTURE(s);
        CHECK(std::abs(w - w0) <= 1e-10L * std::abs(w0));
    }
}
