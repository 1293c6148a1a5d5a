#pragma once

// Generalized standard maps
//   x* = x + y + f(x,h),  y* = y + f(x,h)
// given by a finite coefficient family f(x,h) = sum_k f_k(x) h^{k+2}
// (power rows) or, with basis=eps, f = sum_k g_{k/2}(x) eps^{k/2+1} with
// eps = 4 sinh^2(h/2) evaluated exactly at run precision. The eps basis is
// what lets the eps-polynomial families be represented without truncation
// error in h.

#include "inner_equation.hpp"
#include "values.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace gsmsplit {

enum class CoeffBasis { h, eps };

struct MapSpec {
    MapCase kind = MapCase::polynomial;
    CoeffBasis basis = CoeffBasis::h;
    int k_max = 0;
    // (k, j) -> f_{k,j}; power case j >= 1 monomial degrees,
    // trigonometric case j in [-d_k, d_k] Fourier indices
    std::map<std::pair<int, int>, ValueLit> coeffs;
    Rational rho0{0};  // analyticity radii, documentation only (0 = entire)
    Rational h0{0};

    // retained k values with any declared coefficient
    std::vector<int> rows() const {
        std::vector<int> ks;
        for (const auto& [kj, v] : coeffs)
            if (ks.empty() || ks.back() != kj.first) ks.push_back(kj.first);
        return ks;
    }

    // top declared degree (power) or Fourier order (trig) of row k
    int degree(int k) const {
        int d = -1;
        for (const auto& [kj, v] : coeffs)
            if (kj.first == k) d = std::max(d, std::abs(kj.second));
        return d;
    }

    ValueLit coeff(int k, int j) const {
        auto it = coeffs.find({k, j});
        return it == coeffs.end() ? ValueLit{} : it->second;
    }
};

struct ConfigError : std::runtime_error {
    int line, col;
    ConfigError(int line_, int col_, const std::string& msg)
        : std::runtime_error("config:" + std::to_string(line_) + ":" + std::to_string(col_) +
                             ": " + msg),
          line(line_), col(col_) {}
};

inline MapSpec parse_map_config(std::istream& in) {
    MapSpec spec;
    bool saw_case = false, saw_kmax = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        auto col_of = [&](const std::string& tok) {
            auto pos = line.find(tok);
            return static_cast<int>(pos == std::string::npos ? 1 : pos + 1);
        };
        try {
            if (key == "case") {
                std::string v;
                if (!(ls >> v)) throw ConfigError(lineno, col_of(key), "missing case value");
                if (v == "polynomial")
                    spec.kind = MapCase::polynomial;
                else if (v == "trigonometric")
                    spec.kind = MapCase::trigonometric;
                else
                    throw ConfigError(lineno, col_of(v), "case must be polynomial|trigonometric");
                saw_case = true;
            } else if (key == "basis") {
                std::string v;
                if (!(ls >> v)) throw ConfigError(lineno, col_of(key), "missing basis value");
                if (v == "h")
                    spec.basis = CoeffBasis::h;
                else if (v == "eps")
                    spec.basis = CoeffBasis::eps;
                else
                    throw ConfigError(lineno, col_of(v), "basis must be h|eps");
            } else if (key == "k_max") {
                if (!(ls >> spec.k_max)) throw ConfigError(lineno, col_of(key), "bad k_max");
                saw_kmax = true;
            } else if (key == "rho0") {
                std::string v;
                ls >> v;
                spec.rho0 = parse_rational(v);
            } else if (key == "h0") {
                std::string v;
                ls >> v;
                spec.h0 = parse_rational(v);
            } else if (key == "coeff") {
                int k, j;
                std::string v;
                if (!(ls >> k >> j >> v))
                    throw ConfigError(lineno, col_of(key), "coeff needs: k j value");
                if (k < 0) throw ConfigError(lineno, col_of(key), "coeff k must be >= 0");
                spec.coeffs[{k, j}] = parse_value(v);
            } else {
                throw ConfigError(lineno, col_of(key), "unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw ConfigError(lineno, 1, e.what());
        }
    }
    if (!saw_case) throw ConfigError(lineno, 1, "missing 'case'");
    if (!saw_kmax) throw ConfigError(lineno, 1, "missing 'k_max'");
    for (const auto& [kj, v] : spec.coeffs) {
        if (kj.first > spec.k_max)
            throw ConfigError(lineno, 1, "coeff row k exceeds k_max");
        if (spec.kind == MapCase::polynomial && kj.second < 1)
            throw ConfigError(lineno, 1, "polynomial coeff needs j >= 1 (f(0,h) = 0)");
        if (spec.basis == CoeffBasis::eps && kj.first % 2 != 0)
            throw ConfigError(lineno, 1, "eps basis rows must have even k");
    }
    return spec;
}

inline MapSpec load_map_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open map config '" + path + "'");
    return parse_map_config(in);
}

// eps = 4 sinh^2(h/2)
template <class Real>
Real epsilon_of_h(const Real& h) {
    using std::sinh;
    Real s = sinh(h / 2);
    return 4 * s * s;
}

namespace detail {

// per-row weight: h^{k+2} (power basis) or eps^{k/2+1} (eps basis)
template <class Real>
Real row_weight(const MapSpec& spec, int k, const Real& h, const Real& eps) {
    using std::pow;
    if (spec.basis == CoeffBasis::eps) {
        Real w = eps;
        for (int p = 0; p < k / 2; ++p) w *= eps;
        return w;
    }
    Real w = h * h;
    for (int p = 0; p < k; ++p) w *= h;
    return w;
}

} // namespace detail

// f(x,h); trig rows are summed as 2 Re(f_{k,j} e^{ijx}) pairs plus the j=0 term,
// which assumes the conjugate-symmetric (real-valued) coefficient layout
template <class Real>
Real eval_f(const MapSpec& spec, const Real& x, const Real& h) {
    using std::cos, std::sin;
    Real eps = epsilon_of_h(h);
    Real total(0);
    for (int k : spec.rows()) {
        Real w = detail::row_weight(spec, k, h, eps);
        Real row(0);
        if (spec.kind == MapCase::polynomial) {
            int d = spec.degree(k);
            // Horner over declared degrees
            for (int j = d; j >= 1; --j) {
                row = row * x + to_real<Real>(spec.coeff(k, j).re);
            }
            row *= x;
        } else {
            for (const auto& [kj, v] : spec.coeffs) {
                if (kj.first != k) continue;
                int j = kj.second;
                if (j == 0) {
                    row += to_real<Real>(v.re);
                } else if (j > 0) {
                    row += 2 * (to_real<Real>(v.re) * cos(j * x) - to_real<Real>(v.im) * sin(j * x));
                }
            }
        }
        total += w * row;
    }
    return total;
}

// df/dx
template <class Real>
Real eval_f_x(const MapSpec& spec, const Real& x, const Real& h) {
    using std::cos, std::sin;
    Real eps = epsilon_of_h(h);
    Real total(0);
    for (int k : spec.rows()) {
        Real w = detail::row_weight(spec, k, h, eps);
        Real row(0);
        if (spec.kind == MapCase::polynomial) {
            int d = spec.degree(k);
            for (int j = d; j >= 1; --j) {
                row = row * x + j * to_real<Real>(spec.coeff(k, j).re);
            }
        } else {
            for (const auto& [kj, v] : spec.coeffs) {
                if (kj.first != k || kj.second <= 0) continue;
                int j = kj.second;
                row += -2 * j * (to_real<Real>(v.re) * sin(j * x) + to_real<Real>(v.im) * cos(j * x));
            }
        }
        total += w * row;
    }
    return total;
}

template <class Real>
struct State {
    Real x, y;
};

template <class Real>
State<Real> eval_map(const MapSpec& spec, const State<Real>& s, const Real& h) {
    using std::abs;
    if (spec.rho0 > 0 && abs(s.x) > to_real<Real>(spec.rho0))
        throw std::domain_error("eval_map: |x| outside declared analyticity radius");
    Real fv = eval_f(spec, s.x, h);
    return {s.x + s.y + fv, s.y + fv};
}

// exact analytic derivative; det = 1 by the shear structure
template <class Real>
std::array<std::array<Real, 2>, 2> jacobian(const MapSpec& spec, const State<Real>& s,
                                            const Real& h) {
    using std::abs;
    if (spec.rho0 > 0 && abs(s.x) > to_real<Real>(spec.rho0))
        throw std::domain_error("jacobian: |x| outside declared analyticity radius");
    Real fx = eval_f_x(spec, s.x, h);
    return {{{1 + fx, Real(1)}, {fx, Real(1)}}};
}

// Numerical sanity of a parsed family at a sample h: f(0,h) = 0 and
// d_x f(0,h) = 4 sinh^2(h/2) within the retained orders. eps-basis tables
// satisfy both exactly; h-basis truncations only up to O(h^{k_max+3}).
inline std::vector<std::string> check_spec_invariants(const MapSpec& spec,
                                                      long double h_sample = 0.05L) {
    std::vector<std::string> issues;
    using std::abs;
    long double scale = 1;
    for (const auto& [kj, v] : spec.coeffs)
        scale += abs(to_real<long double>(v.re)) + abs(to_real<long double>(v.im));
    long double tol;
    if (spec.basis == CoeffBasis::eps) {
        tol = 64 * std::numeric_limits<long double>::epsilon() * scale;
    } else {
        tol = scale * 16;
        for (int p = 0; p < spec.k_max + 3; ++p) tol *= h_sample;
    }
    long double f0 = eval_f(spec, 0.0L, h_sample);
    if (abs(f0) > tol) issues.push_back("f(0,h) != 0 at sample h");
    long double fx0 = eval_f_x(spec, 0.0L, h_sample);
    long double eps = epsilon_of_h(h_sample);
    if (abs(fx0 - eps) > tol) issues.push_back("d_x f(0,h) != 4 sinh^2(h/2) at sample h");
    return issues;
}

struct Classification {
    enum class Status { polynomial, trigonometric, invalid };
    Status status = Status::invalid;
    int n = 0;
    Rational alpha;
    std::vector<int> I;
    std::string reason;

    bool valid() const { return status != Status::invalid; }
};

// HP1/HP2 (resp. HT1/HT2): the ratio (d_k-1)/(k+2) (resp. d_k/(k+2)) must
// attain its maximum strictly inside the retained range. Families whose
// argmax touches k_max are rejected: the max could still move outward.
inline Classification validate_hypotheses(const MapSpec& spec) {
    Classification cl;
    bool trig = spec.kind == MapCase::trigonometric;
    Rational best(-1);
    std::vector<int> I;
    std::map<int, int> degs;
    for (int k : spec.rows()) {
        int d = spec.degree(k);
        if (d < 0) continue;
        if (spec.coeff(k, trig ? -d : d).is_zero() && (!trig || spec.coeff(k, d).is_zero())) {
            cl.reason = "zero_leading: declared top coefficient of row k=" + std::to_string(k) +
                        " is zero";
            return cl;
        }
        if (trig && d == 0) continue;  // constant rows carry no degree information
        Rational ratio = trig ? Rational(d, k + 2) : Rational(d - 1, k + 2);
        degs[k] = d;
        if (ratio > best) {
            best = ratio;
            I.assign(1, k);
        } else if (ratio == best) {
            I.push_back(k);
        }
    }
    if (I.empty() || best <= 0) {
        cl.reason = "no_global_max: no row with usable degree";
        return cl;
    }
    if (I.back() >= spec.k_max) {
        cl.reason = "no_global_max: ratio still maximal at k_max; truncate further out";
        return cl;
    }
    cl.I = I;
    int dmin = degs[I.front()];
    for (int k : I) dmin = std::min(dmin, degs[k]);
    if (trig) {
        cl.status = Classification::Status::trigonometric;
        cl.n = dmin + 1;
        cl.alpha = Rational(I.front() + 2, degs[I.front()]);
    } else {
        cl.status = Classification::Status::polynomial;
        cl.n = dmin;
        cl.alpha = Rational(I.front() + 2, degs[I.front()] - 1);
    }
    return cl;
}

// Mechanical derivation of the inner equation from the leading coefficients
// over the argmax set I.
inline InnerEquation derive_inner(const MapSpec& spec, int lambda_branch = 0, int c0_branch = 0) {
    Classification cl = validate_hypotheses(spec);
    if (!cl.valid()) throw std::domain_error("derive_inner: " + cl.reason);
    InnerEquation eq;
    eq.kind = spec.kind;
    eq.n = cl.n;
    eq.alpha = cl.alpha;
    eq.I = cl.I;
    eq.lambda_branch = lambda_branch;
    eq.c0_branch = c0_branch;
    for (int k : cl.I) {
        int d = spec.degree(k);
        if (spec.kind == MapCase::polynomial) {
            eq.gtilde[d] = spec.coeff(k, d);
        } else {
            // -i f_{k,-d}
            ValueLit v = spec.coeff(k, -d);
            eq.gtilde[d] = ValueLit{v.im, -v.re};
        }
    }
    return eq;
}

} // namespace gsmsplit
