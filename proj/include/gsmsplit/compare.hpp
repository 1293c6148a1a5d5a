#pragma once

// Glue for the two sides of the comparison: the multiprecision splitting
// invariant omega_tilde(h) of the true map, and the long-double plateau of
// omega_tilde_in from the inner equation. Their agreement is the point of
// the whole exercise.

#include "asymptotics.hpp"
#include "format.hpp"
#include "inner_march.hpp"
#include "manifold.hpp"

#include <json.hpp>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace gsmsplit {

// splitting run with precision handling done right: the working precision
// is set first, then h and chi are materialized at it
inline SplittingResult<MpReal> run_splitting(const MapSpec& spec, const Rational& h, int digits,
                                             ChiRule rule, const EnergyPoly* energy,
                                             const Rational& alpha, const Rational& lambda) {
    if (digits <= 0) {
        double chi_d = static_cast<double>(chi_abs_for<long double>(
            rule, energy, to_real<long double>(h)));
        digits = digits_auto(chi_d, static_cast<double>(to_real<double>(h)));
    }
    MpReal::default_precision(digits);
    MpReal hh = to_real<MpReal>(h);
    MpReal chi = chi_abs_for<MpReal>(rule, energy, hh);
    return lazutkin_omega(spec, hh, digits, chi, alpha, to_real<MpReal>(lambda));
}

using CLD = std::complex<long double>;

struct InnerPlateau {
    std::vector<OmegaInResult<CLD>> samples;  // over z = -i rho
    long double plateau = 0;                  // midpoint-of-range value
    long double variation = 0;                // (max-min)/|plateau|
};

// omega_tilde_in over z = -i rho for rho in [lo, hi]
inline InnerPlateau inner_plateau(const InnerEquation& eq, long double rho_lo, long double rho_hi,
                                  int steps, int K = 25, int N = 48) {
    NumericRing<CLD> R;
    auto rhs = make_numeric_rhs(R, eq);
    auto fs = solve_formal(R, rhs, N, eq.c0<CLD>());
    InnerPlateau out;
    long double mn = 0, mx = 0;
    for (int i = 0; i < steps; ++i) {
        long double rho = steps == 1 ? rho_lo : rho_lo + (rho_hi - rho_lo) * i / (steps - 1);
        auto res = omega_in(rhs, fs, CLD(0, -rho), K);
        if (out.samples.empty()) {
            mn = mx = res.omega_in_tilde;
        } else {
            mn = std::min(mn, res.omega_in_tilde);
            mx = std::max(mx, res.omega_in_tilde);
        }
        out.samples.push_back(res);
    }
    out.plateau = (mn + mx) / 2;
    out.variation = out.plateau != 0 ? (mx - mn) / std::abs(out.plateau) : 0;
    return out;
}

struct CompareReport {
    std::string map_case;
    int n = 0;
    std::string chi_rule;
    InnerPlateau inner;
    std::vector<SplittingResult<MpReal>> splittings;
    bool have_extrapolation = false;
    long double extrapolated = 0;
    long double raw_smallest_h = 0;
    long double discrepancy_extrapolated = 0;  // relative, vs inner plateau
    long double discrepancy_raw = 0;
    bool incomplete = false;
    bool fit_in_log = false;
};

// Extrapolate omega_tilde(h) -> h = 0. basis_exponents are powers of h;
// fit_in_log fits log(omega_tilde) instead, the right form when the
// truncated chi rule leaves an exponential of a power series in sqrt(h).
inline void attach_extrapolation(CompareReport& rep, const std::vector<long double>& basis,
                                 int k_terms, bool fit_in_log) {
    if (rep.splittings.size() < static_cast<size_t>(k_terms + 1)) {
        rep.incomplete = true;
        return;
    }
    std::vector<std::pair<long double, long double>> pts;
    for (const auto& s : rep.splittings) {
        long double v = static_cast<long double>(s.omega_tilde);
        pts.push_back({static_cast<long double>(s.h), fit_in_log ? std::log(v) : v});
    }
    auto model = extrapolate(pts, basis, k_terms);
    rep.fit_in_log = fit_in_log;
    rep.extrapolated = fit_in_log ? std::exp(model.limit) : model.limit;
    rep.have_extrapolation = true;
    if (rep.inner.plateau != 0) {
        rep.discrepancy_extrapolated =
            std::abs(rep.extrapolated - rep.inner.plateau) / std::abs(rep.inner.plateau);
    }
}

inline void finish_report(CompareReport& rep) {
    if (rep.splittings.empty()) {
        rep.incomplete = true;
        return;
    }
    auto smallest = std::min_element(rep.splittings.begin(), rep.splittings.end(),
                                     [](auto& a, auto& b) { return a.h < b.h; });
    rep.raw_smallest_h = static_cast<long double>(smallest->omega_tilde);
    if (rep.inner.plateau != 0)
        rep.discrepancy_raw =
            std::abs(rep.raw_smallest_h - rep.inner.plateau) / std::abs(rep.inner.plateau);
}

inline nlohmann::json report_json(const CompareReport& rep) {
    nlohmann::json j;
    j["case"] = rep.map_case;
    j["n"] = rep.n;
    j["chi_rule"] = rep.chi_rule;
    j["inner"]["plateau"] = fmt(rep.inner.plateau);
    j["inner"]["variation"] = fmt(rep.inner.variation);
    auto& rows = j["inner"]["samples"];
    for (const auto& s : rep.inner.samples) {
        rows.push_back({{"rho", fmt(-s.z.imag())},
                        {"omega_tilde_in", fmt(s.omega_in_tilde)},
                        {"error_budget", fmt(s.error_budget)}});
    }
    auto& sp = j["splitting"];
    for (const auto& s : rep.splittings) {
        sp.push_back({{"h", fmt(s.h)},
                      {"digits", s.precision_digits},
                      {"omega", fmt(s.omega)},
                      {"omega_tilde", fmt(s.omega_tilde)},
                      {"shift", fmt(s.shift)},
                      {"phase_residual", fmt(s.phase_residual)}});
    }
    if (rep.have_extrapolation) {
        j["extrapolated"] = fmt(rep.extrapolated);
        j["fit_in_log"] = rep.fit_in_log;
        j["discrepancy_extrapolated"] = fmt(rep.discrepancy_extrapolated);
    }
    j["raw_smallest_h"] = fmt(rep.raw_smallest_h);
    j["discrepancy_raw"] = fmt(rep.discrepancy_raw);
    j["incomplete"] = rep.incomplete;
    return j;
}

inline std::string report_text(const CompareReport& rep) {
    std::string out;
    auto line = [&](const std::string& s) { out += s + "\n"; };
    line("comparison report (" + rep.map_case + ", n=" + std::to_string(rep.n) +
         ", chi=" + rep.chi_rule + ")");
    line("  inner plateau  : " + fmt(rep.inner.plateau) +
         "  (rel variation " + fmt(rep.inner.variation) + ")");
    if (rep.splittings.empty()) {
        line("  splitting      : (none)  [incomplete]");
        return out;
    }
    line("  h            digits  omega_tilde");
    for (const auto& s : rep.splittings)
        line("  " + fmt(static_cast<double>(s.h)) + "  " + std::to_string(s.precision_digits) +
             "  " + fmt(static_cast<long double>(s.omega_tilde)));
    if (rep.have_extrapolation) {
        line("  extrapolated   : " + fmt(rep.extrapolated) +
             (rep.fit_in_log ? "  (log fit)" : "") +
             "  rel discrepancy vs inner " + fmt(rep.discrepancy_extrapolated));
    }
    line("  raw smallest h : " + fmt(rep.raw_smallest_h) + "  rel discrepancy vs inner " +
         fmt(rep.discrepancy_raw));
    return out;
}

} // namespace gsmsplit
