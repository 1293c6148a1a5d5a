// Batch front end: config ingestion, subcommand dispatch, result
// persistence. Subcommands: derive | formal | inner-omega | splitting |
// rho | compare. Outputs are deterministic: fixed formatting, '.'
// decimals, rows sorted, no clocks.

#include <gsmsplit/compare.hpp>

#include <CLI11.hpp>

#include <atomic>
#include <clocale>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

using namespace gsmsplit;

namespace {

std::vector<Rational> parse_list(const std::string& csv) {
    std::vector<Rational> out;
    std::string cur;
    std::istringstream in(csv);
    while (std::getline(in, cur, ',')) out.push_back(parse_rational(cur));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

struct Output {
    std::ofstream file;
    std::ostream* os = &std::cout;

    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file.open(path);
            if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
            os = &file;
        }
    }
    std::ostream& stream() { return *os; }
};

int worker_count() {
    if (const char* env = std::getenv("GSMSPLIT_WORKERS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

ChiRule chi_rule_from(const std::string& name) {
    if (name == "pi2") return ChiRule::constant_half_pi;
    if (name == "trunc") return ChiRule::truncated_sqrt;
    if (name == "full") return ChiRule::full_rho;
    throw std::invalid_argument("chi rule must be auto|pi2|trunc|full");
}

// auto rule: pi/2 for the pure Duffing row set {x - x^3}, truncated
// expansion when the eps x^7 correction row is present; anything else
// needs an explicit rule
ChiRule chi_rule_auto(const MapSpec& spec) {
    bool duffing = spec.coeff(0, 1).re == 1 && spec.coeff(0, 3).re == -1;
    bool has_higher = false;
    for (const auto& [kj, v] : spec.coeffs)
        if (kj.first > 0 && !v.is_zero()) has_higher = true;
    if (duffing && !has_higher) return ChiRule::constant_half_pi;
    if (duffing && has_higher && spec.coeff(2, 7).re == -1) return ChiRule::truncated_sqrt;
    throw std::domain_error(
        "chi: unknown_map without a rule; pass --chi pi2|trunc|full explicitly");
}

void emit_inner_equation(std::ostream& os, const InnerEquation& eq, bool as_json) {
    using C = std::complex<double>;
    std::string Iset;
    for (size_t i = 0; i < eq.I.size(); ++i) Iset += (i ? "," : "") + std::to_string(eq.I[i]);
    if (as_json) {
        nlohmann::json j;
        j["case"] = eq.kind == MapCase::polynomial ? "polynomial" : "trigonometric";
        j["n"] = eq.n;
        j["r"] = rational_to_string(eq.r());
        j["alpha"] = rational_to_string(eq.alpha);
        j["I"] = eq.I;
        j["lambda"] = fmt_complex(eq.lambda<C>());
        j["E"] = rational_to_string(eq.E());
        j["d_E"] = fmt_complex(eq.dE<C>());
        j["c0"] = fmt_complex(eq.c0<C>());
        if (auto lr = eq.rational_lambda()) j["lambda_exact"] = rational_to_string(*lr);
        auto G = eq.G<C>();
        for (const auto& [k, g] : G) j["G"][std::to_string(k)] = fmt_complex(g);
        os << j.dump(2) << "\n";
        return;
    }
    os << "case    " << (eq.kind == MapCase::polynomial ? "polynomial" : "trigonometric") << "\n"
       << "n       " << eq.n << "\n"
       << "r       " << rational_to_string(eq.r()) << "\n"
       << "alpha   " << rational_to_string(eq.alpha) << "\n"
       << "I       {" << Iset << "}\n"
       << "lambda  " << fmt_complex(eq.lambda<C>()) << "\n"
       << "E       " << rational_to_string(eq.E()) << "\n"
       << "d_E     " << fmt_complex(eq.dE<C>()) << "\n"
       << "c0      " << fmt_complex(eq.c0<C>()) << "\n";
    for (const auto& [k, g] : eq.G<C>())
        os << "G[" << k << "]    " << fmt_complex(g) << "\n";
}

int run_cli(int argc, char** argv) {
    CLI::App app{"generalized standard maps: inner equations and separatrix splitting"};
    app.require_subcommand(1);

    std::string map_path, out_path, format = "csv", chi_name = "auto";
    int lambda_branch = 0, c0_branch = 0;

    auto add_common = [&](CLI::App* cmd, bool with_branches = true) {
        cmd->add_option("--map", map_path, "map config file")->required();
        cmd->add_option("-o,--output", out_path, "output path (default stdout)");
        if (with_branches) {
            cmd->add_option("--lambda-branch", lambda_branch, "lambda root offset");
            cmd->add_option("--c0-branch", c0_branch, "c0 root offset");
        }
    };

    // derive
    auto* derive = app.add_subcommand("derive", "derive the inner equation of a map");
    bool derive_json = false;
    add_common(derive);
    derive->add_flag("--json", derive_json, "emit JSON instead of text");

    // formal
    auto* formal = app.add_subcommand("formal", "formal solution coefficients / residual order");
    int formal_N = 10;
    bool formal_numeric = false;
    add_common(formal);
    formal->add_option("-N,--order", formal_N, "truncation order")->check(CLI::PositiveNumber);
    formal->add_flag("--numeric", formal_numeric, "force the floating path");

    // inner-omega
    auto* innerom = app.add_subcommand("inner-omega", "omega_tilde_in over z = -i rho");
    double rho_from = 4, rho_to = 4;
    int rho_steps = 1, march_K = 25, series_N = 48;
    add_common(innerom);
    innerom->add_option("--rho-from", rho_from, "first rho")->check(CLI::PositiveNumber);
    innerom->add_option("--rho-to", rho_to, "last rho")->check(CLI::PositiveNumber);
    innerom->add_option("--steps", rho_steps, "samples in [rho-from, rho-to]")
        ->check(CLI::PositiveNumber);
    innerom->add_option("-K,--march", march_K, "seed distance")->check(CLI::PositiveNumber);
    innerom->add_option("-N,--order", series_N, "formal series order")
        ->check(CLI::PositiveNumber);

    // splitting
    auto* split = app.add_subcommand("splitting", "multiprecision Lazutkin invariant");
    std::string h_list, digits_opt = "auto";
    add_common(split, false);
    split->add_option("--h-list", h_list, "comma separated h values")->required();
    split->add_option("--digits", digits_opt, "working decimal digits or 'auto'");
    split->add_option("--chi", chi_name, "chi rule: auto|pi2|trunc|full");

    // rho
    auto* rhocmd = app.add_subcommand("rho", "limit-flow singularity rho(h)");
    std::string rho_tol = "1e-20";
    int rho_digits = 40;
    add_common(rhocmd, false);
    rhocmd->add_option("--h-list", h_list, "comma separated h values")->required();
    rhocmd->add_option("--tol", rho_tol, "quadrature tolerance");
    rhocmd->add_option("--digits", rho_digits, "working decimal digits");

    // compare
    auto* cmp = app.add_subcommand("compare", "inner-vs-splitting comparison report");
    double cmp_rho_from = 3, cmp_rho_to = 5;
    int cmp_rho_steps = 9, cmp_kterms = 2;
    std::string cmp_basis = "auto";
    bool fit_log = false;
    add_common(cmp);
    cmp->add_option("--h-list", h_list, "h values for the splitting side (may be empty)");
    cmp->add_option("--rho-from", cmp_rho_from, "inner plateau window start");
    cmp->add_option("--rho-to", cmp_rho_to, "inner plateau window end");
    cmp->add_option("--rho-steps", cmp_rho_steps, "inner plateau samples");
    cmp->add_option("--chi", chi_name, "chi rule: auto|pi2|trunc|full");
    cmp->add_option("--basis", cmp_basis, "extrapolation basis: auto|h2|sqrth");
    cmp->add_option("--k-terms", cmp_kterms, "extrapolation terms");
    cmp->add_flag("--fit-log", fit_log, "fit log(omega_tilde) instead of omega_tilde");
    cmp->add_option("--format", format, "report format: json|text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the diagnostic and usage
        return 2;
    }

    MapSpec spec = load_map_config(map_path);
    Output out(out_path);
    std::ostream& os = out.stream();

    if (*derive) {
        Classification cl = validate_hypotheses(spec);
        if (!cl.valid()) {
            std::cerr << "derive: invalid map family: " << cl.reason << "\n";
            return 1;
        }
        emit_inner_equation(os, derive_inner(spec, lambda_branch, c0_branch), derive_json);
        return 0;
    }

    if (*formal) {
        InnerEquation eq = derive_inner(spec, lambda_branch, c0_branch);
        os << "k,j,re_c,im_c\n";
        bool exact_ok = !formal_numeric && eq.rational_G().has_value();
        if (exact_ok) {
            AlgebraicRing R(eq.symbol_degree(), eq.symbol_relation());
            auto rhs = make_exact_rhs(R, eq);
            auto fs = solve_formal(R, rhs, formal_N, R.symbol());
            using C = std::complex<long double>;
            C c0 = eq.symbol_value<C>();
            for (int k = 1; k <= fs.u.kmax(); ++k)
                for (int j = 0; j < static_cast<int>(fs.u.t[k].size()); ++j) {
                    if (R.is_zero(fs.u.t[k][j])) continue;
                    C v = R.materialize(fs.u.t[k][j], c0);
                    os << k << "," << j << "," << fmt(v.real()) << "," << fmt(v.imag()) << "\n";
                }
            auto ro = residual_order(R, rhs, fs);
            std::cerr << "residual order: lowest exponent " << rational_to_string(ro.exponent)
                      << " (contract >= " << rational_to_string(Rational(2 * (formal_N + 1), eq.n - 1) + 2)
                      << "), log power " << ro.log_power << " (bound "
                      << log_bound(eq.kind, eq.n, formal_N) << ")\n";
        } else {
            using C = std::complex<long double>;
            NumericRing<C> R;
            auto rhs = make_numeric_rhs(R, eq);
            auto fs = solve_formal(R, rhs, formal_N, eq.c0<C>());
            for (int k = 1; k <= fs.u.kmax(); ++k)
                for (int j = 0; j < static_cast<int>(fs.u.t[k].size()); ++j) {
                    if (fs.u.t[k][j] == C(0)) continue;
                    os << k << "," << j << "," << fmt(fs.u.t[k][j].real()) << ","
                       << fmt(fs.u.t[k][j].imag()) << "\n";
                }
            std::cerr << "residual order: numeric path (no exact report)\n";
        }
        return 0;
    }

    if (*innerom) {
        InnerEquation eq = derive_inner(spec, lambda_branch, c0_branch);
        using C = std::complex<long double>;
        NumericRing<C> R;
        auto rhs = make_numeric_rhs(R, eq);
        auto fs = solve_formal(R, rhs, series_N, eq.c0<C>());
        std::vector<OmegaInResult<C>> rows(rho_steps);
        int workers = std::min(worker_count(), rho_steps);
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        auto task = [&] {
            for (int i; (i = next.fetch_add(1)) < rho_steps;) {
                long double rho = rho_steps == 1
                                      ? rho_from
                                      : rho_from + (rho_to - rho_from) * i / (rho_steps - 1.0L);
                rows[i] = omega_in(rhs, fs, C(0, -rho), march_K);
            }
        };
        for (int w = 1; w < workers; ++w) pool.emplace_back(task);
        task();
        for (auto& th : pool) th.join();
        os << "rho,K,N,omega_tilde_in,error_budget\n";
        for (const auto& r : rows)
            os << fmt(-r.z.imag()) << "," << r.K << "," << series_N << ","
               << fmt(r.omega_in_tilde) << "," << fmt(r.error_budget) << "\n";
        return 0;
    }

    if (*split) {
        InnerEquation eq = derive_inner(spec);
        ChiRule rule = chi_name == "auto" ? chi_rule_auto(spec) : chi_rule_from(chi_name);
        EnergyPoly U;
        bool have_energy = false;
        if (rule == ChiRule::full_rho) {
            U = energy_from_map(spec);
            have_energy = true;
        }
        int digits = digits_opt == "auto" ? 0 : std::stoi(digits_opt);
        os << "h,digits,M,t0,omega,omega_tilde,shift,phase_residual\n";
        for (const Rational& h : parse_list(h_list)) {
            auto sr = run_splitting(spec, h, digits, rule, have_energy ? &U : nullptr, eq.alpha,
                                    Rational(1));
            os << rational_to_string(h) << "," << sr.precision_digits << "," << sr.M << ","
               << fmt(sr.t0) << "," << fmt(sr.omega) << "," << fmt(sr.omega_tilde) << ","
               << fmt(sr.shift) << "," << fmt(sr.phase_residual) << "\n";
        }
        return 0;
    }

    if (*rhocmd) {
        MpReal::default_precision(rho_digits);
        EnergyPoly U = energy_from_map(spec);
        MpReal tol(rho_tol);
        os << "h,digits,tol,x_turn,rho_abs,quadrature_error\n";
        for (const Rational& h : parse_list(h_list)) {
            auto rr = singularity_rho(U, to_real<MpReal>(h), tol);
            os << rational_to_string(h) << "," << rho_digits << "," << rho_tol << ","
               << fmt(rr.x_turn) << "," << fmt(rr.rho_abs) << "," << fmt(rr.quadrature_error)
               << "\n";
        }
        return 0;
    }

    if (*cmp) {
        InnerEquation eq = derive_inner(spec, lambda_branch, c0_branch);
        ChiRule rule = chi_name == "auto" ? chi_rule_auto(spec) : chi_rule_from(chi_name);
        EnergyPoly U;
        const EnergyPoly* Up = nullptr;
        if (rule == ChiRule::full_rho) {
            U = energy_from_map(spec);
            Up = &U;
        }
        CompareReport rep;
        rep.map_case = eq.kind == MapCase::polynomial ? "polynomial" : "trigonometric";
        rep.n = eq.n;
        rep.chi_rule = chi_name;
        rep.inner = inner_plateau(eq, cmp_rho_from, cmp_rho_to, cmp_rho_steps, march_K, series_N);
        if (!h_list.empty()) {
            for (const Rational& h : parse_list(h_list))
                rep.splittings.push_back(
                    run_splitting(spec, h, 0, rule, Up, eq.alpha, Rational(1)));
        }
        finish_report(rep);
        if (!rep.splittings.empty()) {
            std::vector<long double> basis;
            std::string b = cmp_basis;
            if (b == "auto") b = rule == ChiRule::truncated_sqrt ? "sqrth" : "h2";
            for (int i = 1; i <= cmp_kterms; ++i)
                basis.push_back(b == "sqrth" ? 0.5L * i : 2.0L * i);
            attach_extrapolation(rep, basis, cmp_kterms, fit_log);
        }
        if (format == "json")
            os << report_json(rep).dump(2) << "\n";
        else
            os << report_text(rep);
        return 0;
    }
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    try {
        return run_cli(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
