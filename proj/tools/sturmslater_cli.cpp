// Command-line front end: parse a potential, solve the Dirichlet spectrum,
// verify the zero-counting bounds on random combinations, reconstruct
// combinations from prescribed zeros, and run the exact oscillator and
// Vandermonde identity suites. Reports are JSON (default) or CSV and are
// byte-identical for identical config + seed.
//
// Exit codes: 0 all checks pass, 1 usage/parse error, 2 a mathematical
// contract was violated (which indicates a solver bug, surfaced loudly).

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sturmslater/hermite.hpp"
#include "sturmslater/multipoly.hpp"
#include "sturmslater/rng.hpp"
#include "sturmslater/slater.hpp"
#include "sturmslater/spectral.hpp"
#include "sturmslater/unipoly.hpp"
#include "sturmslater/zero_analysis.hpp"

using json = nlohmann::ordered_json;
using namespace sturmslater;

namespace {

struct RunConfig {
    std::string q = "0";
    int n = 4;
    int grid = 0;  // resolved after parsing (flag > env > 4096)
    int trials = 100;
    std::uint64_t seed = 1;
    int m_low = 1;
    std::string zeros;
    std::string out;
    std::string format = "json";
    std::string dump_curve;
};

int resolve_default_grid() {
    if (const char* env = std::getenv("SOL_GRID_DEFAULT")) {
        try {
            const int g = std::stoi(env);
            if (g >= 256) return g;
        } catch (...) {
        }
        throw std::invalid_argument("SOL_GRID_DEFAULT must be an integer >= 256");
    }
    return kDefaultGrid;
}

json config_json(const RunConfig& c) {
    return json{{"q", c.q},           {"n", c.n},       {"grid", c.grid},
                {"trials", c.trials}, {"seed", c.seed}, {"m_low", c.m_low},
                {"format", c.format}};
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output path: " + path);
    out << text;
}

int finish_report(const RunConfig& cfg, json results, bool all_pass,
                  const std::string& csv_table = "") {
    if (cfg.format == "csv") {
        write_text(cfg.out, csv_table);
    } else {
        json report{{"config", config_json(cfg)},
                    {"results", std::move(results)},
                    {"verdict", all_pass ? "pass" : "fail"}};
        write_text(cfg.out, report.dump(2) + "\n");
    }
    return all_pass ? 0 : 2;
}

void dump_curve_csv(const std::string& path, const SpectralBasis& basis,
                    const CoefficientVector& b) {
    std::ostringstream os;
    os << "x,S\n";
    const int grid = basis.grid();
    for (int i = 0; i <= grid; ++i) {
        const double x = static_cast<double>(i) / grid;
        os << json(x).dump() << "," << json(combination_value(basis, b, x)).dump() << "\n";
    }
    write_text(path, os.str());
}

std::vector<double> random_unit_support(SplitMix64& rng, int n, int m_low) {
    const auto tail = rng.unit_vector(static_cast<std::size_t>(n - m_low + 1));
    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    for (std::size_t i = 0; i < tail.size(); ++i) b[static_cast<std::size_t>(m_low - 1) + i] = tail[i];
    return b;
}

// --------------------------------------------------------------------------

int cmd_spectrum(const RunConfig& cfg) {
    const DirichletProblem problem{Potential::parse(cfg.q)};
    const SpectralBasis basis = sign_normalize(SpectralBasis::build(problem, cfg.n, cfg.grid));

    bool all_pass = true;
    json eigenvalues = json::array();
    json node_counts = json::array();
    bool nodes_ok = true, simple_ok = true;
    double prev = -1e300;
    for (int j = 1; j <= cfg.n; ++j) {
        eigenvalues.push_back(basis[j].eigenvalue());
        node_counts.push_back(basis[j].node_count());
        if (basis[j].node_count() != j - 1) nodes_ok = false;
        if (basis[j].eigenvalue() <= prev) simple_ok = false;
        prev = basis[j].eigenvalue();
    }
    const double gram_dev = gram_max_deviation(basis);
    const bool gram_ok = gram_dev <= 1e-7;
    all_pass = nodes_ok && simple_ok && gram_ok;

    json samples = json::array();
    for (int j = 1; j <= cfg.n; ++j) samples.push_back(basis[j].values());

    json results = json::array({
        json{{"id", "eigenvalue_simplicity"}, {"pass", simple_ok}, {"eigenvalues", eigenvalues}},
        json{{"id", "node_counts"}, {"pass", nodes_ok}, {"node_counts", node_counts}},
        json{{"id", "orthonormality"}, {"pass", gram_ok}, {"max_deviation", gram_dev}},
        json{{"id", "basis"},
             {"pass", true},
             {"grid", basis.grid()},
             {"eigenvalues", eigenvalues},
             {"values", std::move(samples)}},
    });

    if (!cfg.dump_curve.empty()) {
        std::ostringstream os;
        os << "x";
        for (int j = 1; j <= cfg.n; ++j) os << ",h" << j;
        os << "\n";
        const int grid = basis.grid();
        for (int i = 0; i <= grid; ++i) {
            os << json(static_cast<double>(i) / grid).dump();
            for (int j = 1; j <= cfg.n; ++j)
                os << "," << json(basis[j].values()[static_cast<std::size_t>(i)]).dump();
            os << "\n";
        }
        write_text(cfg.dump_curve, os.str());
    }

    std::ostringstream csv;
    csv << "j,eigenvalue,node_count\n";
    for (int j = 1; j <= cfg.n; ++j)
        csv << j << "," << json(basis[j].eigenvalue()).dump() << "," << basis[j].node_count()
            << "\n";
    return finish_report(cfg, std::move(results), all_pass, csv.str());
}

int cmd_verify(const RunConfig& cfg) {
    if (cfg.m_low < 1 || cfg.m_low > cfg.n)
        throw std::invalid_argument("--m-low must lie in [1, n]");
    const DirichletProblem problem{Potential::parse(cfg.q)};
    const SpectralBasis basis = sign_normalize(SpectralBasis::build(problem, cfg.n, cfg.grid));

    SplitMix64 rng(cfg.seed);
    int upper_viol = 0, lower_viol = 0, gk_viol = 0;
    json rows = json::array();
    std::ostringstream csv;
    csv << "trial,total_with_multiplicity,nodes,antinodes,sturm_upper,sign_lower,"
           "gantmacher_krein\n";
    for (int t = 0; t < cfg.trials; ++t) {
        const std::vector<double> b = random_unit_support(rng, cfg.n, cfg.m_low);
        const ZeroReport report = find_zeros(basis, b, cfg.grid);
        const bool upper = sturm_upper_ok(report, cfg.n);
        const bool lower = sign_change_lower_ok(report, cfg.m_low);
        const bool gk = gantmacher_krein_ok(report, cfg.n);
        upper_viol += upper ? 0 : 1;
        lower_viol += lower ? 0 : 1;
        gk_viol += gk ? 0 : 1;
        rows.push_back(json{{"trial", t},
                            {"total_with_multiplicity", report.total_with_multiplicity},
                            {"nodes", report.nodes},
                            {"antinodes", report.antinodes},
                            {"sturm_upper", upper},
                            {"sign_lower", lower},
                            {"gantmacher_krein", gk}});
        csv << t << "," << report.total_with_multiplicity << "," << report.nodes << ","
            << report.antinodes << "," << upper << "," << lower << "," << gk << "\n";
        if (t == 0 && !cfg.dump_curve.empty()) dump_curve_csv(cfg.dump_curve, basis, b);
    }

    const bool all_pass = upper_viol == 0 && lower_viol == 0 && gk_viol == 0;
    json results = json::array({
        json{{"id", "sturm_upper_bound"},
             {"pass", upper_viol == 0},
             {"violations", upper_viol},
             {"trials", cfg.trials}},
        json{{"id", "sign_change_lower_bound"},
             {"pass", lower_viol == 0},
             {"violations", lower_viol},
             {"m_low", cfg.m_low}},
        json{{"id", "gantmacher_krein"}, {"pass", gk_viol == 0}, {"violations", gk_viol}},
        json{{"id", "trials"}, {"pass", all_pass}, {"rows", std::move(rows)}},
    });
    return finish_report(cfg, std::move(results), all_pass, csv.str());
}

NodeSpec parse_zero_list(const std::string& text) {
    NodeSpec spec;
    if (text.empty()) throw std::invalid_argument("--zeros requires point:multiplicity pairs");
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("zero entry '" + item + "' is not point:multiplicity");
        std::size_t used = 0;
        const double p = std::stod(item.substr(0, colon), &used);
        const int k = std::stoi(item.substr(colon + 1));
        spec.points.push_back(p);
        spec.multiplicities.push_back(k);
    }
    spec.validate();
    return spec;
}

int cmd_reconstruct(const RunConfig& cfg) {
    const NodeSpec spec = parse_zero_list(cfg.zeros);
    if (spec.total() != cfg.n - 1)
        throw std::invalid_argument("multiplicities sum to " + std::to_string(spec.total()) +
                                    " but n - 1 = " + std::to_string(cfg.n - 1));
    const DirichletProblem problem{Potential::parse(cfg.q)};
    const SpectralBasis basis = sign_normalize(SpectralBasis::build(problem, cfg.n, cfg.grid));

    const CoefficientVector b = reconstruct_from_zeros(basis, spec);
    const ZeroReport report = find_zeros(basis, b, cfg.grid);

    // independent route: kernel of the value/derivative constraint matrix
    Matrix constraints;
    for (std::size_t g = 0; g < spec.points.size(); ++g)
        for (int m = 0; m < spec.multiplicities[g]; ++m) {
            std::vector<double> row(static_cast<std::size_t>(cfg.n));
            for (int j = 1; j <= cfg.n; ++j)
                row[static_cast<std::size_t>(j - 1)] = basis[j].derivative(spec.points[g], m);
            constraints.push_back(std::move(row));
        }
    const std::vector<double> kernel = nullspace_vector(std::move(constraints));
    double dot = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) dot += b[i] * kernel[i];
    const double residual = 1.0 - std::abs(dot);

    bool locations_ok = report.records.size() == spec.points.size();
    bool orders_ok = locations_ok;
    double max_err = 0.0;
    if (locations_ok)
        for (std::size_t i = 0; i < spec.points.size(); ++i) {
            max_err = std::max(max_err, std::abs(report.records[i].location - spec.points[i]));
            if (report.records[i].multiplicity != spec.multiplicities[i]) orders_ok = false;
        }
    locations_ok = locations_ok && max_err <= 1e-8;
    const bool prop_ok = residual <= 1e-8;
    const bool all_pass = locations_ok && orders_ok && prop_ok;

    json detected = json::array();
    for (const auto& r : report.records)
        detected.push_back(json{{"location", r.location},
                                {"multiplicity", r.multiplicity},
                                {"kind", r.kind == ZeroKind::Node ? "node" : "antinode"}});

    json results = json::array({
        json{{"id", "reconstruction_coefficients"}, {"pass", true}, {"coefficients", b}},
        json{{"id", "reconstruction_roundtrip"},
             {"pass", locations_ok && orders_ok},
             {"max_location_error", max_err},
             {"orders_match", orders_ok},
             {"detected_zeros", std::move(detected)}},
        json{{"id", "proportionality"}, {"pass", prop_ok}, {"residual", residual}},
    });

    if (!cfg.dump_curve.empty()) dump_curve_csv(cfg.dump_curve, basis, b);

    std::ostringstream csv;
    csv << "location,multiplicity,kind\n";
    for (const auto& r : report.records)
        csv << json(r.location).dump() << "," << r.multiplicity << ","
            << (r.kind == ZeroKind::Node ? "node" : "antinode") << "\n";
    return finish_report(cfg, std::move(results), all_pass, csv.str());
}

int cmd_oscillator(const RunConfig& cfg) {
    if (cfg.n < 1 || cfg.n > 7) throw std::invalid_argument("oscillator supports 1 <= n <= 7");

    bool ode_ok = true;
    for (int m = 0; m <= 10; ++m)
        if (!hermite_ode_residual(m).is_zero()) ode_ok = false;

    bool identity_ok = true;
    double bn = 0.0;
    try {
        bn = slater_vandermonde_constant(cfg.n);
    } catch (const VerificationFailure&) {
        identity_ok = false;
    }

    SplitMix64 rng(cfg.seed);
    int bound_viol = 0;
    for (int t = 0; t < cfg.trials; ++t) {
        const int size = cfg.n >= 2 ? cfg.n : 1;
        const auto b = rng.unit_vector(static_cast<std::size_t>(size));
        if (oscillator_zero_count(b) > size - 1) ++bound_viol;
    }

    json hermites = json::array();
    for (int m = 0; m <= 5; ++m) {
        json coeffs = json::array();
        for (const auto& c : hermite(m).coeffs) coeffs.push_back(c.str());
        hermites.push_back(json{{"degree", m}, {"coefficients", std::move(coeffs)}});
    }

    const bool all_pass = ode_ok && identity_ok && bound_viol == 0;
    json results = json::array({
        json{{"id", "hermite_ode"}, {"pass", ode_ok}, {"max_degree", 10}},
        json{{"id", "slater_vandermonde_identity"},
             {"pass", identity_ok},
             {"n", cfg.n},
             {"prefactor", bn}},
        json{{"id", "oscillator_zero_bound"},
             {"pass", bound_viol == 0},
             {"violations", bound_viol},
             {"trials", cfg.trials}},
        json{{"id", "hermite_coefficients"}, {"pass", true}, {"polynomials", std::move(hermites)}},
    });

    std::ostringstream csv;
    csv << "check,pass\nhermite_ode," << ode_ok << "\nslater_vandermonde_identity," << identity_ok
        << "\noscillator_zero_bound," << (bound_viol == 0) << "\n";
    return finish_report(cfg, std::move(results), all_pass, csv.str());
}

int cmd_vandermonde(const RunConfig& cfg) {
    if (cfg.n < 1 || cfg.n > kVandermondeBudget)
        throw std::invalid_argument("vandermonde supports 1 <= n <= " +
                                    std::to_string(kVandermondeBudget));

    bool harmonic_ok = true;
    for (int k = 2; k <= cfg.n; ++k)
        if (!laplacian(vandermonde_poly(k)).is_zero()) harmonic_ok = false;

    bool factorial_ok = true;
    json constants = json::array();
    for (int k = 2; k <= cfg.n; ++k) {
        BigInt expected = 1;
        for (int j = 2; j < k; ++j) {
            BigInt f = 1;
            for (int i = 2; i <= j; ++i) f *= i;
            expected *= f;
        }
        const BigInt got = mixed_derivative_constant(k);
        constants.push_back(json{{"n", k}, {"value", got.str()}});
        if (got != expected) factorial_ok = false;
    }

    // local factorization at the two worked five-point configurations
    bool ratio_ok = true;
    json ratio_results = json::array();
    const std::vector<std::pair<std::string, GroupedPoint>> cases = {
        {"multiplicities 2,2,1", GroupedPoint({BigRat(0), BigRat(1), BigRat(2)}, {2, 2, 1})},
        {"multiplicities 3,1,1", GroupedPoint({BigRat(0), BigRat(1), BigRat(2)}, {3, 1, 1})},
    };
    for (const auto& [label, gp] : cases) {
        const auto rep = check_local_factorization(gp, 8, cfg.seed);
        json per_t = json::array();
        for (std::size_t i = 0; i < rep.t.size(); ++i) {
            per_t.push_back(json{{"t", rep.t[i]}, {"max_deviation", rep.max_deviation[i]}});
            if (rep.max_deviation[i] > 10.0 * rep.t[i]) ratio_ok = false;
        }
        ratio_results.push_back(json{{"case", label}, {"deviations", std::move(per_t)}});
    }

    const bool all_pass = harmonic_ok && factorial_ok && ratio_ok;
    json results = json::array({
        json{{"id", "harmonicity"}, {"pass", harmonic_ok}, {"max_n", cfg.n}},
        json{{"id", "factorial_constant"}, {"pass", factorial_ok}, {"constants", constants}},
        json{{"id", "local_factorization"}, {"pass", ratio_ok}, {"cases", std::move(ratio_results)}},
    });

    std::ostringstream csv;
    csv << "check,pass\nharmonicity," << harmonic_ok << "\nfactorial_constant," << factorial_ok
        << "\nlocal_factorization," << ratio_ok << "\n";
    return finish_report(cfg, std::move(results), all_pass, csv.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirichlet Sturm-Liouville eigenpairs, Slater determinants, and "
                 "zero-counting bound verification"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&cfg](CLI::App* sub) {
        sub->add_option("--q", cfg.q, "potential expression q(x)");
        sub->add_option("--n", cfg.n, "basis size");
        sub->add_option("--grid", cfg.grid, "dense grid resolution (>= 256)");
        sub->add_option("--trials", cfg.trials, "number of random trials");
        sub->add_option("--seed", cfg.seed, "PRNG seed");
        sub->add_option("--m-low", cfg.m_low, "lowest index carrying coefficient mass");
        sub->add_option("--zeros", cfg.zeros, "prescribed zeros, e.g. 0.2:1,0.5:2");
        sub->add_option("--out", cfg.out, "report path (default: stdout)");
        sub->add_option("--format", cfg.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--dump-curve", cfg.dump_curve, "write plot-ready CSV of (x, S(x))");
    };

    CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues, node counts, Gram check");
    CLI::App* verify = app.add_subcommand("verify", "randomized zero-counting bound suite");
    CLI::App* reconstruct =
        app.add_subcommand("reconstruct", "combination with prescribed zeros, round-tripped");
    CLI::App* oscillator_cmd =
        app.add_subcommand("oscillator", "exact harmonic-oscillator identity suite");
    CLI::App* vandermonde_cmd =
        app.add_subcommand("vandermonde", "exact difference-product polynomial suite");
    for (auto* sub : {spectrum, verify, reconstruct, oscillator_cmd, vandermonde_cmd})
        add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (cfg.grid == 0) cfg.grid = resolve_default_grid();
        if (cfg.grid < 256) throw std::invalid_argument("--grid must be >= 256");
        if (cfg.n < 1) throw std::invalid_argument("--n must be >= 1");
        if (cfg.trials < 0) throw std::invalid_argument("--trials must be >= 0");

        if (*spectrum) return cmd_spectrum(cfg);
        if (*verify) return cmd_verify(cfg);
        if (*reconstruct) return cmd_reconstruct(cfg);
        if (*oscillator_cmd) return cmd_oscillator(cfg);
        if (*vandermonde_cmd) return cmd_vandermonde(cfg);
        return 1;
    } catch (const SyntaxError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const EvalDomainError& e) {
        std::cerr << "error: potential is not evaluable near [0,1]: " << e.what() << "\n";
        return 1;
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const OrderBudget& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        // solver-level contract violations (verification, bracketing, probes)
        std::cerr << "contract violation: " << e.what() << "\n";
        return 2;
    }
}
