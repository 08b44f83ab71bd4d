#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

#include "rsinsure/analysis.hpp"
#include "rsinsure/coefficients.hpp"
#include "rsinsure/config.hpp"
#include "rsinsure/csv.hpp"
#include "rsinsure/errors.hpp"
#include "rsinsure/insurance.hpp"
#include "rsinsure/market.hpp"
#include "rsinsure/policy.hpp"
#include "rsinsure/simulator.hpp"

namespace rsinsure::cli {

namespace {

std::string fmt(double v) { return format_number(v); }

double parse_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v))
        throw InvalidParameter("cannot read " + what + " from '" + s + "'");
    return v;
}

struct Common {
    std::string config;
    std::optional<double> delta;
    bool constrained = false;
    std::vector<std::size_t> insured;  // 1-based, from --insured-regimes
};

void add_access_flags(CLI::App* cmd, Common& c) {
    auto* con = cmd->add_flag("--constrained", c.constrained, "Solve without insurance market access");
    cmd->add_option("--insured-regimes", c.insured,
                    "Comma-separated 1-based regimes with insurance access (default: all)")
        ->delimiter(',')
        ->excludes(con);
}

ModelConfig load(const Common& c) {
    ModelConfig cfg = load_config(c.config);
    if (c.delta) cfg.model = cfg.model.with_delta(*c.delta);
    return cfg;
}

InsuranceAccess access_of(const Common& c, std::size_t regimes) {
    if (c.constrained) return InsuranceAccess::none();
    if (c.insured.empty()) return InsuranceAccess::all();
    std::vector<std::size_t> zero_based;
    for (std::size_t r : c.insured) {
        if (r < 1 || r > regimes)
            throw InvalidParameter("--insured-regimes: regime " + std::to_string(r) + " out of range 1.." +
                                   std::to_string(regimes));
        zero_based.push_back(r - 1);
    }
    return InsuranceAccess::only(zero_based);
}

std::size_t regime_index(std::size_t one_based, std::size_t regimes) {
    if (one_based < 1 || one_based > regimes)
        throw InvalidParameter("--regime " + std::to_string(one_based) + " out of range 1.." +
                               std::to_string(regimes));
    return one_based - 1;
}

void print_header(std::ostream& out, const ModelConfig& cfg, const InsuranceAccess& access) {
    out << "utility: " << cfg.utility.name() << '\n';
    out << "loss: " << cfg.model.loss().describe() << '\n';
    out << "delta: " << fmt(cfg.model.delta()) << '\n';
    out << "insurance access: " << access.describe() << '\n';
}

// solve

struct SolveArgs {
    Common common;
    double x = 1.0;
};

int do_solve(const SolveArgs& a, std::ostream& out) {
    const ModelConfig cfg = load(a.common);
    const InsuranceAccess access = access_of(a.common, cfg.model.size());
    const CoefficientSet coeffs = solve(cfg.model, cfg.utility, access);
    const PolicyBundle bundle = make_policy_bundle(cfg.model, coeffs);
    const std::vector<double> res = hjb_residual(cfg.model, cfg.utility, coeffs, a.x);
    const ValueFunction vf(coeffs);

    print_header(out, cfg, access);
    out << "solver residual: " << fmt(coeffs.residual) << '\n';
    out << "solver iterations: " << coeffs.iterations << '\n';
    CsvTable t({"regime", "coefficient", "pi_star", "kappa", "nu", "insured", "value_at_x", "hjb_residual"});
    for (std::size_t i = 0; i < cfg.model.size(); ++i) {
        const bool insured = bundle.insured(i) && insurance_active(i, cfg.utility, cfg.model);
        t.add_row({static_cast<int>(i + 1), coeffs.values[i], bundle.pi_star[i], bundle.kappa[i],
                   bundle.nu[i], insured, vf(a.x, i), res[i]});
    }
    out << "x: " << fmt(a.x) << '\n' << t.str();
    return 0;
}

// simulate

struct SimulateArgs {
    Common common;
    double x0 = 1.0;
    std::size_t regime = 1;
    std::size_t paths = 100000;
    double horizon = 200.0;
    double dt = 1.0 / 500.0;
    std::uint64_t seed = 20240611;
    double perturb_pi = 1.0;
    double perturb_kappa = 1.0;
    unsigned threads = 0;
    bool no_antithetic = false;
};

int do_simulate(const SimulateArgs& a, std::ostream& out) {
    const ModelConfig cfg = load(a.common);
    const InsuranceAccess access = access_of(a.common, cfg.model.size());
    const std::size_t i0 = regime_index(a.regime, cfg.model.size());
    if (!(a.x0 > 0.0)) throw InvalidParameter("--x0 must be positive");
    if (!(a.dt > 0.0) || !(a.horizon > 0.0)) throw InvalidParameter("--dt and --horizon must be positive");
    if (a.paths < 2) throw InvalidParameter("--paths must be at least 2");
    if (!(a.perturb_pi > 0.0) || !(a.perturb_kappa > 0.0))
        throw InvalidParameter("perturbation factors must be positive");

    const CoefficientSet coeffs = solve(cfg.model, cfg.utility, access);
    const PolicyBundle bundle = perturb(make_policy_bundle(cfg.model, coeffs), a.perturb_pi, a.perturb_kappa);
    SimulationConfig sc;
    sc.paths = a.paths;
    sc.horizon = a.horizon;
    sc.dt = a.dt;
    sc.master_seed = a.seed;
    sc.antithetic = !a.no_antithetic;
    sc.threads = a.threads;
    const MCEstimate e = estimate_value(cfg.model, bundle, a.x0, i0, sc);
    const double analytic = ValueFunction(coeffs)(a.x0, i0);

    print_header(out, cfg, access);
    out << "x0: " << fmt(a.x0) << '\n';
    out << "regime: " << a.regime << '\n';
    out << "perturb pi: " << fmt(a.perturb_pi) << '\n';
    out << "perturb kappa: " << fmt(a.perturb_kappa) << '\n';
    out << "paths: " << e.paths_used << '\n';
    out << "horizon: " << fmt(a.horizon) << '\n';
    out << "dt: " << fmt(a.dt) << '\n';
    out << "seed: " << a.seed << '\n';
    out << "mc mean: " << fmt(e.mean) << '\n';
    out << "mc std error: " << fmt(e.std_error) << '\n';
    out << "analytic value: " << fmt(analytic) << '\n';
    out << "difference: " << fmt(e.mean - analytic) << '\n';
    out << "z score: " << fmt(e.std_error > 0.0 ? (e.mean - analytic) / e.std_error : 0.0) << '\n';
    out << "truncation bound: " << fmt(e.truncation_bound) << '\n';
    out << "min wealth: " << fmt(e.min_wealth) << '\n';
    return 0;
}

// analyze

struct AnalyzeArgs {
    Common common;
    std::string kind;
    std::string out;
    std::optional<double> x;
    std::string alpha_grid, l_grid, theta_grid, eta_grid;
    std::size_t regime = 1;
};

std::vector<double> grid_or(const std::string& text, std::vector<double> fallback) {
    return text.empty() ? fallback : parse_grid(text);
}

int do_analyze(const AnalyzeArgs& a, std::ostream& out) {
    std::optional<ModelConfig> cfg;
    if (!a.common.config.empty()) cfg = load(a.common);
    else if (a.kind != "lambda-upsilon") throw InvalidParameter("analyze " + a.kind + " needs --config");

    std::optional<CsvTable> table;
    if (a.kind == "gap" || a.kind == "ratio") {
        const MarketModel& base = cfg->model;
        const InsuranceAccess access = access_of(a.common, base.size());
        // default point: x = 1 for the gap, x = 1/delta for the ratio
        const double x = a.x.value_or(a.kind == "gap" ? 1.0 : 1.0 / base.delta());
        std::vector<std::optional<double>> losses;
        if (a.l_grid.empty()) losses.push_back(std::nullopt);
        for (double l : grid_or(a.l_grid, {})) losses.push_back(l);

        std::vector<std::string> header{"l", "regime", "insured_value", "constrained_value", "gap"};
        if (a.kind == "ratio") header.push_back("increase_ratio");
        table.emplace(header);
        for (const auto& l : losses) {
            const MarketModel m = l ? base.with_loss(LossModel::constant(*l)) : base;
            const ValueGapReport g = value_gap(m, cfg->utility, x, access);
            const std::string lcol = l ? fmt(*l) : m.loss().describe();
            for (std::size_t i = 0; i < m.size(); ++i) {
                std::vector<CsvTable::Cell> row{lcol, static_cast<int>(i + 1), g.insured[i], g.constrained[i], g.gap[i]};
                if (a.kind == "ratio") {
                    if (g.constrained[i] == 0.0)
                        throw DegenerateDenominator("constrained value is zero in regime " + std::to_string(i + 1));
                    row.emplace_back(std::abs(g.gap[i]) / std::abs(g.constrained[i]));
                }
                table->add_row(std::move(row));
            }
        }
    } else if (a.kind == "sensitivity") {
        table = insurance_sensitivity(grid_or(a.theta_grid, grids::sensitivity_theta()),
                                      grid_or(a.alpha_grid, grids::sensitivity_alpha()), cfg->model,
                                      regime_index(a.regime, cfg->model.size()));
    } else if (a.kind == "consumption") {
        table = consumption_curves(cfg->model, grid_or(a.alpha_grid, grids::figure1_alpha()),
                                   grid_or(a.l_grid, grids::consumption_l()));
    } else if (a.kind == "lambda-upsilon") {
        table.emplace(std::vector<std::string>{"theta", "eta", "lambda_minus_upsilon"});
        for (double theta : grid_or(a.theta_grid, grids::figure4_theta()))
            for (double eta : grid_or(a.eta_grid, grids::figure4_eta(theta)))
                table->add_row({theta, eta, lambda_upsilon_difference(theta, eta)});
    } else {  // power-gap
        table = power_gap_csv(power_gap_curves(cfg->model, grid_or(a.alpha_grid, grids::figure5_alpha())));
    }
    table->write(a.out);
    out << "wrote " << table->rows() << " rows to " << a.out << '\n';
    return 0;
}

// reproduce

struct ReproduceArgs {
    std::string target;
    std::string out;
};

int do_reproduce(const ReproduceArgs& a, std::ostream& out) {
    if (a.target == "table1") {
        const CsvTable t = table1_csv(reproduce_table1());
        t.write(a.out);
        out << t.str();
    } else {
        for (const std::string& name : reproduce_figures(a.out)) out << a.out << '/' << name << '\n';
    }
    return 0;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> v;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw InvalidParameter("grid '" + text + "' must be start:stop:step");
        const double from = parse_double(parts[0], "grid start");
        const double to = parse_double(parts[1], "grid stop");
        const double step = parse_double(parts[2], "grid step");
        if (!(step > 0.0) || to < from) throw InvalidParameter("grid '" + text + "' is empty or has step <= 0");
        const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
        if (n > 1000000) throw InvalidParameter("grid '" + text + "' has too many points");
        for (long k = 0; k <= n; ++k) v.push_back(from + static_cast<double>(k) * step);
        return v;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) v.push_back(parse_double(p, "grid value"));
    if (v.empty()) throw InvalidParameter("empty grid");
    return v;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Regime-switching consumption, investment and insurance solver", "rsinsure"};
    app.require_subcommand(1, 1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    SolveArgs solve_args;
    auto* solve_cmd = app.add_subcommand("solve", "Solve the value function coefficients and optimal policies");
    solve_cmd->add_option("--config", solve_args.common.config, "Model config JSON")->required();
    solve_cmd->add_option("--delta", solve_args.common.delta, "Override the discount rate");
    add_access_flags(solve_cmd, solve_args.common);
    solve_cmd->add_option("--x", solve_args.x, "Wealth at which values and HJB residuals are reported")
        ->capture_default_str();

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of the value under the closed-form policy");
    sim_cmd->add_option("--config", sim.common.config, "Model config JSON")->required();
    sim_cmd->add_option("--delta", sim.common.delta, "Override the discount rate");
    add_access_flags(sim_cmd, sim.common);
    sim_cmd->add_option("--x0", sim.x0, "Initial wealth")->capture_default_str();
    sim_cmd->add_option("--regime", sim.regime, "Initial regime (1-based)")->capture_default_str();
    sim_cmd->add_option("--paths", sim.paths, "Number of paths")->capture_default_str();
    sim_cmd->add_option("--horizon", sim.horizon, "Truncation horizon in years")->capture_default_str();
    sim_cmd->add_option("--dt", sim.dt, "Time step")->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
    sim_cmd->add_option("--perturb-pi", sim.perturb_pi, "Scale the optimal investment ratio")->capture_default_str();
    sim_cmd->add_option("--perturb-kappa", sim.perturb_kappa, "Scale the optimal consumption ratio")
        ->capture_default_str();
    sim_cmd->add_option("--threads", sim.threads, "Worker threads (0: all cores); output does not depend on it")
        ->capture_default_str();
    sim_cmd->add_flag("--no-antithetic", sim.no_antithetic, "Disable antithetic pairing");

    AnalyzeArgs an;
    auto* an_cmd = app.add_subcommand("analyze", "Write an analysis table as CSV");
    an_cmd->add_option("kind", an.kind, "gap | ratio | sensitivity | consumption | lambda-upsilon | power-gap")
        ->required()
        ->check(CLI::IsMember({"gap", "ratio", "sensitivity", "consumption", "lambda-upsilon", "power-gap"}));
    an_cmd->add_option("--config", an.common.config, "Model config JSON (optional for lambda-upsilon)");
    an_cmd->add_option("--delta", an.common.delta, "Override the discount rate");
    add_access_flags(an_cmd, an.common);
    an_cmd->add_option("--out", an.out, "Output CSV file")->required();
    an_cmd->add_option("--x", an.x, "Wealth level (gap: 1, ratio: 1/delta)");
    an_cmd->add_option("--alpha-grid", an.alpha_grid, "Risk aversion grid, a,b,c or start:stop:step");
    an_cmd->add_option("--l-grid", an.l_grid, "Constant loss fraction grid, a,b,c or start:stop:step");
    an_cmd->add_option("--theta-grid", an.theta_grid, "Loading factor grid, a,b,c or start:stop:step");
    an_cmd->add_option("--eta-grid", an.eta_grid, "Loss intensity grid, a,b,c or start:stop:step");
    an_cmd->add_option("--regime", an.regime, "Regime for the sensitivity table (1-based)")->capture_default_str();

    ReproduceArgs rep;
    auto* rep_cmd = app.add_subcommand("reproduce", "Regenerate the reference table or figure data");
    rep_cmd->add_option("target", rep.target, "table1 | figures")
        ->required()
        ->check(CLI::IsMember({"table1", "figures"}));
    rep_cmd->add_option("--out", rep.out, "CSV file for table1, directory for figures")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve_cmd->parsed()) return do_solve(solve_args, out);
        if (sim_cmd->parsed()) return do_simulate(sim, out);
        if (an_cmd->parsed()) return do_analyze(an, out);
        return do_reproduce(rep, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"rsinsure"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace rsinsure::cli
