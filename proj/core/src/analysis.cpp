#include "rsinsure/analysis.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "rsinsure/errors.hpp"
#include "rsinsure/insurance.hpp"
#include "rsinsure/policy.hpp"

namespace rsinsure {

std::vector<double> log_gap_closed_form(const MarketModel& model, const InsuranceAccess& access) {
    if (model.size() != 2) throw InvalidParameter("closed-form log gap needs two regimes");
    const UtilitySpec u = UtilitySpec::log();
    const std::vector<double> with = loss_terms(model, u, access);
    const std::vector<double> without = loss_terms(model, u, InsuranceAccess::none());
    const double d = model.delta();
    const double pi[2] = {model.generator().exit_rate(0), model.generator().exit_rate(1)};
    const double denom = d * d * (d + pi[0] + pi[1]);
    std::vector<double> gap(2);
    for (std::size_t i = 0; i < 2; ++i) {
        const std::size_t j = 1 - i;
        const double li = model.regime(i).lambda, lj = model.regime(j).lambda;
        gap[i] = (pi[i] * lj * (with[j] - without[j]) + li * (d + pi[j]) * (with[i] - without[i])) / denom;
    }
    return gap;
}

ValueGapReport value_gap(const MarketModel& model, const UtilitySpec& utility, double x,
                         const InsuranceAccess& access) {
    if (!(x > 0.0)) throw InvalidParameter("wealth must be positive");
    const ValueFunction with(solve(model, utility, access));
    const ValueFunction without(solve(model, utility, InsuranceAccess::none()));

    ValueGapReport r;
    r.x = x;
    r.utility = utility;
    r.access = access;
    r.loss = model.loss().describe();
    r.delta = model.delta();
    r.params = model.regimes();
    for (std::size_t i = 0; i < model.size(); ++i) {
        r.insured.push_back(with(x, i));
        r.constrained.push_back(without(x, i));
        r.gap.push_back(r.insured.back() - r.constrained.back());
    }
    if (utility.is_log() && model.size() == 2) {
        // the ln(delta x)/delta terms cancel, so the gap is A - a at any x
        const std::vector<double> closed = log_gap_closed_form(model, access);
        for (std::size_t i = 0; i < 2; ++i) {
            const double direct = with.coefficients().values[i] - without.coefficients().values[i];
            if (std::abs(closed[i] - direct) > 1e-12)
                throw std::logic_error("closed-form and direct log gaps disagree");
            r.gap[i] = closed[i];
        }
    }
    return r;
}

std::vector<double> increase_ratio(const MarketModel& model, const InsuranceAccess& access) {
    const UtilitySpec u = UtilitySpec::log();
    const CoefficientSet with = solve(model, u, access);
    const CoefficientSet without = solve(model, u, InsuranceAccess::none());
    std::vector<double> m(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        // at x = 1/delta the value equals the coefficient
        const double a = without.values[i];
        if (a == 0.0) throw DegenerateDenominator("constrained value is zero in regime " + std::to_string(i + 1));
        m[i] = std::abs(with.values[i] - a) / std::abs(a);
    }
    return m;
}

CsvTable consumption_curves(const MarketModel& base, const std::vector<double>& alpha_grid,
                            const std::vector<double>& l_values) {
    std::vector<std::string> header{"alpha", "l"};
    for (std::size_t i = 0; i < base.size(); ++i) header.push_back("kappa_regime" + std::to_string(i + 1));
    CsvTable t(header);
    for (double l : l_values) {
        const MarketModel model = base.with_loss(LossModel::constant(l));
        for (double a : alpha_grid) {
            const CoefficientSet c = solve(model, UtilitySpec::power(a));
            std::vector<CsvTable::Cell> row{a, l};
            for (std::size_t i = 0; i < model.size(); ++i) row.emplace_back(consumption_ratio(c, i));
            t.add_row(std::move(row));
        }
    }
    return t;
}

SensitivityPoint indemnity_sensitivity(double theta, double alpha, double eta, double l) {
    if (!(theta > 0.0) || !(alpha < 1.0)) throw InvalidParameter("need theta > 0 and alpha < 1");
    const double k = 1.0 - alpha;
    const double lt = std::log1p(theta);
    const double e = std::exp(-lt / k);  // (1+theta)^(-1/(1-alpha))
    const double nu = 1.0 - e;
    SensitivityPoint s;
    s.theta = theta;
    s.alpha = alpha;
    s.active = eta * l > nu;
    s.indemnity = std::max(eta * l - nu, 0.0);
    s.d_theta = -(1.0 / k) * std::pow(1.0 + theta, -(2.0 - alpha) / k);
    s.d2_theta = ((2.0 - alpha) / (k * k)) * std::pow(1.0 + theta, (2.0 * alpha - 3.0) / k);
    s.d_alpha = -(1.0 / (k * k)) * lt * e;
    s.d2_alpha = (lt / (k * k * k)) * (lt / k - 2.0) * e;
    s.alpha_tilde = 1.0 - lt / 2.0;
    return s;
}

double alpha_inflection(double theta) {
    auto d2 = [theta](double a) { return indemnity_sensitivity(theta, a, 1.0, 1.0).d2_alpha; };
    double lo = -5.0;
    if (!(d2(lo) < 0.0)) throw std::domain_error("no sign change of d2I/dalpha2 on the scan");
    double hi = lo;
    for (double a = lo; a < 1.0 - 1e-6; a += 1e-3) {
        double v = d2(a);
        if (v > 0.0) {
            hi = a;
            break;
        }
        if (v < 0.0) lo = a;
    }
    if (hi == -5.0) throw std::domain_error("no sign change of d2I/dalpha2 on the scan");
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (d2(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

CsvTable insurance_sensitivity(const std::vector<double>& theta_grid,
                               const std::vector<double>& alpha_grid, const MarketModel& model,
                               std::size_t regime) {
    if (!model.loss().is_constant())
        throw InvalidParameter("sensitivity table needs a constant loss fraction");
    const double eta = model.regime(regime).eta;
    const double l = model.loss().fraction();
    CsvTable t({"theta", "alpha", "active", "indemnity", "dI_dtheta", "d2I_dtheta2", "dI_dalpha",
                "d2I_dalpha2", "alpha_tilde", "alpha_inflection"});
    for (double theta : theta_grid) {
        const double located = alpha_inflection(theta);
        for (double a : alpha_grid) {
            const SensitivityPoint s = indemnity_sensitivity(theta, a, eta, l);
            t.add_row({theta, a, s.active, s.indemnity, s.d_theta, s.d2_theta, s.d_alpha, s.d2_alpha,
                       s.alpha_tilde, located});
        }
    }
    return t;
}

std::vector<TableRow> reproduce_table1() {
    struct Cell {
        double alpha, l;
    };
    static const Cell cells[] = {{-0.01, 0.30}, {-0.01, 0.60}, {-0.01, 0.90}, {-0.5, 0.15},
                                 {-0.5, 0.35},  {-0.5, 0.50},  {-1.0, 0.20},  {-1.0, 0.30},
                                 {-1.0, 0.40},  {-2.0, 0.08},  {-2.0, 0.10},  {-2.0, 0.12}};
    std::vector<TableRow> rows;
    for (const Cell& c : cells) {
        const MarketModel model = parameter_set("I").delta(0.25).loss(LossModel::constant(c.l)).build();
        const UtilitySpec u = UtilitySpec::negative_power(c.alpha);
        const ValueGapReport ref = value_gap(model, u, 1.0, InsuranceAccess::only({0}));
        const ValueGapReport full = value_gap(model, u, 1.0);
        rows.push_back({c.alpha, c.l, ref.gap[0], ref.gap[1], full.gap[0], full.gap[1]});
    }
    return rows;
}

CsvTable table1_csv(const std::vector<TableRow>& rows) {
    CsvTable t({"alpha", "l", "gap_regime1", "gap_regime2", "full_access_gap_regime1",
                "full_access_gap_regime2"});
    for (const TableRow& r : rows)
        t.add_row({r.alpha, r.l, r.gap_regime1, r.gap_regime2, r.full_gap_regime1, r.full_gap_regime2});
    return t;
}

double lambda_upsilon_difference(double theta, double eta) {
    const double floor = theta / (1.0 + theta);
    if (eta < floor)
        throw ConstraintViolated("eta=" + format_number(eta) + " is below theta/(1+theta)=" +
                                 format_number(floor));
    // a one-regime market carrying only (theta, eta) is enough for the loss terms
    const MarketModel m(validate_generator({{0.0}}), {{0.05, 0.1, 0.2, 1.0, theta, eta}}, 0.1,
                        LossModel::uniform());
    return lambda_term(0, UtilitySpec::log(), m) - upsilon_term(0, UtilitySpec::log(), m);
}

CsvTable lambda_upsilon_curve(const std::vector<double>& theta_values,
                              const std::vector<double>& eta_grid) {
    CsvTable t({"theta", "eta", "lambda_minus_upsilon"});
    for (double theta : theta_values)
        for (double eta : eta_grid) t.add_row({theta, eta, lambda_upsilon_difference(theta, eta)});
    return t;
}

double regime_ordering_boundary(const MarketModel& model) {
    if (model.size() != 2) throw InvalidParameter("regime ordering needs two regimes");
    const RegimeParams& p1 = model.regime(0);
    const RegimeParams& p2 = model.regime(1);
    auto f = [&](double a) {
        return deductible_fraction(p1.theta, a) / p1.eta - deductible_fraction(p2.theta, a) / p2.eta;
    };
    double lo = 1e-9, hi = 1.0 - 1e-12;
    if (f(lo) * f(hi) > 0.0) throw RegimeOrderingViolated("no ordering switch for alpha in (0,1)");
    const bool rising = f(lo) < 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((f(mid) < 0.0) == rising ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<PowerGapRow> power_gap_curves(const MarketModel& base,
                                          const std::vector<double>& alpha_grid) {
    if (base.size() != 2) throw InvalidParameter("power gap curves need exactly two regimes");
    const double boundary = regime_ordering_boundary(base);
    const RegimeParams& p1 = base.regime(0);
    const RegimeParams& p2 = base.regime(1);

    std::vector<PowerGapRow> rows;
    for (double a : alpha_grid) {
        if (!(a > 0.0 && a <= boundary))
            throw RegimeOrderingViolated("alpha=" + format_number(a) + " outside (0, " +
                                         format_number(boundary) + "]");
        const UtilitySpec u = UtilitySpec::positive_power(a);
        const double r1 = deductible_fraction(p1.theta, a) / p1.eta;
        const double r2 = deductible_fraction(p2.theta, a) / p2.eta;
        const std::pair<const char*, double> choices[] = {{"l_M", 0.5 * (r1 + r2)}, {"l_m", r2 - 0.01}};
        for (const auto& [name, l] : choices) {
            const MarketModel m = base.with_loss(LossModel::constant(l));
            const ValueGapReport g = value_gap(m, u, 1.0);
            rows.push_back({a, name, l, g.gap[0], g.gap[1], insurance_active(0, u, m),
                            insurance_active(1, u, m)});
        }
    }
    return rows;
}

CsvTable power_gap_csv(const std::vector<PowerGapRow>& rows) {
    CsvTable t({"alpha", "choice", "l", "gap_regime1", "gap_regime2", "active_regime1", "active_regime2"});
    for (const PowerGapRow& r : rows)
        t.add_row({r.alpha, r.choice, r.l, r.gap_regime1, r.gap_regime2, r.active_regime1, r.active_regime2});
    return t;
}

namespace grids {

namespace {
std::vector<double> range(double from, double to, double step) {
    std::vector<double> v;
    const auto n = static_cast<long>(std::llround((to - from) / step));
    for (long k = 0; k <= n; ++k) v.push_back(from + static_cast<double>(k) * step);
    return v;
}
}  // namespace

std::vector<double> figure1_alpha() {
    auto v = range(-0.99, -0.01, 0.01);
    v.push_back(-1e-4);
    return v;
}

std::vector<double> figure2_alpha() {
    auto v = range(0.01, 0.89, 0.01);
    v.insert(v.begin(), 1e-4);
    return v;
}

std::vector<double> consumption_l() { return {0.3, 0.5, 0.7}; }
std::vector<double> figure3_l() { return range(0.17, 0.99, 0.01); }
std::vector<double> figure4_theta() { return {0.01, 0.1, 0.2, 0.5, 0.8, 0.99}; }

std::vector<double> figure4_eta(double theta) {
    const double floor = theta / (1.0 + theta);
    std::vector<double> v;
    for (int k = 1; k <= 40; ++k) v.push_back(floor + (1.0 - floor) * k / 40.0);
    return v;
}

std::vector<double> figure4_common_eta() { return range(0.5, 1.0, 0.0125); }
// stops where l_m = nu_2/eta_2 - 0.01 would fall below nu_1/eta_1 (alpha ~ 0.8574)
std::vector<double> figure5_alpha() { return range(0.01, 0.85, 0.01); }
std::vector<double> sensitivity_theta() { return {0.05, 0.1, 0.15, 0.25, 0.5, 1.0}; }
std::vector<double> sensitivity_alpha() { return range(-2.0, 0.9, 0.1); }

}  // namespace grids

CsvTable increase_ratio_curve(const std::vector<double>& l_grid) {
    CsvTable t({"l", "m_regime1", "m_regime2", "full_access_m_regime1", "full_access_m_regime2",
                "active_regime1", "active_regime2"});
    const UtilitySpec u = UtilitySpec::log();
    for (double l : l_grid) {
        const MarketModel m = parameter_set("I").delta(0.2).loss(LossModel::constant(l)).build();
        const auto ref = increase_ratio(m, InsuranceAccess::only({0}));
        const auto full = increase_ratio(m);
        t.add_row({l, ref[0], ref[1], full[0], full[1], insurance_active(0, u, m), insurance_active(1, u, m)});
    }
    return t;
}

std::vector<std::string> reproduce_figures(const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const CsvTable& t) {
        t.write((fs::path(dir) / name).string());
        written.push_back(name);
    };

    // the base loss is replaced per curve
    const MarketModel set1 = parameter_set("I").loss(LossModel::constant(0.5)).build();
    const MarketModel set2 = parameter_set("II").loss(LossModel::constant(0.5)).build();
    emit("figure1_consumption_negative_alpha.csv",
         consumption_curves(set1, grids::figure1_alpha(), grids::consumption_l()));
    emit("figure2_consumption_positive_alpha.csv",
         consumption_curves(set2, grids::figure2_alpha(), grids::consumption_l()));
    emit("figure3_increase_ratio.csv", increase_ratio_curve(grids::figure3_l()));

    CsvTable f4({"theta", "eta", "lambda_minus_upsilon"});
    for (double theta : grids::figure4_theta())
        for (double eta : grids::figure4_eta(theta))
            f4.add_row({theta, eta, lambda_upsilon_difference(theta, eta)});
    emit("figure4_lambda_minus_upsilon.csv", f4);

    emit("figure5_power_gap.csv", power_gap_csv(power_gap_curves(set2, grids::figure5_alpha())));

    emit("insurance_sensitivity.csv",
         insurance_sensitivity(grids::sensitivity_theta(), grids::sensitivity_alpha(), set1, 0));
    return written;
}

}  // namespace rsinsure
