#include "rsinsure/insurance.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>

#include "rsinsure/errors.hpp"

namespace rsinsure {

double deductible_fraction(double theta, double alpha) {
    if (!(theta > 0.0)) throw InvalidParameter("loading theta must be positive");
    if (alpha == 0.0) return theta / (1.0 + theta);
    // 1 - (1+theta)^(-1/(1-alpha)) without cancellation for small theta
    return -std::expm1(-std::log1p(theta) / (1.0 - alpha));
}

double deductible_fraction(double theta, const UtilitySpec& utility) {
    return deductible_fraction(theta, utility.alpha());
}

double post_loss_multiplier(double eta, double nu, double l) {
    double loss = eta * l;
    return loss > nu ? 1.0 - nu : 1.0 - loss;
}

double optimal_indemnity(double x, std::size_t regime, double l, const UtilitySpec& utility,
                         const MarketModel& model) {
    const RegimeParams& p = model.regime(regime);
    double nu = deductible_fraction(p.theta, utility);
    return std::max(p.eta * l - nu, 0.0) * x;
}

bool buy_insurance(std::size_t regime, double l, const UtilitySpec& utility,
                   const MarketModel& model) {
    const RegimeParams& p = model.regime(regime);
    return p.eta * l > deductible_fraction(p.theta, utility);
}

bool insurance_active(std::size_t regime, const UtilitySpec& utility, const MarketModel& model) {
    return buy_insurance(regime, model.loss().ess_sup(), utility, model);
}

double expected_excess(double eta, double nu, const LossModel& loss) {
    if (loss.is_constant()) return std::max(eta * loss.fraction() - nu, 0.0);
    if (eta <= nu) return 0.0;
    return (eta - nu) * (eta - nu) / (2.0 * eta);
}

namespace {

// E[ln(1 - eta l)]
double log_no_insurance(double eta, const LossModel& loss) {
    if (loss.is_constant()) {
        double m = 1.0 - eta * loss.fraction();
        if (!(m > 0.0)) throw DivergentExpectation("E[ln(1-eta l)] diverges: eta*l = 1");
        return std::log(m);
    }
    if (eta == 1.0) return -1.0;  // limit of (1-1/eta)ln(1-eta) - 1
    return (1.0 - 1.0 / eta) * std::log1p(-eta) - 1.0;
}

// E[(1 - eta l)^alpha]
double power_no_insurance(double eta, double alpha, const LossModel& loss) {
    if (loss.is_constant()) {
        double m = 1.0 - eta * loss.fraction();
        if (!(m > 0.0) && alpha < 0.0)
            throw DivergentExpectation("E[(1-eta l)^alpha] diverges: eta*l = 1 with alpha < 0");
        return std::pow(m, alpha);
    }
    if (eta == 1.0 && alpha <= -1.0)
        throw DivergentExpectation("E[(1-l)^alpha] diverges for alpha <= -1 under uniform loss");
    if (alpha == -1.0) return -std::log1p(-eta) / eta;
    return -std::expm1((1.0 + alpha) * std::log1p(-eta)) / (eta * (1.0 + alpha));
}

double log_insured(double eta, double theta, const LossModel& loss) {
    if (loss.is_constant())
        return -std::log1p(theta) - eta * loss.fraction() * (1.0 + theta) + theta;
    double a = eta * (1.0 + theta) - theta;
    return (1.0 / eta - 1.0) * std::log1p(theta) - (a * a + 2.0 * theta) / (2.0 * eta * (1.0 + theta));
}

double power_insured(double eta, double theta, double alpha, double nu, const LossModel& loss) {
    double keep = 1.0 - nu;
    if (loss.is_constant())
        return std::pow(keep, alpha) - alpha * (1.0 + theta) * (eta * loss.fraction() - nu);
    double excess = (eta - nu) * (eta - nu) / (2.0 * eta);
    if (alpha == -1.0)
        return -std::log(keep) / eta + (1.0 - nu / eta) / keep + (1.0 + theta) * excess;
    return std::pow(keep, alpha) * (1.0 - nu / eta - keep / (eta * (1.0 + alpha))) +
           1.0 / (eta * (1.0 + alpha)) - alpha * (1.0 + theta) * excess;
}

}  // namespace

double upsilon_term(std::size_t regime, const UtilitySpec& utility, const MarketModel& model) {
    const RegimeParams& p = model.regime(regime);
    if (utility.is_log()) return log_no_insurance(p.eta, model.loss());
    return power_no_insurance(p.eta, utility.alpha(), model.loss());
}

double lambda_term(std::size_t regime, const UtilitySpec& utility, const MarketModel& model) {
    if (!insurance_active(regime, utility, model)) return upsilon_term(regime, utility, model);
    const RegimeParams& p = model.regime(regime);
    if (utility.is_log()) return log_insured(p.eta, p.theta, model.loss());
    double nu = deductible_fraction(p.theta, utility);
    return power_insured(p.eta, p.theta, utility.alpha(), nu, model.loss());
}

std::vector<double> loss_terms(const MarketModel& model, const UtilitySpec& utility,
                               const InsuranceAccess& access) {
    std::vector<double> out(model.size());
    for (std::size_t i = 0; i < model.size(); ++i)
        out[i] = access.allows(i) ? lambda_term(i, utility, model) : upsilon_term(i, utility, model);
    return out;
}

double quadrature_oracle(const std::function<double(double, double)>& integrand,
                         const LossModel& loss, const std::vector<double>& breakpoints) {
    if (loss.is_constant()) {
        double l = loss.fraction();
        return integrand(l, 1.0 - l);
    }
    constexpr double tolerance = 1e-10;
    thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);

    std::vector<double> cuts{0.0};
    for (double b : breakpoints)
        if (b > 0.0 && b < 1.0) cuts.push_back(b);
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double total = 0.0;
    double total_error = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k];
        const double b = cuts[k + 1];
        // xc < 0: distance to a is -xc; xc > 0: distance to b is xc
        auto f = [&](double x, double xc) {
            double one_minus = xc > 0.0 ? (1.0 - b) + xc : 1.0 - x;
            return integrand(x, one_minus);
        };
        double err = 0.0;
        double l1 = 0.0;
        total += integrator.integrate(f, a, b, 1e-13, &err, &l1);
        total_error += err;
    }
    if (!std::isfinite(total) || total_error > tolerance)
        throw NonConvergent(total_error, tolerance);
    return total;
}

double quadrature_oracle(const std::function<double(double)>& integrand, const LossModel& loss,
                         const std::vector<double>& breakpoints) {
    return quadrature_oracle([&](double l, double) { return integrand(l); }, loss, breakpoints);
}

double brute_force_indemnity(const MarginalValueGrid& grid, double x, double z, double theta) {
    const auto& vp = grid.marginal;
    const std::size_t n = vp.size();
    if (n < 2 || !(grid.step > 0.0)) throw InvalidParameter("marginal value grid too small");
    if (!(z > 0.0) || !(z < x)) throw InvalidParameter("need 0 < z < x");
    const double w_end = grid.w0 + grid.step * static_cast<double>(n - 1);
    if (x - z < grid.w0 || x > w_end + 1e-12 * grid.step)
        throw InvalidParameter("wealth range not covered by the grid");
    for (std::size_t k = 1; k < n; ++k)
        if (!(vp[k] < vp[k - 1])) throw InvalidParameter("v' must be strictly decreasing");

    std::vector<double> v(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) v[k] = v[k - 1] + 0.5 * grid.step * (vp[k - 1] + vp[k]);

    auto interp = [&](const std::vector<double>& f, double w) {
        double s = (w - grid.w0) / grid.step;
        auto k = static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, static_cast<double>(n - 2)));
        double frac = s - static_cast<double>(k);
        return f[k] + frac * (f[k + 1] - f[k]);
    };

    const double price = (1.0 + theta) * interp(vp, x);
    auto objective = [&](double payout) { return interp(v, x - z + payout) - price * payout; };

    double best = 0.0;
    double best_value = objective(0.0);
    const auto steps = static_cast<std::size_t>(std::floor(z / grid.step));
    for (std::size_t k = 1; k <= steps + 1; ++k) {
        double payout = std::min(static_cast<double>(k) * grid.step, z);
        double value = objective(payout);
        if (value > best_value) {
            best_value = value;
            best = payout;
        }
    }
    return best;
}

}  // namespace rsinsure
