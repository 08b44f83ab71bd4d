#include "rsinsure/policy.hpp"

#include <algorithm>
#include <cmath>

#include "rsinsure/errors.hpp"
#include "rsinsure/insurance.hpp"

namespace rsinsure {

ValueFunction::ValueFunction(CoefficientSet coeffs) : coeffs_(std::move(coeffs)) {}

double ValueFunction::operator()(double x, std::size_t regime) const {
    const double a = coeffs_.values.at(regime);
    const double alpha = coeffs_.utility.alpha();
    switch (coeffs_.utility.kind()) {
        case UtilitySpec::Kind::log: return std::log(coeffs_.delta * x) / coeffs_.delta + a;
        case UtilitySpec::Kind::negative_power: return -std::pow(a, 1.0 - alpha) * std::pow(x, alpha);
        case UtilitySpec::Kind::positive_power: return std::pow(a, 1.0 - alpha) * std::pow(x, alpha);
        case UtilitySpec::Kind::regime_sqrt: return std::sqrt(a * x);
    }
    return 0.0;
}

double ValueFunction::derivative(double x, std::size_t regime) const {
    const double a = coeffs_.values.at(regime);
    const double alpha = coeffs_.utility.alpha();
    switch (coeffs_.utility.kind()) {
        case UtilitySpec::Kind::log: return 1.0 / (coeffs_.delta * x);
        case UtilitySpec::Kind::negative_power:
            return -alpha * std::pow(a, 1.0 - alpha) * std::pow(x, alpha - 1.0);
        case UtilitySpec::Kind::positive_power:
            return alpha * std::pow(a, 1.0 - alpha) * std::pow(x, alpha - 1.0);
        case UtilitySpec::Kind::regime_sqrt: return 0.5 * std::sqrt(a / x);
    }
    return 0.0;
}

double optimal_investment(const MarketModel& model, const UtilitySpec& utility, std::size_t regime) {
    const RegimeParams& p = model.regime(regime);
    return (p.mu - p.r) / ((1.0 - utility.alpha()) * p.sigma * p.sigma);
}

double consumption_ratio(const CoefficientSet& coeffs, std::size_t regime) {
    const double a = coeffs.values.at(regime);
    switch (coeffs.utility.kind()) {
        case UtilitySpec::Kind::log: return coeffs.delta;
        case UtilitySpec::Kind::negative_power:
        case UtilitySpec::Kind::positive_power: return 1.0 / a;
        case UtilitySpec::Kind::regime_sqrt: {
            double b = coeffs.utility.betas().at(regime);
            return b * b / a;
        }
    }
    return 0.0;
}

PolicyBundle make_policy_bundle(const MarketModel& model, const CoefficientSet& coeffs) {
    const std::size_t n = model.size();
    if (coeffs.values.size() != n) throw InvalidParameter("coefficient count mismatch");
    PolicyBundle b{coeffs.utility, {}, {}, {}, {}, coeffs.access};
    for (std::size_t i = 0; i < n; ++i) {
        const RegimeParams& p = model.regime(i);
        b.pi_star.push_back(optimal_investment(model, coeffs.utility, i));
        b.kappa.push_back(consumption_ratio(coeffs, i));
        b.nu.push_back(deductible_fraction(p.theta, coeffs.utility));
        b.eta.push_back(p.eta);
        if (!(b.kappa.back() > 0.0)) throw InvalidParameter("consumption ratio must be positive");
        // an insured regime keeps at least 1 - nu > 0 of its wealth after any loss
        if (!(b.nu.back() < 1.0)) throw InvalidParameter("deductible fraction must be below 1");
    }
    return b;
}

PolicyBundle perturb(const PolicyBundle& bundle, double pi_scale, double kappa_scale) {
    PolicyBundle out = bundle;
    for (double& v : out.pi_star) v *= pi_scale;
    for (double& v : out.kappa) v *= kappa_scale;
    return out;
}

PolicyAction policy_at(const WealthState& state, const PolicyBundle& bundle, double l) {
    if (!(state.x > 0.0)) throw InvalidParameter("wealth must be positive");
    const std::size_t i = state.regime;
    double indemnity = 0.0;
    if (bundle.insured(i)) indemnity = std::max(bundle.eta.at(i) * l - bundle.nu.at(i), 0.0) * state.x;
    return {bundle.pi_star.at(i) * state.x, bundle.kappa.at(i) * state.x, indemnity};
}

double value(const ValueFunction& vf, double x, std::size_t regime) {
    if (!(x > 0.0)) throw InvalidParameter("wealth must be positive");
    return vf(x, regime);
}

double premium_rate(const WealthState& state, const PolicyBundle& bundle, const MarketModel& model) {
    if (!(state.x > 0.0)) throw InvalidParameter("wealth must be positive");
    const std::size_t i = state.regime;
    if (!bundle.insured(i)) return 0.0;
    const RegimeParams& p = model.regime(i);
    return p.lambda * (1.0 + p.theta) * expected_excess(p.eta, bundle.nu.at(i), model.loss()) * state.x;
}

double utility_of(const UtilitySpec& utility, double c, std::size_t regime) {
    const double a = utility.alpha();
    switch (utility.kind()) {
        case UtilitySpec::Kind::log: return std::log(c);
        case UtilitySpec::Kind::negative_power: return -std::pow(c, a);
        case UtilitySpec::Kind::positive_power: return std::pow(c, a);
        case UtilitySpec::Kind::regime_sqrt: return utility.betas().at(regime) * std::sqrt(c);
    }
    return 0.0;
}

}  // namespace rsinsure
