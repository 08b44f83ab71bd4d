#pragma once

#include <cstddef>
#include <vector>

#include "rsinsure/coefficients.hpp"
#include "rsinsure/market.hpp"

namespace rsinsure {

// Closed-form feedback policy: invest pi_star*x, consume kappa*x, and
// insure the loss in excess of nu*x where the regime has insurance access.
struct PolicyBundle {
    UtilitySpec utility = UtilitySpec::log();
    std::vector<double> pi_star;
    std::vector<double> kappa;
    std::vector<double> nu;
    std::vector<double> eta;  // loss intensity multiplier, copied from the model
    InsuranceAccess access;

    bool constrained() const noexcept { return access.is_none(); }
    bool insured(std::size_t regime) const { return access.allows(regime); }
    std::size_t size() const noexcept { return pi_star.size(); }
};

struct WealthState {
    double t = 0.0;
    double x = 1.0;
    std::size_t regime = 0;
};

struct PolicyAction {
    double stock;        // currency held in the risky asset
    double consumption;  // currency per year
    double indemnity;    // currency paid on the realized loss
};

class ValueFunction {
public:
    ValueFunction(CoefficientSet coeffs);

    const CoefficientSet& coefficients() const noexcept { return coeffs_; }
    const UtilitySpec& utility() const noexcept { return coeffs_.utility; }
    double operator()(double x, std::size_t regime) const;
    double derivative(double x, std::size_t regime) const;

private:
    CoefficientSet coeffs_;
};

double optimal_investment(const MarketModel& model, const UtilitySpec& utility, std::size_t regime);
double consumption_ratio(const CoefficientSet& coeffs, std::size_t regime);
PolicyBundle make_policy_bundle(const MarketModel& model, const CoefficientSet& coeffs);
// Scale every regime's investment and consumption ratios.
PolicyBundle perturb(const PolicyBundle& bundle, double pi_scale, double kappa_scale);

PolicyAction policy_at(const WealthState& state, const PolicyBundle& bundle, double l);
double value(const ValueFunction& vf, double x, std::size_t regime);
double premium_rate(const WealthState& state, const PolicyBundle& bundle, const MarketModel& model);

// Utility of consuming at rate c in a regime.
double utility_of(const UtilitySpec& utility, double c, std::size_t regime);

}  // namespace rsinsure
