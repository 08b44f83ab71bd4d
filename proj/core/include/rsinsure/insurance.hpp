#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rsinsure/market.hpp"

namespace rsinsure {

// Deductible as a fraction of wealth: theta/(1+theta) for log,
// 1-(1+theta)^(-1/(1-alpha)) for the power family (alpha=1/2 for sqrt).
double deductible_fraction(double theta, const UtilitySpec& utility);
double deductible_fraction(double theta, double alpha);

// Wealth multiplier after a loss l under a deductible nu (nu >= eta*l means no payout).
double post_loss_multiplier(double eta, double nu, double l);

// (eta*l - nu)^+ * x
double optimal_indemnity(double x, std::size_t regime, double l, const UtilitySpec& utility,
                         const MarketModel& model);

// eta*l > nu for a realized loss fraction l
bool buy_insurance(std::size_t regime, double l, const UtilitySpec& utility,
                   const MarketModel& model);

// Insurance pays with positive probability under the model's loss law.
bool insurance_active(std::size_t regime, const UtilitySpec& utility, const MarketModel& model);

// E[(eta*l - nu)^+]
double expected_excess(double eta, double nu, const LossModel& loss);

// Insured objective term (Lambda family) and uninsured term (Upsilon family).
double lambda_term(std::size_t regime, const UtilitySpec& utility, const MarketModel& model);
double upsilon_term(std::size_t regime, const UtilitySpec& utility, const MarketModel& model);

// Lambda where the regime has insurance access, Upsilon elsewhere.
std::vector<double> loss_terms(const MarketModel& model, const UtilitySpec& utility,
                               const InsuranceAccess& access = {});

// Expectation over the loss law. Uniform losses are integrated with
// tanh-sinh quadrature to absolute tolerance 1e-10, split at the given
// interior breakpoints; a constant loss evaluates the integrand once.
// The two-argument form also receives 1-l computed without cancellation,
// which matters for integrands singular at l=1.
double quadrature_oracle(const std::function<double(double)>& integrand, const LossModel& loss,
                         const std::vector<double>& breakpoints = {});
double quadrature_oracle(const std::function<double(double, double)>& integrand,
                         const LossModel& loss, const std::vector<double>& breakpoints = {});

// v' sampled at w0 + k*step, k = 0..n-1
struct MarginalValueGrid {
    double w0 = 0.0;
    double step = 0.0;
    std::vector<double> marginal;
};

// Grid search over payouts I in [0, z] in multiples of the grid step,
// maximizing v(x - z + I) - (1+theta) I v'(x), with v rebuilt from v' by
// the trapezoid rule. x and x - z must lie on the grid's range.
double brute_force_indemnity(const MarginalValueGrid& grid, double x, double z, double theta);

}  // namespace rsinsure
