#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rsinsure/market.hpp"

namespace rsinsure {

// Solved value-function constants per regime: A for log, and the base A
// of A^(1-alpha) (or (A x)^(1/2) for the sqrt utility) otherwise.
struct CoefficientSet {
    UtilitySpec utility = UtilitySpec::log();
    std::vector<double> values;
    InsuranceAccess access;
    double delta = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;

    bool constrained() const noexcept { return access.is_none(); }
};

// (delta I - Q) A = (r + gamma + lambda * expectations - delta) / delta
CoefficientSet solve_log(const MarketModel& model, const std::vector<double>& expectations);

struct PowerSolverOptions {
    std::optional<std::vector<double>> initial;  // starting A; default is the decoupled solution
    std::size_t max_iterations = 100000;
    double target = 1e-12;
    double accept = 1e-10;
};

// C_i A_i^(1-alpha) - (1-alpha) A_i^(-alpha) = sum_j q_ij A_j^(1-alpha)
CoefficientSet solve_power(const MarketModel& model, double alpha,
                           const std::vector<double>& expectations,
                           const PowerSolverOptions& options = {});

// Two-regime sqrt utility; expectations default to the insured sqrt terms.
CoefficientSet solve_sqrt_two_regime(const MarketModel& model, const std::vector<double>& betas,
                                     const std::vector<double>& expectations);
CoefficientSet solve_sqrt_two_regime(const MarketModel& model, const std::vector<double>& betas);

// Validates, computes the loss terms and dispatches on the utility.
CoefficientSet solve(const ValidatedModel& validated);
CoefficientSet solve(const MarketModel& model, const UtilitySpec& utility,
                     const InsuranceAccess& access = {});

// Left minus right side of the HJB equation per regime, with the
// maximizations replaced by first-order maximizers computed from the
// derivatives of the candidate value function, and the loss expectation
// evaluated by quadrature of the value function itself.
std::vector<double> hjb_residual(const MarketModel& model, const UtilitySpec& utility,
                                 const CoefficientSet& coeffs, double x);

}  // namespace rsinsure
