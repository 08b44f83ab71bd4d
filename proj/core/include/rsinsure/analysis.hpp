#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rsinsure/coefficients.hpp"
#include "rsinsure/csv.hpp"
#include "rsinsure/market.hpp"

namespace rsinsure {

// Value with insurance access minus value without, at wealth x.
struct ValueGapReport {
    std::vector<double> gap;
    std::vector<double> insured;      // v(x, i)
    std::vector<double> constrained;  // v1(x, i)
    double x = 1.0;
    UtilitySpec utility = UtilitySpec::log();
    InsuranceAccess access;
    std::string loss;
    double delta = 0.0;
    std::vector<RegimeParams> params;
};

ValueGapReport value_gap(const MarketModel& model, const UtilitySpec& utility, double x,
                         const InsuranceAccess& access = {});

// Two-regime closed form for the log gap
// [Pi_i lambda_j D_j + lambda_i (delta + Pi_j) D_i] / [delta^2 (delta + Pi_1 + Pi_2)]
// with D = Lambda - Upsilon.
std::vector<double> log_gap_closed_form(const MarketModel& model, const InsuranceAccess& access = {});

// |A - a| / |a| for log utility at x = 1/delta.
std::vector<double> increase_ratio(const MarketModel& model, const InsuranceAccess& access = {});

// Consumption-to-wealth ratios per regime for each (alpha, l), with the
// base model's loss replaced by the constant l; alpha < 0 uses negative
// power, alpha > 0 positive power utility.
CsvTable consumption_curves(const MarketModel& base, const std::vector<double>& alpha_grid,
                            const std::vector<double>& l_values);

struct SensitivityPoint {
    double theta, alpha;
    bool active;
    double indemnity, d_theta, d2_theta, d_alpha, d2_alpha, alpha_tilde;
};

// Closed-form indemnity derivatives at x = 1 for loss intensity eta*l.
// The derivatives are those of the active branch eta*l - nu; points where
// the deductible exceeds the loss carry active = false and indemnity 0.
SensitivityPoint indemnity_sensitivity(double theta, double alpha, double eta, double l);

// Root of d2I/dalpha2 located by bisection on the closed-form derivative.
double alpha_inflection(double theta);

// Rows over theta_grid x alpha_grid for one regime's eta and the model's
// constant loss; inactive points are kept and flagged.
CsvTable insurance_sensitivity(const std::vector<double>& theta_grid,
                               const std::vector<double>& alpha_grid, const MarketModel& model,
                               std::size_t regime);

struct TableRow {
    double alpha, l;
    double gap_regime1, gap_regime2;        // insurance available in regime 1 only
    double full_gap_regime1, full_gap_regime2;  // insurance available in both regimes
};

// Reference market for the table: parameter set I with delta = 0.25.
std::vector<TableRow> reproduce_table1();
CsvTable table1_csv(const std::vector<TableRow>& rows);

// Lambda - Upsilon for log utility and uniform loss.
CsvTable lambda_upsilon_curve(const std::vector<double>& theta_values,
                              const std::vector<double>& eta_grid);
double lambda_upsilon_difference(double theta, double eta);

// alpha at which nu_1/eta_1 = nu_2/eta_2 under positive power utility.
double regime_ordering_boundary(const MarketModel& model);

struct PowerGapRow {
    double alpha;
    std::string choice;  // "l_M" or "l_m"
    double l;
    double gap_regime1, gap_regime2;
    bool active_regime1, active_regime2;
};

// Two-regime positive power gaps at x=1 for two constant losses per alpha:
// l_M midway between the regime thresholds, l_m just below regime 2's.
std::vector<PowerGapRow> power_gap_curves(const MarketModel& base,
                                          const std::vector<double>& alpha_grid);
CsvTable power_gap_csv(const std::vector<PowerGapRow>& rows);

// Grids used for the figure data.
namespace grids {
std::vector<double> figure1_alpha();
std::vector<double> figure2_alpha();
std::vector<double> consumption_l();
std::vector<double> figure3_l();
std::vector<double> figure4_theta();
std::vector<double> figure4_eta(double theta);
std::vector<double> figure4_common_eta();
std::vector<double> figure5_alpha();
std::vector<double> sensitivity_theta();
std::vector<double> sensitivity_alpha();
}  // namespace grids

CsvTable increase_ratio_curve(const std::vector<double>& l_grid);

// Writes every figure's CSV into dir; returns the file names written.
std::vector<std::string> reproduce_figures(const std::string& dir);

}  // namespace rsinsure
