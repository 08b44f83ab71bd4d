#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rsinsure/market.hpp"
#include "rsinsure/policy.hpp"

namespace rsinsure {

struct SimulationConfig {
    std::size_t paths = 100000;
    double horizon = 200.0;
    double dt = 1.0 / 500.0;
    std::uint64_t master_seed = 20240611;
    bool antithetic = true;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t paths_used = 0;
    double truncation_bound = 0.0;
    double min_wealth = 0.0;  // smallest wealth seen on any path
};

// Per-path diagnostics for the statistical self-checks.
struct PathStats {
    std::vector<std::size_t> losses;    // loss events per regime
    std::vector<double> occupancy;      // time spent per regime
    double min_log_wealth = 0.0;
};

// Discounted utility of consumption along one simulated path over
// [0, horizon]. With antithetic pairing, paths 2k and 2k+1 share their
// regime and loss histories and use opposite Gaussian increments.
double simulate_wealth_path(const MarketModel& model, const PolicyBundle& bundle, double x0,
                            std::size_t i0, const SimulationConfig& config, std::size_t path_index,
                            PathStats* stats = nullptr);

MCEstimate estimate_value(const MarketModel& model, const PolicyBundle& bundle, double x0,
                          std::size_t i0, const SimulationConfig& config);

// Bound on |E int_T^inf e^(-delta t) U(c_t) dt| under the bundle, from the
// exact regime-wise exponential moment of the log-wealth process.
double truncation_bound(const MarketModel& model, const PolicyBundle& bundle, double x0,
                        double horizon);
double truncation_bound(const MarketModel& model, const UtilitySpec& utility, double x0,
                        double horizon);

}  // namespace rsinsure
