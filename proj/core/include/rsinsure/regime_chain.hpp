#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rsinsure/rng.hpp"

namespace rsinsure {

// Validated transition-rate matrix of a continuous-time Markov chain.
class GeneratorMatrix {
public:
    GeneratorMatrix() = default;

    std::size_t size() const noexcept { return size_; }
    double rate(std::size_t i, std::size_t j) const { return rates_[i * size_ + j]; }
    // total exit rate -q_ii
    double exit_rate(std::size_t i) const { return -rate(i, i); }
    std::vector<std::vector<double>> rows() const;

    bool irreducible() const;

    static GeneratorMatrix two_regime(double pi1, double pi2);

    friend GeneratorMatrix validate_generator(const std::vector<std::vector<double>>& rates);
    friend bool operator==(const GeneratorMatrix&, const GeneratorMatrix&) = default;

private:
    std::size_t size_ = 0;
    std::vector<double> rates_;
};

GeneratorMatrix validate_generator(const std::vector<std::vector<double>>& rates);

struct RegimeSegment {
    double entry_time;
    std::size_t regime;
};

struct RegimePath {
    std::vector<RegimeSegment> segments;
    double horizon = 0.0;
    std::uint64_t seed = 0;

    // regime in force at time t (right-continuous)
    std::size_t regime_at(double t) const;
    // end of segment k (next entry time or horizon)
    double segment_end(std::size_t k) const;
    // time spent in each regime over [0, horizon]
    std::vector<double> occupancy(std::size_t regimes) const;
};

RegimePath sample_regime_path(const GeneratorMatrix& gen, std::size_t initial, double horizon,
                              std::uint64_t seed);

// Same sampler driven by a caller-owned stream (used per simulated path).
RegimePath sample_regime_path(const GeneratorMatrix& gen, std::size_t initial, double horizon,
                              CounterRng& rng);

std::vector<double> stationary_distribution(const GeneratorMatrix& gen);

}  // namespace rsinsure
