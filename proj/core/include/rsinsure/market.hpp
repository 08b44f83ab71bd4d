#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsinsure/regime_chain.hpp"

namespace rsinsure {

struct RegimeParams {
    double r = 0.0;       // risk-free rate
    double mu = 0.0;      // stock drift
    double sigma = 0.0;   // stock volatility
    double lambda = 0.0;  // loss arrival intensity
    double theta = 0.0;   // premium loading
    double eta = 0.0;     // loss intensity multiplier

    friend bool operator==(const RegimeParams&, const RegimeParams&) = default;
};

class LossModel {
public:
    enum class Kind { constant, uniform };

    static LossModel constant(double l);
    static LossModel uniform() { return LossModel(Kind::uniform, 0.0); }

    Kind kind() const noexcept { return kind_; }
    bool is_constant() const noexcept { return kind_ == Kind::constant; }
    // the constant fraction; only meaningful for Kind::constant
    double fraction() const noexcept { return l_; }
    double ess_sup() const noexcept { return kind_ == Kind::constant ? l_ : 1.0; }
    std::string describe() const;

    friend bool operator==(const LossModel&, const LossModel&) = default;

private:
    LossModel(Kind k, double l) : kind_(k), l_(l) {}
    Kind kind_;
    double l_;
};

class UtilitySpec {
public:
    enum class Kind { log, negative_power, positive_power, regime_sqrt };

    static UtilitySpec log() { return UtilitySpec(Kind::log, 0.0, {}); }
    static UtilitySpec negative_power(double alpha);
    static UtilitySpec positive_power(double alpha);
    static UtilitySpec regime_sqrt(std::vector<double> betas);
    // NegativePower for alpha<0, Log at 0, PositivePower for 0<alpha<1
    static UtilitySpec power(double alpha);

    Kind kind() const noexcept { return kind_; }
    double alpha() const noexcept { return alpha_; }
    const std::vector<double>& betas() const noexcept { return betas_; }
    bool is_log() const noexcept { return kind_ == Kind::log; }
    std::string name() const;

    friend bool operator==(const UtilitySpec&, const UtilitySpec&) = default;

private:
    UtilitySpec(Kind k, double a, std::vector<double> b) : kind_(k), alpha_(a), betas_(std::move(b)) {}
    Kind kind_;
    double alpha_;
    std::vector<double> betas_;
};

// Which regimes have access to the insurance market. The constrained
// (no-insurance) problem is InsuranceAccess::none().
class InsuranceAccess {
public:
    InsuranceAccess() = default;  // every regime
    static InsuranceAccess all() { return {}; }
    static InsuranceAccess none() {
        InsuranceAccess a;
        a.mode_ = Mode::none;
        return a;
    }
    static InsuranceAccess only(std::initializer_list<std::size_t> regimes);
    static InsuranceAccess only(const std::vector<std::size_t>& regimes);

    bool allows(std::size_t regime) const;
    bool is_all() const noexcept { return mode_ == Mode::all; }
    bool is_none() const noexcept { return mode_ == Mode::none; }
    std::string describe() const;

    friend bool operator==(const InsuranceAccess&, const InsuranceAccess&) = default;

private:
    enum class Mode { all, none, mask };
    Mode mode_ = Mode::all;
    std::vector<std::size_t> regimes_;
};

class MarketModel {
public:
    MarketModel(GeneratorMatrix generator, std::vector<RegimeParams> regimes, double delta,
                LossModel loss);

    const GeneratorMatrix& generator() const noexcept { return generator_; }
    const std::vector<RegimeParams>& regimes() const noexcept { return regimes_; }
    const RegimeParams& regime(std::size_t i) const { return regimes_.at(i); }
    std::size_t size() const noexcept { return regimes_.size(); }
    double delta() const noexcept { return delta_; }
    const LossModel& loss() const noexcept { return loss_; }

    MarketModel with_delta(double delta) const;
    MarketModel with_loss(LossModel loss) const;
    MarketModel with_regime(std::size_t i, RegimeParams p) const;

    friend bool operator==(const MarketModel&, const MarketModel&) = default;

private:
    GeneratorMatrix generator_;
    std::vector<RegimeParams> regimes_;
    double delta_;
    LossModel loss_;
};

// (mu - r)^2 / (2 sigma^2)
double gamma(const MarketModel& model, std::size_t regime);
double gamma(const RegimeParams& p);

// Published parameter sets "I" and "II". The loss model varies per
// experiment, so it must be supplied before build().
class ParameterSetBuilder {
public:
    ParameterSetBuilder(std::vector<RegimeParams> regimes, double pi1, double pi2, double delta)
        : regimes_(std::move(regimes)), pi1_(pi1), pi2_(pi2), delta_(delta) {}

    ParameterSetBuilder& delta(double d) {
        delta_ = d;
        return *this;
    }
    ParameterSetBuilder& loss(LossModel l) {
        loss_ = l;
        return *this;
    }
    double delta() const noexcept { return delta_; }
    MarketModel build() const;

private:
    std::vector<RegimeParams> regimes_;
    double pi1_, pi2_, delta_;
    std::optional<LossModel> loss_;
};

ParameterSetBuilder parameter_set(std::string_view name);

// A model whose technical condition has been checked for one utility and
// insurance access pattern; carries the loss terms used by the solvers.
struct ValidatedModel {
    MarketModel model;
    UtilitySpec utility;
    InsuranceAccess access;
    std::vector<double> loss_terms;  // Lambda where access is allowed, Upsilon otherwise
};

ValidatedModel validate_technical_condition(const MarketModel& model, const UtilitySpec& utility,
                                            const InsuranceAccess& access = {});

}  // namespace rsinsure
