#include "rsinsure/market.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rsinsure/errors.hpp"
#include "rsinsure/insurance.hpp"

namespace rsinsure {

LossModel LossModel::constant(double l) {
    if (!(l > 0.0 && l < 1.0)) throw InvalidParameter("constant loss fraction must lie in (0,1)");
    return LossModel(Kind::constant, l);
}

std::string LossModel::describe() const {
    if (kind_ == Kind::uniform) return "uniform(0,1)";
    std::ostringstream os;
    os.precision(10);
    os << "constant(" << l_ << ")";
    return os.str();
}

UtilitySpec UtilitySpec::negative_power(double alpha) {
    if (!(alpha < 0.0) || !std::isfinite(alpha))
        throw InvalidParameter("negative power utility needs alpha < 0");
    return UtilitySpec(Kind::negative_power, alpha, {});
}

UtilitySpec UtilitySpec::positive_power(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidParameter("positive power utility needs 0 < alpha < 1");
    return UtilitySpec(Kind::positive_power, alpha, {});
}

UtilitySpec UtilitySpec::regime_sqrt(std::vector<double> betas) {
    if (betas.size() != 2) throw InvalidParameter("regime sqrt utility needs exactly two betas");
    for (double b : betas)
        if (!(b > 0.0) || !std::isfinite(b)) throw InvalidParameter("betas must be positive");
    return UtilitySpec(Kind::regime_sqrt, 0.5, std::move(betas));
}

UtilitySpec UtilitySpec::power(double alpha) {
    if (alpha == 0.0) return log();
    return alpha < 0.0 ? negative_power(alpha) : positive_power(alpha);
}

std::string UtilitySpec::name() const {
    std::ostringstream os;
    os.precision(10);
    switch (kind_) {
        case Kind::log: return "log";
        case Kind::negative_power: os << "negative_power(alpha=" << alpha_ << ")"; break;
        case Kind::positive_power: os << "positive_power(alpha=" << alpha_ << ")"; break;
        case Kind::regime_sqrt: os << "regime_sqrt(beta=" << betas_[0] << "," << betas_[1] << ")"; break;
    }
    return os.str();
}

InsuranceAccess InsuranceAccess::only(const std::vector<std::size_t>& regimes) {
    InsuranceAccess a;
    a.mode_ = Mode::mask;
    a.regimes_ = regimes;
    std::sort(a.regimes_.begin(), a.regimes_.end());
    a.regimes_.erase(std::unique(a.regimes_.begin(), a.regimes_.end()), a.regimes_.end());
    if (a.regimes_.empty()) a.mode_ = Mode::none;
    return a;
}

InsuranceAccess InsuranceAccess::only(std::initializer_list<std::size_t> regimes) {
    return only(std::vector<std::size_t>(regimes));
}

bool InsuranceAccess::allows(std::size_t regime) const {
    switch (mode_) {
        case Mode::all: return true;
        case Mode::none: return false;
        case Mode::mask: return std::binary_search(regimes_.begin(), regimes_.end(), regime);
    }
    return false;
}

std::string InsuranceAccess::describe() const {
    if (mode_ == Mode::all) return "all regimes";
    if (mode_ == Mode::none) return "none";
    std::string s = "regimes ";
    for (std::size_t k = 0; k < regimes_.size(); ++k) {
        if (k) s += ",";
        s += std::to_string(regimes_[k] + 1);
    }
    return s;
}

MarketModel::MarketModel(GeneratorMatrix generator, std::vector<RegimeParams> regimes,
                         double delta, LossModel loss)
    : generator_(std::move(generator)), regimes_(std::move(regimes)), delta_(delta), loss_(loss) {
    if (regimes_.empty()) throw InvalidParameter("at least one regime is required");
    if (regimes_.size() != generator_.size())
        throw InvalidParameter("regime count " + std::to_string(regimes_.size()) +
                               " does not match generator size " +
                               std::to_string(generator_.size()));
    if (!(delta_ > 0.0) || !std::isfinite(delta_)) throw InvalidParameter("delta must be positive");
    for (std::size_t i = 0; i < regimes_.size(); ++i) {
        const RegimeParams& p = regimes_[i];
        const std::string where = " in regime " + std::to_string(i + 1);
        for (double v : {p.r, p.mu, p.sigma, p.lambda, p.theta, p.eta})
            if (!(v > 0.0) || !std::isfinite(v))
                throw InvalidParameter("all regime parameters must be positive" + where);
        if (p.eta * loss_.ess_sup() > 1.0)
            throw InvalidParameter("eta * ess sup(l) exceeds 1" + where);
    }
}

MarketModel MarketModel::with_delta(double delta) const {
    return MarketModel(generator_, regimes_, delta, loss_);
}

MarketModel MarketModel::with_loss(LossModel loss) const {
    return MarketModel(generator_, regimes_, delta_, loss);
}

MarketModel MarketModel::with_regime(std::size_t i, RegimeParams p) const {
    auto regimes = regimes_;
    regimes.at(i) = p;
    return MarketModel(generator_, std::move(regimes), delta_, loss_);
}

double gamma(const RegimeParams& p) {
    double excess = p.mu - p.r;
    return excess * excess / (2.0 * p.sigma * p.sigma);
}

double gamma(const MarketModel& model, std::size_t regime) { return gamma(model.regime(regime)); }

MarketModel ParameterSetBuilder::build() const {
    if (!loss_) throw InvalidParameter("parameter set needs a loss model before build()");
    return MarketModel(GeneratorMatrix::two_regime(pi1_, pi2_), regimes_, delta_, *loss_);
}

ParameterSetBuilder parameter_set(std::string_view name) {
    // {r, mu, sigma, lambda, theta, eta}
    if (name == "I")
        return ParameterSetBuilder({{0.08, 0.2, 0.25, 0.1, 0.15, 0.8}, {0.03, 0.15, 0.6, 0.2, 0.25, 1.0}},
                                   6.04, 6.4, 0.15);
    if (name == "II")
        return ParameterSetBuilder({{0.15, 0.2, 0.4, 0.1, 0.15, 0.8}, {0.1, 0.15, 0.6, 0.2, 0.25, 1.0}},
                                   6.04, 6.4, 0.2);
    throw UnknownParameterSet(std::string(name));
}

ValidatedModel validate_technical_condition(const MarketModel& model, const UtilitySpec& utility,
                                            const InsuranceAccess& access) {
    ValidatedModel out{model, utility, access, {}};
    const double delta = model.delta();
    const double a = utility.alpha();

    if (utility.kind() == UtilitySpec::Kind::regime_sqrt) {
        if (model.size() != 2)
            throw InvalidParameter("regime sqrt utility is defined for two regimes only");
        for (std::size_t i = 0; i < 2; ++i)
            if (!(model.generator().exit_rate(i) > 0.0))
                throw InvalidParameter("regime sqrt utility needs positive switching rates");
    }

    out.loss_terms = loss_terms(model, utility, access);

    for (std::size_t i = 0; i < model.size(); ++i) {
        const RegimeParams& p = model.regime(i);
        const double g = gamma(p);
        const double drag = p.lambda * (1.0 - out.loss_terms[i]);
        switch (utility.kind()) {
            case UtilitySpec::Kind::log: break;
            case UtilitySpec::Kind::negative_power: {
                double rhs = a * p.r + a * g / (1.0 - a) - drag;
                if (!(delta > rhs)) throw ConditionViolated(i, delta, rhs, "negative power");
                break;
            }
            case UtilitySpec::Kind::positive_power: {
                double rhs = a * p.r + a * g / (1.0 - a);
                if (!(delta > rhs)) throw ConditionViolated(i, delta, rhs, "positive power");
                break;
            }
            case UtilitySpec::Kind::regime_sqrt: {
                double base = p.r / 2.0 + g;
                double rhs = std::max(base, base - drag);
                if (!(delta > rhs)) throw ConditionViolated(i, delta, rhs, "regime sqrt");
                break;
            }
        }
    }
    return out;
}

}  // namespace rsinsure
