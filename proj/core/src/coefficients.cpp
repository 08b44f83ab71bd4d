#include "rsinsure/coefficients.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "rsinsure/errors.hpp"
#include "rsinsure/insurance.hpp"

namespace rsinsure {

namespace {

void check_expectations(const MarketModel& model, const std::vector<double>& e) {
    if (e.size() != model.size())
        throw InvalidParameter("need one loss expectation per regime");
    for (double v : e)
        if (!std::isfinite(v)) throw InvalidParameter("loss expectation is not finite");
}

}  // namespace

CoefficientSet solve_log(const MarketModel& model, const std::vector<double>& expectations) {
    check_expectations(model, expectations);
    const std::size_t n = model.size();
    const double delta = model.delta();
    Eigen::MatrixXd m(n, n);
    Eigen::VectorXd rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const RegimeParams& p = model.regime(i);
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = (i == j ? delta : 0.0) - model.generator().rate(i, j);
        rhs(i) = (p.r + gamma(p) + p.lambda * expectations[i] - delta) / delta;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) throw SingularSystem("delta I - Q is singular");
    Eigen::VectorXd a = lu.solve(rhs);
    a += lu.solve(rhs - m * a);

    CoefficientSet out{UtilitySpec::log(), std::vector<double>(a.data(), a.data() + n), {}, delta,
                       (m * a - rhs).lpNorm<Eigen::Infinity>(), 1};
    if (!std::isfinite(out.residual)) throw SingularSystem("log system produced non-finite values");
    return out;
}

namespace {

// Positive root of c B - k B^p = s, with f increasing through its positive root.
double scalar_power_root(double c, double k, double p, double s, double guess) {
    auto f = [&](double b) { return c * b - k * std::pow(b, p) - s; };
    auto df = [&](double b) { return c - k * p * std::pow(b, p - 1.0); };

    double b = guess > 0.0 && std::isfinite(guess) ? guess : 1.0;
    double lo = b, hi = b;
    for (int k2 = 0; f(lo) >= 0.0; ++k2) {
        lo *= 0.5;
        if (k2 > 2000) throw NoConvergence(k2, f(lo));
    }
    for (int k2 = 0; f(hi) <= 0.0; ++k2) {
        hi *= 2.0;
        if (k2 > 2000) throw NoConvergence(k2, f(hi));
    }
    b = std::clamp(b, lo, hi);
    for (int it = 0; it < 200; ++it) {
        double fb = f(b);
        if (fb == 0.0) return b;
        if (fb < 0.0) lo = b; else hi = b;
        double step = fb / df(b);
        double next = b - step;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::abs(next - b) <= 1e-16 * b || hi - lo <= 4e-16 * hi) return next;
        b = next;
    }
    return b;
}

}  // namespace

CoefficientSet solve_power(const MarketModel& model, double alpha,
                           const std::vector<double>& expectations,
                           const PowerSolverOptions& options) {
    check_expectations(model, expectations);
    if (!(alpha < 1.0) || alpha == 0.0 || !std::isfinite(alpha))
        throw InvalidParameter("power solver needs alpha < 1, alpha != 0");
    const std::size_t n = model.size();
    const double delta = model.delta();
    const auto& q = model.generator();
    const double k = 1.0 - alpha;
    const double p = -alpha / k;  // A^(-alpha) = B^p

    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) {
        const RegimeParams& rp = model.regime(i);
        const double g = gamma(rp);
        c[i] = delta - alpha * rp.r - alpha * g / k + rp.lambda * (1.0 - expectations[i]);
        if (alpha > 0.0) {
            double rhs = alpha * rp.r + alpha * g / k;
            if (!(delta > rhs)) throw ConditionViolated(i, delta, rhs, "positive power");
        }
        if (!(c[i] > 0.0))
            throw ConditionViolated(i, delta, delta - c[i], alpha < 0.0 ? "negative power" : "positive power");
    }

    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        double a0 = options.initial ? options.initial->at(i) : k / c[i];
        if (!(a0 > 0.0)) throw InvalidParameter("initial coefficients must be positive");
        b[i] = std::pow(a0, k);
    }

    auto residual = [&]() {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double coupling = 0.0;
            for (std::size_t j = 0; j < n; ++j) coupling += q.rate(i, j) * b[j];
            worst = std::max(worst, std::abs(c[i] * b[i] - k * std::pow(b[i], p) - coupling));
        }
        return worst;
    };

    double res = residual();
    double omega = 0.5;
    std::size_t it = 0;
    while (res > options.target && it < options.max_iterations) {
        if (res < 1e-4) omega = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) s += q.rate(i, j) * b[j];
            double target = scalar_power_root(c[i] - q.rate(i, i), k, p, s, b[i]);
            b[i] = (1.0 - omega) * b[i] + omega * target;
        }
        ++it;
        double next = residual();
        if (omega == 1.0 && next >= res && next <= options.accept) {
            res = next;
            break;  // stalled at rounding level
        }
        res = next;
    }
    if (!(res <= options.accept)) throw NoConvergence(it, res);

    CoefficientSet out{UtilitySpec::power(alpha), std::vector<double>(n), {}, delta, res, it};
    for (std::size_t i = 0; i < n; ++i) out.values[i] = std::pow(b[i], 1.0 / k);
    return out;
}

CoefficientSet solve_sqrt_two_regime(const MarketModel& model, const std::vector<double>& betas,
                                     const std::vector<double>& expectations) {
    if (model.size() != 2) throw InvalidParameter("sqrt solver needs exactly two regimes");
    UtilitySpec utility = UtilitySpec::regime_sqrt(betas);
    check_expectations(model, expectations);
    const double delta = model.delta();

    double xi[2], bnd[2], pi[2];
    for (std::size_t i = 0; i < 2; ++i) {
        const RegimeParams& p = model.regime(i);
        pi[i] = model.generator().exit_rate(i);
        if (!(pi[i] > 0.0)) throw InvalidParameter("sqrt solver needs positive switching rates");
        xi[i] = (delta + pi[i] - p.r / 2.0 - gamma(p) + p.lambda * (1.0 - expectations[i])) / pi[i];
        bnd[i] = betas[i] * betas[i] / (2.0 * pi[i]);
    }

    // (xi1/xi2 - xi1^2) A1^2 + ((b2-b1)/xi2 + 2 xi1 b1) A1 - b1^2 = 0
    const double qa = xi[0] / xi[1] - xi[0] * xi[0];
    const double qb = (bnd[1] - bnd[0]) / xi[1] + 2.0 * xi[0] * bnd[0];
    const double qc = -bnd[0] * bnd[0];
    std::vector<double> roots;
    if (std::abs(qa) <= 1e-14 * (std::abs(qb) + std::abs(qc))) {
        if (qb == 0.0) throw NoRealRoot("degenerate sqrt system");
        roots.push_back(-qc / qb);
    } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (!(disc > 0.0)) throw NoRealRoot("sqrt quadratic has no real root");
        const double t = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
        roots.push_back(t / qa);
        roots.push_back(qc / t);
    }

    struct Candidate {
        double a1, a2, residual;
    };
    std::vector<Candidate> ok;
    for (double a1 : roots) {
        if (!(a1 > 0.0)) continue;
        double a2 = (xi[0] * a1 - bnd[0] + bnd[1]) / xi[1];
        if (!(a2 > 0.0)) continue;
        double geo = std::sqrt(a1 * a2);
        double r1 = xi[0] * a1 - bnd[0] - geo;
        double r2 = xi[1] * a2 - bnd[1] - geo;
        // admissibility: A_i >= beta_i^2 / (2 Pi_i xi_i), i.e. xi_i A_i - b_i >= 0
        double slack = 1e-12 * std::max({1.0, xi[0] * a1, xi[1] * a2});
        if (xi[0] * a1 - bnd[0] < -slack || xi[1] * a2 - bnd[1] < -slack) continue;
        double res = std::max(std::abs(r1), std::abs(r2));
        if (res > 1e-10) continue;
        ok.push_back({a1, a2, res});
    }
    if (ok.empty()) throw NoRealRoot("no admissible root of the sqrt system");
    if (ok.size() > 1) throw RootSelectionAmbiguous(ok[0].a1, ok[1].a1);

    return CoefficientSet{utility, {ok[0].a1, ok[0].a2}, {}, delta, ok[0].residual, 1};
}

CoefficientSet solve_sqrt_two_regime(const MarketModel& model, const std::vector<double>& betas) {
    return solve_sqrt_two_regime(model, betas, loss_terms(model, UtilitySpec::regime_sqrt(betas)));
}

CoefficientSet solve(const ValidatedModel& v) {
    CoefficientSet out;
    switch (v.utility.kind()) {
        case UtilitySpec::Kind::log: out = solve_log(v.model, v.loss_terms); break;
        case UtilitySpec::Kind::negative_power:
        case UtilitySpec::Kind::positive_power:
            out = solve_power(v.model, v.utility.alpha(), v.loss_terms);
            break;
        case UtilitySpec::Kind::regime_sqrt:
            out = solve_sqrt_two_regime(v.model, v.utility.betas(), v.loss_terms);
            break;
    }
    out.utility = v.utility;
    out.access = v.access;
    return out;
}

CoefficientSet solve(const MarketModel& model, const UtilitySpec& utility,
                     const InsuranceAccess& access) {
    return solve(validate_technical_condition(model, utility, access));
}

namespace {

// Candidate value function in one regime, with the marginal value and its inverse.
struct Candidate {
    UtilitySpec::Kind kind;
    double alpha, scale, a, delta;  // v = scale * w^alpha (power) or ln(delta w)/delta + a (log)

    double v(double w) const {
        return kind == UtilitySpec::Kind::log ? std::log(delta * w) / delta + a
                                              : scale * std::pow(w, alpha);
    }
    double dv(double w) const {
        return kind == UtilitySpec::Kind::log ? 1.0 / (delta * w)
                                              : scale * alpha * std::pow(w, alpha - 1.0);
    }
    double d2v(double w) const {
        return kind == UtilitySpec::Kind::log
                   ? -1.0 / (delta * w * w)
                   : scale * alpha * (alpha - 1.0) * std::pow(w, alpha - 2.0);
    }
    double dv_inverse(double y) const {
        return kind == UtilitySpec::Kind::log ? 1.0 / (delta * y)
                                              : std::pow(y / (scale * alpha), 1.0 / (alpha - 1.0));
    }
};

}  // namespace

std::vector<double> hjb_residual(const MarketModel& model, const UtilitySpec& utility,
                                 const CoefficientSet& coeffs, double x) {
    if (!(x > 0.0)) throw InvalidParameter("hjb_residual needs x > 0");
    const std::size_t n = model.size();
    if (coeffs.values.size() != n) throw InvalidParameter("coefficient count mismatch");
    const double delta = model.delta();
    const double alpha = utility.alpha();

    std::vector<Candidate> cand(n);
    for (std::size_t i = 0; i < n; ++i) {
        double a = coeffs.values[i];
        switch (utility.kind()) {
            case UtilitySpec::Kind::log: cand[i] = {utility.kind(), 0.0, 0.0, a, delta}; break;
            case UtilitySpec::Kind::negative_power:
                cand[i] = {utility.kind(), alpha, -std::pow(a, 1.0 - alpha), a, delta};
                break;
            case UtilitySpec::Kind::positive_power:
            case UtilitySpec::Kind::regime_sqrt:
                cand[i] = {utility.kind(), alpha, std::pow(a, 1.0 - alpha), a, delta};
                break;
        }
    }

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const RegimeParams& p = model.regime(i);
        const Candidate& f = cand[i];
        const double v = f.v(x), v1 = f.dv(x), v2 = f.d2v(x);

        // investment: maximizer of (mu-r) pi x v' + sigma^2 pi^2 x^2 v''/2
        const double pi_hat = -(p.mu - p.r) * v1 / (p.sigma * p.sigma * x * v2);
        const double invest = (p.mu - p.r) * pi_hat * x * v1 +
                              0.5 * p.sigma * p.sigma * pi_hat * pi_hat * x * x * v2;

        // consumption: U'(c) = v'
        double c_hat = 0.0, u = 0.0;
        switch (utility.kind()) {
            case UtilitySpec::Kind::log:
                c_hat = 1.0 / v1;
                u = std::log(c_hat);
                break;
            case UtilitySpec::Kind::negative_power:
                c_hat = std::pow(v1 / (-alpha), 1.0 / (alpha - 1.0));
                u = -std::pow(c_hat, alpha);
                break;
            case UtilitySpec::Kind::positive_power:
                c_hat = std::pow(v1 / alpha, 1.0 / (alpha - 1.0));
                u = std::pow(c_hat, alpha);
                break;
            case UtilitySpec::Kind::regime_sqrt: {
                double beta = utility.betas()[i];
                c_hat = std::pow(beta / (2.0 * v1), 2.0);
                u = beta * std::sqrt(c_hat);
                break;
            }
        }
        const double consume = u - c_hat * v1;

        // insurance: post-loss wealth where v' equals (1+theta) v'(x)
        double nu = 1.0;
        if (coeffs.access.allows(i)) nu = 1.0 - f.dv_inverse((1.0 + p.theta) * v1) / x;
        const double eta = p.eta;
        auto wealth_after = [&](double l, double one_minus_l) {
            if (eta * l > nu) return x * (1.0 - nu);
            return x * ((1.0 - eta) + eta * one_minus_l);
        };
        std::vector<double> cuts;
        if (nu > 0.0 && nu < eta) cuts.push_back(nu / eta);
        // the oracle tolerance is absolute, so integrate v on the scale of v(x)
        const double scale = std::max(1.0, std::abs(v));
        const double ev = scale * quadrature_oracle(
            [&](double l, double om) { return f.v(wealth_after(l, om)) / scale; }, model.loss(), cuts);
        const double ei = quadrature_oracle(
            [&](double l, double) { return std::max(eta * l - nu, 0.0) * x; }, model.loss(), cuts);

        const double lhs = invest + consume + p.r * x * v1 + p.lambda * ev -
                           p.lambda * (1.0 + p.theta) * ei * v1;
        double switching = 0.0;
        for (std::size_t j = 0; j < n; ++j) switching += model.generator().rate(i, j) * cand[j].v(x);
        const double rhs = (delta + p.lambda) * v - switching;
        out[i] = lhs - rhs;
    }
    return out;
}

}  // namespace rsinsure
