#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rsinsure/coefficients.hpp"
#include "rsinsure/errors.hpp"
#include "rsinsure/insurance.hpp"

using namespace rsinsure;

namespace {

MarketModel set(const char* name, double delta, LossModel loss) {
    return parameter_set(name).delta(delta).loss(loss).build();
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST(LogSolver, SingleRegimeClosedForm) {
    const RegimeParams p{0.04, 0.12, 0.3, 0.2, 0.1, 0.7};
    const MarketModel m(validate_generator({{0.0}}), {p}, 0.1, LossModel::constant(0.5));
    const CoefficientSet c = solve(m, UtilitySpec::log());
    const double L = oracle::lambda_log(0.1, 0.7, LossModel::constant(0.5));
    EXPECT_NEAR(c.values[0], (p.r + oracle::gamma(p) - 0.1 + p.lambda * L) / 0.01, 1e-12);
}

TEST(LogSolver, TwoRegimeMatchesCramer) {
    for (const LossModel& loss : {LossModel::constant(0.3), LossModel::constant(0.9), LossModel::uniform()}) {
        const MarketModel m = set("I", 0.15, loss);
        const CoefficientSet c = solve(m, UtilitySpec::log());
        const auto ref = oracle::log_two_regime(
            m, {oracle::lambda_log(0.15, 0.8, loss), oracle::lambda_log(0.25, 1.0, loss)});
        EXPECT_NEAR(c.values[0], ref[0], 1e-11);
        EXPECT_NEAR(c.values[1], ref[1], 1e-11);
        EXPECT_LT(c.residual, 1e-12);
    }
}

TEST(LogSolver, InactiveInsuranceGivesConstrainedCoefficients) {
    // l = 0.1 sits below both regimes' thresholds
    const MarketModel m = set("I", 0.15, LossModel::constant(0.1));
    const CoefficientSet with = solve(m, UtilitySpec::log());
    const CoefficientSet without = solve(m, UtilitySpec::log(), InsuranceAccess::none());
    EXPECT_EQ(with.values, without.values);
    EXPECT_TRUE(without.constrained());
}

TEST(PowerSolver, SingleRegimeClosedForm) {
    const RegimeParams p{0.04, 0.12, 0.3, 0.2, 0.1, 0.7};
    const MarketModel m(validate_generator({{0.0}}), {p}, 0.3, LossModel::constant(0.5));
    for (double a : {-2.0, -0.5, 0.3, 0.6}) {
        const double L = oracle::lambda_power(0.1, 0.7, a, LossModel::constant(0.5));
        const double C = 0.3 - a * p.r - a * oracle::gamma(p) / (1.0 - a) + p.lambda * (1.0 - L);
        const CoefficientSet c = solve(m, UtilitySpec::power(a));
        // A^(1-alpha) C = (1-alpha) A^(-alpha)  =>  A = (1-alpha)/C
        EXPECT_NEAR(c.values[0], (1.0 - a) / C, 1e-10) << a;
    }
}

TEST(PowerSolver, MatchesIndependentNewton) {
    struct Case {
        const char* set;
        double delta, alpha;
        LossModel loss;
    };
    const Case cases[] = {{"I", 0.15, -0.5, LossModel::constant(0.3)}, {"I", 0.25, -1.0, LossModel::constant(0.3)},
                          {"I", 0.25, -2.0, LossModel::constant(0.1)}, {"I", 0.25, -0.5, LossModel::uniform()},
                          {"II", 0.2, 0.3, LossModel::constant(0.5)},  {"II", 0.2, 0.8, LossModel::uniform()},
                          {"I", 0.15, 0.2, LossModel::constant(0.7)}};
    for (const Case& k : cases) {
        const MarketModel m = set(k.set, k.delta, k.loss);
        const CoefficientSet c = solve(m, UtilitySpec::power(k.alpha));
        std::vector<double> L;
        for (std::size_t i = 0; i < 2; ++i)
            L.push_back(oracle::lambda_power(m.regime(i).theta, m.regime(i).eta, k.alpha, k.loss));
        const auto ref = oracle::power_newton(m, k.alpha, L);
        for (std::size_t i = 0; i < 2; ++i)
            EXPECT_NEAR(c.values[i], ref[i], 1e-9 * ref[i]) << k.set << " alpha=" << k.alpha << " regime " << i;
    }
}

TEST(PowerSolver, ThreeRegimeChain) {
    const GeneratorMatrix g = validate_generator({{-2.0, 1.5, 0.5}, {1.0, -3.0, 2.0}, {0.2, 0.3, -0.5}});
    const std::vector<RegimeParams> rp{{0.05, 0.12, 0.2, 0.1, 0.1, 0.8},
                                       {0.02, 0.08, 0.4, 0.3, 0.2, 0.9},
                                       {0.04, 0.05, 0.3, 0.2, 0.3, 1.0}};
    const MarketModel m(g, rp, 0.3, LossModel::uniform());
    for (double a : {-1.5, 0.4}) {
        const CoefficientSet c = solve(m, UtilitySpec::power(a));
        std::vector<double> L;
        for (const auto& p : rp) L.push_back(oracle::lambda_power(p.theta, p.eta, a, m.loss()));
        const auto ref = oracle::power_newton(m, a, L);
        for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(c.values[i], ref[i], 1e-9 * ref[i]);
        EXPECT_LT(max_abs(hjb_residual(m, UtilitySpec::power(a), c, 1.0)), 1e-10);
    }
}

TEST(PowerSolver, ReferenceTableCell) {
    const MarketModel m = set("I", 0.25, LossModel::constant(0.3));
    const UtilitySpec u = UtilitySpec::negative_power(-1.0);
    const CoefficientSet with = solve(m, u, InsuranceAccess::only({0}));
    const CoefficientSet without = solve(m, u, InsuranceAccess::none());
    const double paper[] = {0.8116, 0.8036};
    for (std::size_t i = 0; i < 2; ++i) {
        // v = -A^2 x^(-1) at x = 1
        const double gap = -(with.values[i] * with.values[i]) + without.values[i] * without.values[i];
        EXPECT_NEAR(gap, paper[i], 5e-4);
    }
}

TEST(PowerSolver, SmallAlphaConsumptionLimit) {
    const MarketModel m = set("II", 0.2, LossModel::constant(0.5));
    const CoefficientSet c = solve(m, UtilitySpec::positive_power(1e-4));
    EXPECT_NEAR(1.0 / c.values[0], 0.2, 1e-3);
    EXPECT_NEAR(1.0 / c.values[1], 0.2, 1e-3);
}

TEST(PowerSolver, RejectsViolatedCondition) {
    const MarketModel m = set("I", 0.15, LossModel::uniform());
    EXPECT_THROW(solve(m, UtilitySpec::negative_power(-0.5), InsuranceAccess::none()), ConditionViolated);
    EXPECT_THROW(solve(set("II", 0.2, LossModel::constant(0.5)), UtilitySpec::positive_power(0.95)), ConditionViolated);
}

TEST(SqrtSolver, SymmetricRegimesCollapse) {
    const RegimeParams p{0.05, 0.1, 0.3, 0.2, 0.2, 0.9};
    const double pi = 6.0, delta = 0.3, beta = 1.3, l = 0.1;
    const MarketModel m(GeneratorMatrix::two_regime(pi, pi), {p, p}, delta, LossModel::constant(l));
    const CoefficientSet c = solve(m, UtilitySpec::regime_sqrt({beta, beta}));
    // l = 0.1 is below the deductible, so the expectation is (1 - eta l)^(1/2)
    const double L = std::sqrt(1.0 - p.eta * l);
    const double xi = (delta + pi - p.r / 2.0 - oracle::gamma(p) + p.lambda * (1.0 - L)) / pi;
    const double expect = beta * beta / (2.0 * pi * (xi - 1.0));
    EXPECT_NEAR(c.values[0], expect, 1e-12 * expect);
    EXPECT_NEAR(c.values[1], expect, 1e-12 * expect);
}

TEST(SqrtSolver, SolutionSatisfiesUnsquaredSystem) {
    for (const LossModel& loss : {LossModel::constant(0.5), LossModel::uniform()}) {
        const MarketModel m = set("II", 0.2, loss);
        const std::vector<double> betas{1.0, 1.7};
        const CoefficientSet c = solve(m, UtilitySpec::regime_sqrt(betas));
        double xi[2], b[2];
        for (std::size_t i = 0; i < 2; ++i) {
            const auto& p = m.regime(i);
            const double pi = m.generator().exit_rate(i);
            const double L = oracle::lambda_power(p.theta, p.eta, 0.5, loss);
            xi[i] = (m.delta() + pi - p.r / 2.0 - oracle::gamma(p) + p.lambda * (1.0 - L)) / pi;
            b[i] = betas[i] * betas[i] / (2.0 * pi);
            EXPECT_GT(xi[i], 1.0);
        }
        const double g = std::sqrt(c.values[0] * c.values[1]);
        EXPECT_NEAR(xi[0] * c.values[0] - b[0], g, 1e-10);
        EXPECT_NEAR(xi[1] * c.values[1] - b[1], g, 1e-10);
        EXPECT_GE(c.values[0], b[0] / xi[0]);
        const double disc = std::pow(b[0] / xi[1] - b[1] / xi[1], 2.0) + 4.0 * xi[0] * b[0] * b[1] / xi[1];
        EXPECT_GT(disc, 0.0);
    }
}

TEST(SqrtSolver, UnitBetasMatchPositivePowerHalf) {
    const MarketModel m = set("II", 0.2, LossModel::uniform());
    const CoefficientSet s = solve(m, UtilitySpec::regime_sqrt({1.0, 1.0}));
    const CoefficientSet p = solve(m, UtilitySpec::positive_power(0.5));
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(s.values[i], p.values[i], 1e-10 * p.values[i]);
}

TEST(HjbResidual, SolvedSetsAreExact) {
    struct Case {
        const char* set;
        double delta;
        UtilitySpec u;
        LossModel loss;
    };
    const Case cases[] = {{"I", 0.15, UtilitySpec::log(), LossModel::constant(0.3)},
                          {"I", 0.15, UtilitySpec::log(), LossModel::uniform()},
                          {"I", 0.25, UtilitySpec::negative_power(-1.0), LossModel::constant(0.3)},
                          {"I", 0.25, UtilitySpec::negative_power(-0.5), LossModel::uniform()},
                          {"II", 0.2, UtilitySpec::positive_power(0.5), LossModel::constant(0.5)},
                          {"II", 0.2, UtilitySpec::positive_power(0.7), LossModel::uniform()},
                          {"II", 0.2, UtilitySpec::regime_sqrt({1.0, 1.2}), LossModel::uniform()},
                          {"II", 0.2, UtilitySpec::regime_sqrt({2.0, 0.5}), LossModel::constant(0.3)}};
    for (const Case& k : cases) {
        const MarketModel m = set(k.set, k.delta, k.loss);
        for (const InsuranceAccess& acc : {InsuranceAccess::all(), InsuranceAccess::none(), InsuranceAccess::only({1})}) {
            const CoefficientSet c = solve(m, k.u, acc);
            for (double x : {1.0, 0.3, 7.0})
                EXPECT_LT(max_abs(hjb_residual(m, k.u, c, x)), 1e-10 * std::max(1.0, std::pow(x, k.u.alpha())))
                    << k.u.name() << " " << k.loss.describe() << " " << acc.describe() << " x=" << x;
        }
    }
}

TEST(HjbResidual, PerturbedLogCoefficientLeavesLinearResidual) {
    const MarketModel m = set("I", 0.15, LossModel::constant(0.3));
    CoefficientSet c = solve(m, UtilitySpec::log());
    c.values[0] += 0.01;
    const auto r = hjb_residual(m, UtilitySpec::log(), c, 1.0);
    // residual = -(delta I - Q) dA, independent of x
    EXPECT_NEAR(std::abs(r[0]), (0.15 + 6.04) * 0.01, 1e-10);
    EXPECT_NEAR(std::abs(r[1]), 6.4 * 0.01, 1e-10);
    EXPECT_NEAR(hjb_residual(m, UtilitySpec::log(), c, 9.0)[0], r[0], 1e-10);
}

TEST(HjbResidual, PowerResidualScalesWithWealth) {
    for (const auto& [u, setname, delta] : {std::tuple{UtilitySpec::negative_power(-1.0), "I", 0.25},
                                             std::tuple{UtilitySpec::positive_power(0.4), "II", 0.2}}) {
        const MarketModel m = set(setname, delta, LossModel::constant(0.3));
        CoefficientSet c = solve(m, u);
        c.values[1] *= 1.01;
        const auto r1 = hjb_residual(m, u, c, 1.0);
        const auto r7 = hjb_residual(m, u, c, 7.0);
        for (std::size_t i = 0; i < 2; ++i) {
            EXPECT_GT(std::abs(r1[i]), 1e-6);
            EXPECT_NEAR(r7[i], r1[i] * std::pow(7.0, u.alpha()), 1e-10 * std::abs(r1[i]));
        }
    }
}
