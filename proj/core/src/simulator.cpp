#include "rsinsure/simulator.hpp"

#include <boost/random/normal_distribution.hpp>
#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "rsinsure/errors.hpp"
#include "rsinsure/insurance.hpp"

namespace rsinsure {

namespace {

struct RegimeConst {
    double drift;     // d ln X / dt, net of premium and Ito correction
    double vol;       // sigma * pi
    double lnk;       // ln kappa
    double coef;      // U(kappa X) = coef * X^alpha for the power family
    double lambda;
    double eta;
    double nu;        // 1 disables the payout
    double ln_const;  // log multiplier for a constant loss
};

struct Prepared {
    const MarketModel* model;
    std::vector<RegimeConst> reg;
    bool log_utility;
    double alpha;
    double delta;
    double dt, sqrt_dt, disc_step;
    std::size_t steps;
    double horizon;  // steps * dt
    double y0;
    std::size_t i0;
    std::uint64_t seed;
    bool uniform_loss;
};

Prepared prepare(const MarketModel& model, const PolicyBundle& bundle, double x0, std::size_t i0,
                 const SimulationConfig& cfg) {
    if (!(x0 > 0.0)) throw InvalidParameter("x0 must be positive");
    if (i0 >= model.size()) throw InvalidParameter("initial regime out of range");
    if (!(cfg.dt > 0.0) || !(cfg.horizon > 0.0)) throw InvalidParameter("dt and horizon must be positive");
    if (bundle.size() != model.size()) throw InvalidParameter("bundle does not match the model");

    Prepared p;
    p.model = &model;
    p.log_utility = bundle.utility.is_log();
    p.alpha = bundle.utility.alpha();
    p.delta = model.delta();
    p.steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
    if (p.steps == 0) p.steps = 1;
    p.dt = cfg.dt;
    p.sqrt_dt = std::sqrt(cfg.dt);
    p.disc_step = std::exp(-p.delta * cfg.dt);
    p.horizon = static_cast<double>(p.steps) * cfg.dt;
    p.y0 = std::log(x0);
    p.i0 = i0;
    p.seed = cfg.master_seed;
    p.uniform_loss = !model.loss().is_constant();

    for (std::size_t i = 0; i < model.size(); ++i) {
        const RegimeParams& rp = model.regime(i);
        const double pi = bundle.pi_star[i];
        const double kappa = bundle.kappa[i];
        const double nu = bundle.insured(i) ? bundle.nu[i] : 1.0;
        const double premium =
            bundle.insured(i) ? rp.lambda * (1.0 + rp.theta) * expected_excess(rp.eta, nu, model.loss()) : 0.0;
        RegimeConst c{};
        c.vol = rp.sigma * pi;
        c.drift = rp.r + (rp.mu - rp.r) * pi - kappa - premium - 0.5 * c.vol * c.vol;
        c.lnk = std::log(kappa);
        c.coef = utility_of(bundle.utility, kappa, i);  // U(kappa * 1)
        c.lambda = rp.lambda;
        c.eta = rp.eta;
        c.nu = nu;
        if (model.loss().is_constant()) {
            double m = post_loss_multiplier(rp.eta, nu, model.loss().fraction());
            c.ln_const = m > 0.0 ? std::log(m) : -std::numeric_limits<double>::infinity();
        }
        p.reg.push_back(c);
    }
    return p;
}

// Simulates `lanes` paths sharing one regime/loss history; lane k uses
// Gaussian increments multiplied by signs[k].
template <bool LogU>
void run_lanes(const Prepared& P, std::uint64_t stream, int lanes, const double* signs, double* out,
               PathStats* stats) {
    CounterRng regime_rng(P.seed, stream, Stream::regime);
    CounterRng loss_time(P.seed, stream, Stream::loss_time);
    CounterRng loss_size(P.seed, stream, Stream::loss_size);
    CounterRng gauss(P.seed, stream, Stream::gaussian);
    boost::random::normal_distribution<double> normal(0.0, 1.0);

    const RegimePath path = sample_regime_path(P.model->generator(), P.i0, P.horizon, regime_rng);
    const double alpha = P.alpha;

    auto util = [&](double y, const RegimeConst& c) {
        if constexpr (LogU) return c.lnk + y;
        else return c.coef * std::exp(alpha * y);
    };

    double y[2], f_prev[2], acc[2] = {0.0, 0.0};
    double min_y = P.y0;
    std::size_t seg = 0;
    const RegimeConst* c = &P.reg[path.segments[0].regime];
    double seg_end = path.segment_end(0);
    double next_loss = loss_time.exponential(c->lambda);
    for (int k = 0; k < lanes; ++k) {
        y[k] = P.y0;
        f_prev[k] = util(y[k], *c);
    }

    double t = 0.0;
    double d_grid = 1.0;
    for (std::size_t k = 0; k < P.steps;) {
        const double tg = static_cast<double>(k + 1) * P.dt;
        const double te = std::min(seg_end, next_loss);
        if (te < tg) {
            const double h = te - t;
            const double sh = std::sqrt(h);
            const double z = normal(gauss);
            const double d = std::exp(-P.delta * te);
            for (int l = 0; l < lanes; ++l) {
                y[l] += c->drift * h + c->vol * sh * signs[l] * z;
                acc[l] += 0.5 * h * (f_prev[l] + d * util(y[l], *c));
            }
            t = te;
            if (next_loss <= seg_end) {
                const std::size_t regime = path.segments[seg].regime;
                double lm = c->ln_const;
                if (P.uniform_loss) {
                    const double u = loss_size.open_uniform();
                    const double m = c->eta * u > c->nu ? 1.0 - c->nu : (1.0 - c->eta) + c->eta * (1.0 - u);
                    if (!(m > 0.0)) throw NonpositiveWealth("post-loss wealth multiplier reached 0");
                    lm = std::log(m);
                }
                if (!std::isfinite(lm)) throw NonpositiveWealth("post-loss wealth multiplier reached 0");
                for (int l = 0; l < lanes; ++l) y[l] += lm;
                if (stats) ++stats->losses[regime];
                next_loss = t + loss_time.exponential(c->lambda);
            } else {
                ++seg;
                c = &P.reg[path.segments[seg].regime];
                seg_end = path.segment_end(seg);
                next_loss = t + loss_time.exponential(c->lambda);
            }
            for (int l = 0; l < lanes; ++l) {
                f_prev[l] = d * util(y[l], *c);
                min_y = std::min(min_y, y[l]);
            }
        } else {
            const double h = tg - t;
            const double sh = h == P.dt ? P.sqrt_dt : std::sqrt(h);
            const double z = normal(gauss);
            d_grid *= P.disc_step;
            for (int l = 0; l < lanes; ++l) {
                y[l] += c->drift * h + c->vol * sh * signs[l] * z;
                const double f = d_grid * util(y[l], *c);
                acc[l] += 0.5 * h * (f_prev[l] + f);
                f_prev[l] = f;
                min_y = std::min(min_y, y[l]);
            }
            t = tg;
            ++k;
        }
    }
    for (int l = 0; l < lanes; ++l) out[l] = acc[l];
    if (stats) {
        stats->occupancy = path.occupancy(P.model->size());
        stats->min_log_wealth = min_y;
    }
}

void run(const Prepared& P, std::uint64_t stream, int lanes, const double* signs, double* out,
         PathStats* stats) {
    if (P.log_utility) run_lanes<true>(P, stream, lanes, signs, out, stats);
    else run_lanes<false>(P, stream, lanes, signs, out, stats);
}

}  // namespace

double simulate_wealth_path(const MarketModel& model, const PolicyBundle& bundle, double x0,
                            std::size_t i0, const SimulationConfig& config, std::size_t path_index,
                            PathStats* stats) {
    const Prepared P = prepare(model, bundle, x0, i0, config);
    if (stats) {
        stats->losses.assign(model.size(), 0);
        stats->occupancy.assign(model.size(), 0.0);
    }
    double sign = 1.0;
    std::uint64_t stream = path_index;
    if (config.antithetic) {
        stream = path_index / 2;
        sign = (path_index % 2) ? -1.0 : 1.0;
    }
    double out = 0.0;
    run(P, stream, 1, &sign, &out, stats);
    return out;
}

MCEstimate estimate_value(const MarketModel& model, const PolicyBundle& bundle, double x0,
                          std::size_t i0, const SimulationConfig& config) {
    const Prepared P = prepare(model, bundle, x0, i0, config);
    const std::size_t samples = config.antithetic ? config.paths / 2 : config.paths;
    if (samples < 2) throw InvalidParameter("need at least two independent samples");
    const int lanes = config.antithetic ? 2 : 1;
    const double signs[2] = {1.0, -1.0};

    std::vector<double> value(samples);
    std::vector<double> min_y(samples);
    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, samples));

    std::vector<std::exception_ptr> errors(threads);
    auto work = [&](unsigned w) {
        try {
            PathStats stats;
            stats.losses.assign(model.size(), 0);
            for (std::size_t s = w; s < samples; s += threads) {
                double out[2];
                run(P, s, lanes, signs, out, &stats);
                value[s] = lanes == 2 ? 0.5 * (out[0] + out[1]) : out[0];
                min_y[s] = stats.min_log_wealth;
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    // Neumaier sums in index order keep the result independent of threading
    auto kahan = [](const std::vector<double>& v, auto&& f) {
        double sum = 0.0, comp = 0.0;
        for (double x : v) {
            double term = f(x);
            double t = sum + term;
            comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
            sum = t;
        }
        return sum + comp;
    };
    const double n = static_cast<double>(samples);
    const double mean = kahan(value, [](double x) { return x; }) / n;
    const double ss = kahan(value, [mean](double x) { return (x - mean) * (x - mean); });

    MCEstimate est;
    est.mean = mean;
    est.std_error = std::sqrt(ss / (n - 1.0) / n);
    est.paths_used = samples * static_cast<std::size_t>(lanes);
    est.truncation_bound = truncation_bound(model, bundle, x0, P.horizon);
    est.min_wealth = std::exp(*std::min_element(min_y.begin(), min_y.end()));
    return est;
}

double truncation_bound(const MarketModel& model, const PolicyBundle& bundle, double x0,
                        double horizon) {
    if (!(x0 > 0.0)) throw InvalidParameter("x0 must be positive");
    if (!(horizon >= 0.0)) throw InvalidParameter("horizon must be nonnegative");
    const double delta = model.delta();
    const double alpha = bundle.utility.alpha();
    const bool log_u = bundle.utility.is_log();

    double growth = -std::numeric_limits<double>::infinity();  // max exponential-moment rate
    double level = 0.0;                                        // max |U(kappa)| or |ln kappa|
    for (std::size_t i = 0; i < model.size(); ++i) {
        const RegimeParams& rp = model.regime(i);
        const double pi = bundle.pi_star[i];
        const double nu = bundle.insured(i) ? bundle.nu[i] : 1.0;
        const double premium =
            bundle.insured(i) ? rp.lambda * (1.0 + rp.theta) * expected_excess(rp.eta, nu, model.loss()) : 0.0;
        const double vol = rp.sigma * pi;
        const double drift = rp.r + (rp.mu - rp.r) * pi - bundle.kappa[i] - premium - 0.5 * vol * vol;
        const double eta = rp.eta;
        auto mult = [&](double l, double om) {
            return eta * l > nu ? 1.0 - nu : (1.0 - eta) + eta * om;
        };
        std::vector<double> cuts;
        if (nu < eta) cuts.push_back(nu / eta);
        double rate;
        try {
            if (log_u) {
                double jump = quadrature_oracle([&](double l, double om) { return std::log(mult(l, om)); },
                                                model.loss(), cuts);
                rate = std::abs(drift + rp.lambda * jump);
                level = std::max(level, std::abs(std::log(bundle.kappa[i])));
            } else {
                double moment = quadrature_oracle(
                    [&](double l, double om) { return std::pow(mult(l, om), alpha); }, model.loss(), cuts);
                rate = alpha * drift + 0.5 * alpha * alpha * vol * vol + rp.lambda * (moment - 1.0);
                level = std::max(level, std::abs(utility_of(bundle.utility, bundle.kappa[i], i)));
            }
        } catch (const NonConvergent&) {
            throw UnboundedTail("loss moment is not finite");
        }
        if (!std::isfinite(rate)) throw UnboundedTail("loss moment is not finite");
        growth = std::max(growth, rate);
    }

    if (log_u) {
        // |E ln(kappa X_t)| <= level + |ln x0| + growth * t
        const double lx = std::abs(std::log(x0));
        return std::exp(-delta * horizon) *
               ((level + lx + growth * horizon) / delta + growth / (delta * delta));
    }
    // |E U(kappa X_t)| <= level * x0^alpha * e^(growth t)
    if (!(delta > growth))
        throw UnboundedTail("discount rate does not dominate the utility growth rate");
    return level * std::pow(x0, alpha) * std::exp(-(delta - growth) * horizon) / (delta - growth);
}

double truncation_bound(const MarketModel& model, const UtilitySpec& utility, double x0,
                        double horizon) {
    const CoefficientSet coeffs = solve(model, utility);
    return truncation_bound(model, make_policy_bundle(model, coeffs), x0, horizon);
}

}  // namespace rsinsure
