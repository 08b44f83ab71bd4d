#include "rsinsure/regime_chain.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "rsinsure/errors.hpp"

namespace rsinsure {

std::vector<std::vector<double>> GeneratorMatrix::rows() const {
    std::vector<std::vector<double>> out(size_, std::vector<double>(size_));
    for (std::size_t i = 0; i < size_; ++i)
        for (std::size_t j = 0; j < size_; ++j) out[i][j] = rate(i, j);
    return out;
}

bool GeneratorMatrix::irreducible() const {
    // every state reachable from 0 and 0 reachable from every state
    auto reach = [this](bool transpose) {
        std::vector<bool> seen(size_, false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < size_; ++j) {
                double q = transpose ? rate(j, i) : rate(i, j);
                if (j != i && q > 0.0 && !seen[j]) {
                    seen[j] = true;
                    stack.push_back(j);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
    };
    return size_ > 0 && reach(false) && reach(true);
}

GeneratorMatrix GeneratorMatrix::two_regime(double pi1, double pi2) {
    return validate_generator({{-pi1, pi1}, {pi2, -pi2}});
}

GeneratorMatrix validate_generator(const std::vector<std::vector<double>>& rates) {
    const std::size_t n = rates.size();
    if (n == 0) throw InvalidGenerator(0, "empty matrix");
    GeneratorMatrix g;
    g.size_ = n;
    g.rates_.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rates[i].size() != n) throw InvalidGenerator(i, "matrix is not square");
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double q = rates[i][j];
            if (!std::isfinite(q)) throw InvalidGenerator(i, "non-finite entry");
            if (i != j && q < 0.0) throw InvalidGenerator(i, "negative off-diagonal rate");
            if (i == j && q > 0.0) throw InvalidGenerator(i, "positive diagonal entry");
            sum += q;
            g.rates_.push_back(q);
        }
        if (std::abs(sum) > 1e-12)
            throw InvalidGenerator(i, "row sums to " + std::to_string(sum) + ", not 0");
    }
    return g;
}

std::size_t RegimePath::regime_at(double t) const {
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double v, const RegimeSegment& s) { return v < s.entry_time; });
    if (it == segments.begin()) return segments.front().regime;
    return std::prev(it)->regime;
}

double RegimePath::segment_end(std::size_t k) const {
    return k + 1 < segments.size() ? segments[k + 1].entry_time : horizon;
}

std::vector<double> RegimePath::occupancy(std::size_t regimes) const {
    std::vector<double> occ(regimes, 0.0);
    for (std::size_t k = 0; k < segments.size(); ++k)
        occ[segments[k].regime] += segment_end(k) - segments[k].entry_time;
    return occ;
}

RegimePath sample_regime_path(const GeneratorMatrix& gen, std::size_t initial, double horizon,
                              CounterRng& rng) {
    if (!(horizon > 0.0)) throw InvalidParameter("regime path horizon must be positive");
    if (initial >= gen.size()) throw InvalidParameter("initial regime out of range");
    RegimePath path;
    path.horizon = horizon;
    std::size_t i = initial;
    double t = 0.0;
    path.segments.push_back({0.0, i});
    while (true) {
        double exit = gen.exit_rate(i);
        t += rng.exponential(exit);
        if (!(t < horizon)) break;
        // choose the destination proportionally to q_ij
        double u = rng.uniform() * exit;
        std::size_t next = i;
        double acc = 0.0;
        for (std::size_t j = 0; j < gen.size(); ++j) {
            if (j == i) continue;
            double q = gen.rate(i, j);
            if (q <= 0.0) continue;
            acc += q;
            next = j;
            if (u < acc) break;
        }
        i = next;
        path.segments.push_back({t, i});
    }
    return path;
}

RegimePath sample_regime_path(const GeneratorMatrix& gen, std::size_t initial, double horizon,
                              std::uint64_t seed) {
    CounterRng rng(seed, 0, Stream::regime);
    RegimePath path = sample_regime_path(gen, initial, horizon, rng);
    path.seed = seed;
    return path;
}

std::vector<double> stationary_distribution(const GeneratorMatrix& gen) {
    const std::size_t n = gen.size();
    if (n == 1) return {1.0};
    if (!gen.irreducible()) throw SingularChain("generator is not irreducible");

    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(j, i) = gen.rate(i, j);
    m.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (lu.rank() < static_cast<Eigen::Index>(n))
        throw SingularChain("stationary system is singular");
    Eigen::VectorXd p = lu.solve(rhs);
    p += lu.solve(rhs - m * p);  // one refinement step

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::max(p(i), 0.0);
    return out;
}

}  // namespace rsinsure
