#include "rsinsure/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rsinsure/errors.hpp"

namespace rsinsure {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(where.empty() ? key : where + "." + key, "missing");
    return *it;
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    return v.get<double>();
}

double positive(const json& obj, const std::string& key, const std::string& where) {
    double v = number(require(obj, key, where), where + "." + key);
    if (!(v > 0.0)) throw ConfigError(where + "." + key, "must be positive");
    return v;
}

const json& object(const json& v, const std::string& path) {
    if (!v.is_object()) throw ConfigError(path, "expected an object");
    return v;
}

const json& array(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "expected an array");
    return v;
}

}  // namespace

ModelConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
    }
    object(root, "<document>");
    reject_unknown(root, "", {"regimes", "generator", "delta", "loss", "utility"});

    std::vector<RegimeParams> regimes;
    const json& jr = array(require(root, "regimes", ""), "regimes");
    for (std::size_t i = 0; i < jr.size(); ++i) {
        const std::string where = "regimes[" + std::to_string(i) + "]";
        const json& o = object(jr[i], where);
        reject_unknown(o, where, {"r", "mu", "sigma", "lambda", "theta", "eta"});
        RegimeParams p;
        p.r = positive(o, "r", where);
        p.mu = positive(o, "mu", where);
        p.sigma = positive(o, "sigma", where);
        p.lambda = positive(o, "lambda", where);
        p.theta = positive(o, "theta", where);
        p.eta = positive(o, "eta", where);
        regimes.push_back(p);
    }

    std::vector<std::vector<double>> rates;
    const json& jg = array(require(root, "generator", ""), "generator");
    for (std::size_t i = 0; i < jg.size(); ++i) {
        const std::string where = "generator[" + std::to_string(i) + "]";
        const json& row = array(jg[i], where);
        std::vector<double> r;
        for (std::size_t j = 0; j < row.size(); ++j)
            r.push_back(number(row[j], where + "[" + std::to_string(j) + "]"));
        rates.push_back(std::move(r));
    }
    GeneratorMatrix gen;
    try {
        gen = validate_generator(rates);
    } catch (const InvalidGenerator& e) {
        throw ConfigError("generator[" + std::to_string(e.row()) + "]", e.reason());
    }

    double delta = number(require(root, "delta", ""), "delta");
    if (!(delta > 0.0)) throw ConfigError("delta", "must be positive");

    const json& jl = object(require(root, "loss", ""), "loss");
    const json& lkind = require(jl, "kind", "loss");
    if (!lkind.is_string()) throw ConfigError("loss.kind", "expected a string");
    LossModel loss = LossModel::uniform();
    if (lkind == "constant") {
        reject_unknown(jl, "loss", {"kind", "l"});
        double l = number(require(jl, "l", "loss"), "loss.l");
        if (!(l > 0.0 && l < 1.0)) throw ConfigError("loss.l", "must lie in (0,1)");
        loss = LossModel::constant(l);
    } else if (lkind == "uniform") {
        reject_unknown(jl, "loss", {"kind"});
    } else {
        throw ConfigError("loss.kind", "expected \"constant\" or \"uniform\"");
    }

    const json& ju = object(require(root, "utility", ""), "utility");
    const json& ukind = require(ju, "kind", "utility");
    if (!ukind.is_string()) throw ConfigError("utility.kind", "expected a string");
    const std::string uk = ukind.get<std::string>();
    UtilitySpec utility = UtilitySpec::log();
    try {
        if (uk == "log") {
            reject_unknown(ju, "utility", {"kind"});
        } else if (uk == "negative_power" || uk == "positive_power") {
            reject_unknown(ju, "utility", {"kind", "alpha"});
            double a = number(require(ju, "alpha", "utility"), "utility.alpha");
            utility = uk == "negative_power" ? UtilitySpec::negative_power(a)
                                             : UtilitySpec::positive_power(a);
        } else if (uk == "regime_sqrt") {
            reject_unknown(ju, "utility", {"kind", "beta"});
            const json& jb = array(require(ju, "beta", "utility"), "utility.beta");
            std::vector<double> betas;
            for (std::size_t i = 0; i < jb.size(); ++i)
                betas.push_back(number(jb[i], "utility.beta[" + std::to_string(i) + "]"));
            utility = UtilitySpec::regime_sqrt(betas);
        } else {
            throw ConfigError("utility.kind", "unknown utility '" + uk + "'");
        }
    } catch (const InvalidParameter& e) {
        throw ConfigError(uk == "regime_sqrt" ? "utility.beta" : "utility.alpha", e.what());
    }

    try {
        return ModelConfig{MarketModel(gen, regimes, delta, loss), utility};
    } catch (const InvalidParameter& e) {
        throw ConfigError("regimes", e.what());
    }
}

ModelConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_config_json(const ModelConfig& config) {
    const MarketModel& m = config.model;
    json root;
    json regimes = json::array();
    for (const RegimeParams& p : m.regimes())
        regimes.push_back({{"r", p.r}, {"mu", p.mu}, {"sigma", p.sigma},
                           {"lambda", p.lambda}, {"theta", p.theta}, {"eta", p.eta}});
    root["regimes"] = regimes;
    root["generator"] = m.generator().rows();
    root["delta"] = m.delta();
    if (m.loss().is_constant())
        root["loss"] = {{"kind", "constant"}, {"l", m.loss().fraction()}};
    else
        root["loss"] = {{"kind", "uniform"}};
    const UtilitySpec& u = config.utility;
    switch (u.kind()) {
        case UtilitySpec::Kind::log: root["utility"] = {{"kind", "log"}}; break;
        case UtilitySpec::Kind::negative_power:
            root["utility"] = {{"kind", "negative_power"}, {"alpha", u.alpha()}};
            break;
        case UtilitySpec::Kind::positive_power:
            root["utility"] = {{"kind", "positive_power"}, {"alpha", u.alpha()}};
            break;
        case UtilitySpec::Kind::regime_sqrt:
            root["utility"] = {{"kind", "regime_sqrt"}, {"beta", u.betas()}};
            break;
    }
    return root.dump(2) + "\n";
}

}  // namespace rsinsure
