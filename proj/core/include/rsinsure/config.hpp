#pragma once

#include <string>

#include "rsinsure/market.hpp"

namespace rsinsure {

// Model plus utility as stored in a JSON config file:
//   regimes   [{r, mu, sigma, lambda, theta, eta}, ...]
//   generator [[...], ...]
//   delta     number
//   loss      {kind: "constant", l} | {kind: "uniform"}
//   utility   {kind: "log"} | {kind: "negative_power"|"positive_power", alpha}
//             | {kind: "regime_sqrt", beta: [b1, b2]}
// Unknown keys are rejected with ConfigError naming the key.
struct ModelConfig {
    MarketModel model;
    UtilitySpec utility;

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

ModelConfig parse_config(const std::string& json_text);
ModelConfig load_config(const std::string& path);
std::string to_config_json(const ModelConfig& config);

}  // namespace rsinsure
