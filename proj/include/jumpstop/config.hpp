#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "jumpstop/errors.hpp"
#include "jumpstop/model.hpp"

namespace jumpstop {

/// Malformed or incomplete model file. `where` is a dotted path such as
/// "market.theta".
class ConfigError : public Error {
 public:
  ConfigError(std::string where, const std::string& what);
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Model document:
///   { "market": {rho, theta, kappa0, kappa1, n},
///     "demand": {mu, sigma, lambda, jump, initial},
///     "cost":   {mu, sigma, lambda, jump, initial} }
/// with jump one of
///   {"kind": "deterministic", "m": ...}
///   {"kind": "discrete", "atoms": [{"u": ..., "p": ...}, ...]}
///   {"kind": "lognormal", "a": ..., "b": ...}
/// Unknown keys are rejected. `jump` may be omitted when lambda is 0. The
/// parsed model is checked structurally (StructuralError).
Model parse_model(const nlohmann::json& doc);
Model load_model(const std::filesystem::path& file);

nlohmann::json to_json(const Model& model);
nlohmann::json to_json(const JumpSizeSpec& spec);

}  // namespace jumpstop
