#include "jumpstop/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

namespace jumpstop {

using nlohmann::json;

ConfigError::ConfigError(std::string where, const std::string& what)
    : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

namespace {

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw ConfigError(join(where, key), "unknown key");
  }
}

double number(const json& obj, const std::string& where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(join(where, key), "missing field");
  if (!it->is_number()) throw ConfigError(join(where, key), "expected a number");
  return it->get<double>();
}

JumpSizeSpec parse_jump(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  const auto kind_it = j.find("kind");
  if (kind_it == j.end() || !kind_it->is_string()) throw ConfigError(join(where, "kind"), "missing jump kind");
  const auto kind = kind_it->get<std::string>();
  try {
    if (kind == "deterministic") {
      only_keys(j, where, {"kind", "m"});
      return JumpSizeSpec::deterministic(number(j, where, "m"));
    }
    if (kind == "discrete") {
      only_keys(j, where, {"kind", "atoms"});
      const auto atoms_it = j.find("atoms");
      if (atoms_it == j.end() || !atoms_it->is_array()) {
        throw ConfigError(join(where, "atoms"), "expected an array of {u, p}");
      }
      std::vector<JumpAtom> atoms;
      for (std::size_t k = 0; k < atoms_it->size(); ++k) {
        const auto at = join(where, "atoms[" + std::to_string(k) + "]");
        const auto& a = (*atoms_it)[k];
        only_keys(a, at, {"u", "p"});
        atoms.push_back({number(a, at, "u"), number(a, at, "p")});
      }
      return JumpSizeSpec::discrete(std::move(atoms));
    }
    if (kind == "lognormal") {
      only_keys(j, where, {"kind", "a", "b"});
      return JumpSizeSpec::log_normal(number(j, where, "a"), number(j, where, "b"));
    }
  } catch (const StructuralError& e) {
    throw ConfigError(where, e.what());
  }
  throw ConfigError(join(where, "kind"), "unknown jump kind '" + kind + "'");
}

ProcessParams parse_process(const json& j, const std::string& where) {
  only_keys(j, where, {"mu", "sigma", "lambda", "jump", "initial"});
  ProcessParams p;
  p.mu = number(j, where, "mu");
  p.sigma = number(j, where, "sigma");
  p.lambda = number(j, where, "lambda");
  p.initial = number(j, where, "initial");
  if (const auto it = j.find("jump"); it != j.end()) {
    p.jump = parse_jump(*it, join(where, "jump"));
  } else if (p.lambda != 0.0) {
    throw ConfigError(join(where, "jump"), "missing field (required when lambda != 0)");
  }
  return p;
}

}  // namespace

Model parse_model(const json& doc) {
  only_keys(doc, "", {"market", "demand", "cost"});
  for (const char* key : {"market", "demand", "cost"}) {
    if (!doc.contains(key)) throw ConfigError(key, "missing section");
  }
  Model model;
  const auto& mk = doc.at("market");
  only_keys(mk, "market", {"rho", "theta", "kappa0", "kappa1", "n"});
  model.market.rho = number(mk, "market", "rho");
  model.market.theta = number(mk, "market", "theta");
  model.market.kappa0 = number(mk, "market", "kappa0");
  model.market.kappa1 = number(mk, "market", "kappa1");
  model.market.n = number(mk, "market", "n");
  model.demand = parse_process(doc.at("demand"), "demand");
  model.cost = parse_process(doc.at("cost"), "cost");
  check_structure(model);
  return model;
}

Model load_model(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string(), "cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string() + " (byte " + std::to_string(e.byte) + ")", "invalid JSON");
  }
  return parse_model(doc);
}

json to_json(const JumpSizeSpec& spec) {
  struct Visitor {
    json operator()(const DeterministicJump& d) const { return {{"kind", "deterministic"}, {"m", d.m}}; }
    json operator()(const DiscreteJump& d) const {
      json atoms = json::array();
      for (const auto& a : d.atoms) atoms.push_back({{"u", a.u}, {"p", a.p}});
      return {{"kind", "discrete"}, {"atoms", atoms}};
    }
    json operator()(const LogNormalJump& l) const { return {{"kind", "lognormal"}, {"a", l.a}, {"b", l.b}}; }
  };
  return std::visit(Visitor{}, spec.variant());
}

namespace {

json process_json(const ProcessParams& p) {
  return {{"mu", p.mu}, {"sigma", p.sigma}, {"lambda", p.lambda}, {"jump", to_json(p.jump)}, {"initial", p.initial}};
}

}  // namespace

json to_json(const Model& model) {
  const auto& mk = model.market;
  return {{"market", {{"rho", mk.rho}, {"theta", mk.theta}, {"kappa0", mk.kappa0}, {"kappa1", mk.kappa1}, {"n", mk.n}}},
          {"demand", process_json(model.demand)},
          {"cost", process_json(model.cost)}};
}

}  // namespace jumpstop
