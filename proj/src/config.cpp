#include "ebcm/config.hpp"

#include <fstream>
#include <set>

#include "ebcm/errors.hpp"

namespace ebcm {

using nlohmann::json;

namespace {

constexpr const char* kMetaVersionKey = "ebcm_meta_version";

void reject_unknown(const json& obj, const std::string& prefix,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(prefix + key, "unknown key");
  }
}

const json& object_at(const json& j, const std::string& key) {
  if (!j.at(key).is_object()) throw ConfigError(key, "must be an object");
  return j.at(key);
}

template <typename T>
void read(const json& obj, const std::string& key, const std::string& full_key, T& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(full_key, "must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(full_key, "must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned()) {
          throw ConfigError(full_key, "must be non-negative");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(full_key, "must be a number");
    }
    out = v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(full_key, e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  experiment.validate();
  if (replicas < 1) throw ConfigError("replicas", "must be at least 1");
  if (alpha_grid.empty()) throw ConfigError("alpha_grid", "must not be empty");
  for (double a : alpha_grid) {
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError("alpha_grid", "values must lie in (0, 1]");
  }
  if (switch_block < 1) throw ConfigError("switch_block", "must be at least 1");
  if (prediction_burn_in < 0) throw ConfigError("prediction_burn_in", "must be non-negative");
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  reject_unknown(j, "",
                 {"alpha", "beta", "phi0_grid", "photons_per_set", "sets_per_protocol",
                  "protocols", "source", "detector", "master_seed", "persistence", "replicas",
                  "burn_in", "prediction_burn_in", "alpha_grid", "reference_seed",
                  "switch_block", "register_mode", "input_port"});

  RunConfig rc;
  ExperimentConfig& ex = rc.experiment;
  read(j, "alpha", "alpha", ex.alpha);
  read(j, "beta", "beta", ex.beta);
  read(j, "photons_per_set", "photons_per_set", ex.photons_per_set);
  read(j, "sets_per_protocol", "sets_per_protocol", ex.sets_per_protocol);
  read(j, "master_seed", "master_seed", ex.master_seed);
  read(j, "persistence", "persistence", ex.persistence);
  read(j, "burn_in", "burn_in", ex.burn_in);
  read(j, "replicas", "replicas", rc.replicas);
  read(j, "prediction_burn_in", "prediction_burn_in", rc.prediction_burn_in);
  read(j, "reference_seed", "reference_seed", rc.reference_seed);
  read(j, "switch_block", "switch_block", rc.switch_block);

  if (j.contains("phi0_grid")) {
    const json& g = object_at(j, "phi0_grid");
    reject_unknown(g, "phi0_grid.", {"count", "start", "stop"});
    read(g, "count", "phi0_grid.count", ex.grid.count);
    read(g, "start", "phi0_grid.start", ex.grid.start);
    read(g, "stop", "phi0_grid.stop", ex.grid.stop);
  }
  if (j.contains("protocols")) {
    const json& ps = j.at("protocols");
    if (!ps.is_array()) throw ConfigError("protocols", "must be an array of protocol tags");
    ex.protocols.clear();
    for (const auto& p : ps) {
      if (!p.is_string()) throw ConfigError("protocols", "entries must be strings");
      auto parsed = PhaseProtocol::parse(p.get<std::string>());
      if (!parsed) throw ConfigError("protocols", "unknown protocol '" + p.get<std::string>() + "'");
      ex.protocols.push_back(*parsed);
    }
  }
  if (j.contains("source")) {
    const json& s = object_at(j, "source");
    reject_unknown(s, "source.", {"onf", "g2_flag", "switch_window_ns", "dead_time_us"});
    read(s, "onf", "source.onf", ex.source.onf);
    read(s, "g2_flag", "source.g2_flag", ex.source.g2_flag);
    read(s, "switch_window_ns", "source.switch_window_ns", ex.source.switch_window_ns);
    read(s, "dead_time_us", "source.dead_time_us", ex.source.dead_time_us);
  }
  if (j.contains("detector")) {
    const json& d = object_at(j, "detector");
    reject_unknown(d, "detector.", {"efficiency", "dark_prob_per_gate", "gate_window_ns"});
    read(d, "efficiency", "detector.efficiency", ex.detector.efficiency);
    read(d, "dark_prob_per_gate", "detector.dark_prob_per_gate", ex.detector.dark_prob_per_gate);
    read(d, "gate_window_ns", "detector.gate_window_ns", ex.detector.gate_window_ns);
  }
  if (j.contains("alpha_grid")) {
    const json& a = j.at("alpha_grid");
    if (!a.is_array()) throw ConfigError("alpha_grid", "must be an array of numbers");
    rc.alpha_grid.clear();
    for (const auto& v : a) {
      if (!v.is_number()) throw ConfigError("alpha_grid", "entries must be numbers");
      rc.alpha_grid.push_back(v.get<double>());
    }
  }
  if (j.contains("register_mode")) {
    const json& m = j.at("register_mode");
    if (m == "overwrite") {
      ex.register_mode = RegisterMode::overwrite;
    } else if (m == "averaged") {
      ex.register_mode = RegisterMode::averaged;
    } else {
      throw ConfigError("register_mode", "must be \"overwrite\" or \"averaged\"");
    }
  }
  if (j.contains("input_port")) {
    int port = 1;
    read(j, "input_port", "input_port", port);
    if (port != 0 && port != 1) throw ConfigError("input_port", "must be 0 or 1");
    ex.input_port = port_from_index(port);
  }

  rc.validate();
  return rc;
}

json config_to_json(const RunConfig& rc) {
  const ExperimentConfig& ex = rc.experiment;
  json protocols = json::array();
  for (const auto& p : ex.protocols) protocols.push_back(p.tag());
  return json{
      {"alpha", ex.alpha},
      {"beta", ex.beta},
      {"phi0_grid", {{"count", ex.grid.count}, {"start", ex.grid.start}, {"stop", ex.grid.stop}}},
      {"photons_per_set", ex.photons_per_set},
      {"sets_per_protocol", ex.sets_per_protocol},
      {"protocols", protocols},
      {"source",
       {{"onf", ex.source.onf},
        {"g2_flag", ex.source.g2_flag},
        {"switch_window_ns", ex.source.switch_window_ns},
        {"dead_time_us", ex.source.dead_time_us}}},
      {"detector",
       {{"efficiency", ex.detector.efficiency},
        {"dark_prob_per_gate", ex.detector.dark_prob_per_gate},
        {"gate_window_ns", ex.detector.gate_window_ns}}},
      {"master_seed", ex.master_seed},
      {"persistence", ex.persistence},
      {"burn_in", ex.burn_in},
      {"register_mode", ex.register_mode == RegisterMode::overwrite ? "overwrite" : "averaged"},
      {"input_port", index(ex.input_port)},
      {"replicas", rc.replicas},
      {"alpha_grid", rc.alpha_grid},
      {"reference_seed", rc.reference_seed},
      {"switch_block", rc.switch_block},
      {"prediction_burn_in", rc.prediction_burn_in},
  };
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  if (j.is_object() && j.contains(kMetaVersionKey)) {
    if (!j.contains("config")) throw ConfigError("config", "metadata file has no config");
    return config_from_json(j.at("config"));
  }
  return config_from_json(j);
}

}  // namespace ebcm
