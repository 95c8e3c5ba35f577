#include "beamlearn/config_file.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace beamlearn {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("invalid number for " + key + ": '" + v + "'");
  }
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("invalid non-negative integer for " + key + ": '" + v + "'");
  }
  return out;
}

int parse_int(const std::string& key, const std::string& v) {
  const std::uint64_t u = parse_uint(key, v);
  if (u > 1u << 20) throw ConfigError("value out of range for " + key + ": '" + v + "'");
  return static_cast<int>(u);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + v + "'");
}

RefinerKind parse_refiner(const std::string& v) {
  if (v == "hoo") return RefinerKind::hoo;
  if (v == "flat") return RefinerKind::flat_leaf;
  throw ConfigError("invalid refiner: '" + v + "' (expected hoo or flat)");
}

ChannelSource parse_channel(const std::string& v) {
  if (v == "scenario") return ChannelSource::scenario;
  if (v == "static") return ChannelSource::static_single_path;
  throw ConfigError("invalid channel: '" + v + "' (expected scenario or static)");
}

ElementPattern parse_element(const std::string& v) {
  if (v == "front_hemisphere") return ElementPattern::front_hemisphere;
  if (v == "cosine") return ElementPattern::cosine;
  throw ConfigError("invalid element: '" + v + "' (expected front_hemisphere or cosine)");
}

std::string element_name(ElementPattern e) {
  return e == ElementPattern::cosine ? "cosine" : "front_hemisphere";
}

struct Field {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
  std::function<json(const ExperimentConfig&)> get;
};

template <typename T>
Field real_field(const char* key, T ExperimentConfig::*outer, double T::*member) {
  return {key,
          [outer, member](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.*outer.*member = parse_double(k, v);
          },
          [outer, member](const ExperimentConfig& c) { return json(c.*outer.*member); }};
}

Field scenario_real(const char* key, double ScenarioConfig::*member) {
  return real_field(key, &ExperimentConfig::scenario, member);
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> table = {
      {"seed", [](C& c, auto& k, auto& v) { c.master_seed = parse_uint(k, v); },
       [](const C& c) { return json(c.master_seed); }},
      {"runs", [](C& c, auto& k, auto& v) { c.n_runs = parse_uint(k, v); },
       [](const C& c) { return json(c.n_runs); }},
      {"horizon", [](C& c, auto& k, auto& v) { c.horizon = parse_uint(k, v); },
       [](const C& c) { return json(c.horizon); }},
      {"window", [](C& c, auto& k, auto& v) { c.window = parse_uint(k, v); },
       [](const C& c) { return json(c.window); }},
      {"pool_size", [](C& c, auto& k, auto& v) { c.pool_size = parse_uint(k, v); },
       [](const C& c) { return json(c.pool_size); }},
      {"threads", [](C& c, auto& k, auto& v) { c.threads = static_cast<unsigned>(parse_int(k, v)); },
       [](const C& c) { return json(c.threads); }},
      {"offline_n", [](C& c, auto& k, auto& v) { c.offline_n = parse_uint(k, v); },
       [](const C& c) { return json(c.offline_n); }},
      {"screen_c", [](C& c, auto& k, auto& v) { c.screen_c = parse_uint(k, v); },
       [](const C& c) { return json(c.screen_c); }},
      {"budget", [](C& c, auto& k, auto& v) { c.learner.selection.training_budget = parse_uint(k, v); },
       [](const C& c) { return json(c.learner.selection.training_budget); }},
      {"risk_threshold_db",
       [](C& c, auto& k, auto& v) { c.learner.selection.risk_threshold_db = parse_double(k, v); },
       [](const C& c) { return json(c.learner.selection.risk_threshold_db); }},
      {"risk_aware", [](C& c, auto& k, auto& v) { c.learner.selection.risk_aware = parse_bool(k, v); },
       [](const C& c) { return json(c.learner.selection.risk_aware); }},
      {"refine", [](C& c, auto& k, auto& v) { c.learner.refine_enabled = parse_bool(k, v); },
       [](const C& c) { return json(c.learner.refine_enabled); }},
      {"policy", [](C& c, auto&, auto& v) { c.learner.policy = parse_policy(v); },
       [](const C& c) { return json(to_string(c.learner.policy)); }},
      {"refine_start_step", [](C& c, auto& k, auto& v) { c.learner.refine_start_step = parse_uint(k, v); },
       [](const C& c) { return json(c.learner.refine_start_step); }},
      {"refiner", [](C& c, auto&, auto& v) { c.learner.refiner = parse_refiner(v); },
       [](const C& c) { return json(to_string(c.learner.refiner)); }},
      {"max_depth", [](C& c, auto& k, auto& v) { c.learner.refinement.max_depth = parse_int(k, v); },
       [](const C& c) { return json(c.learner.refinement.max_depth); }},
      {"k_min", [](C& c, auto& k, auto& v) { c.learner.refinement.k_min = parse_uint(k, v); },
       [](const C& c) { return json(c.learner.refinement.k_min); }},
      {"k_expand", [](C& c, auto& k, auto& v) { c.learner.refinement.k_expand = parse_uint(k, v); },
       [](const C& c) { return json(c.learner.refinement.k_expand); }},
      {"alpha_norm", [](C& c, auto& k, auto& v) { c.learner.refinement.alpha_norm = parse_double(k, v); },
       [](const C& c) { return json(c.learner.refinement.alpha_norm); }},
      {"smoothness_a", [](C& c, auto& k, auto& v) { c.learner.refinement.smoothness_a = parse_double(k, v); },
       [](const C& c) { return json(c.learner.refinement.smoothness_a); }},
      {"smoothness",
       [](C& c, auto& k, auto& v) { c.learner.refinement.smoothness_enabled = parse_bool(k, v); },
       [](const C& c) { return json(c.learner.refinement.smoothness_enabled); }},
      {"tx_nx", [](C& c, auto& k, auto& v) { c.tx_array.n_x = parse_int(k, v); },
       [](const C& c) { return json(c.tx_array.n_x); }},
      {"tx_ny", [](C& c, auto& k, auto& v) { c.tx_array.n_y = parse_int(k, v); },
       [](const C& c) { return json(c.tx_array.n_y); }},
      {"rx_nx", [](C& c, auto& k, auto& v) { c.rx_array.n_x = parse_int(k, v); },
       [](const C& c) { return json(c.rx_array.n_x); }},
      {"rx_ny", [](C& c, auto& k, auto& v) { c.rx_array.n_y = parse_int(k, v); },
       [](const C& c) { return json(c.rx_array.n_y); }},
      {"tx_spacing",
       [](C& c, auto& k, auto& v) { c.tx_array.spacing_x = c.tx_array.spacing_y = parse_double(k, v); },
       [](const C& c) { return json(c.tx_array.spacing_x); }},
      {"rx_spacing",
       [](C& c, auto& k, auto& v) { c.rx_array.spacing_x = c.rx_array.spacing_y = parse_double(k, v); },
       [](const C& c) { return json(c.rx_array.spacing_x); }},
      {"element",
       [](C& c, auto&, auto& v) { c.tx_array.element = c.rx_array.element = parse_element(v); },
       [](const C& c) { return json(element_name(c.tx_array.element)); }},
      {"channel", [](C& c, auto&, auto& v) { c.channel = parse_channel(v); },
       [](const C& c) { return json(to_string(c.channel)); }},
      {"static_beam", [](C& c, auto& k, auto& v) { c.static_beam = parse_uint(k, v); },
       [](const C& c) { return json(c.static_beam); }},
      {"static_offset_fraction", [](C& c, auto& k, auto& v) { c.static_offset_fraction = parse_double(k, v); },
       [](const C& c) { return json(c.static_offset_fraction); }},
      scenario_real("bin_center_m", &ScenarioConfig::bin_center_m),
      scenario_real("bin_half_width_m", &ScenarioConfig::bin_half_width_m),
      scenario_real("carrier_ghz", &ScenarioConfig::carrier_ghz),
      scenario_real("bandwidth_ghz", &ScenarioConfig::bandwidth_ghz),
      scenario_real("bs_height_m", &ScenarioConfig::bs_height_m),
      scenario_real("mu_height_m", &ScenarioConfig::mu_height_m),
      scenario_real("mu_lane_y_m", &ScenarioConfig::mu_lane_y_m),
      scenario_real("near_wall_y_m", &ScenarioConfig::near_wall_y_m),
      scenario_real("far_wall_y_m", &ScenarioConfig::far_wall_y_m),
      scenario_real("reflection_loss_db", &ScenarioConfig::reflection_loss_db),
      {"blockers", [](C& c, auto& k, auto& v) { c.scenario.blockers_enabled = parse_bool(k, v); },
       [](const C& c) { return json(c.scenario.blockers_enabled); }},
      scenario_real("truck_lane_y_m", &ScenarioConfig::truck_lane_y_m),
      scenario_real("truck_length_m", &ScenarioConfig::truck_length_m),
      scenario_real("truck_width_m", &ScenarioConfig::truck_width_m),
      scenario_real("truck_height_m", &ScenarioConfig::truck_height_m),
      scenario_real("blocker_gap_shape", &ScenarioConfig::blocker_gap_shape),
      scenario_real("blocker_gap_scale_m", &ScenarioConfig::blocker_gap_scale_m),
      scenario_real("blockage_loss_db", &ScenarioConfig::blockage_loss_db),
      {"out_csv", [](C& c, auto&, auto& v) { c.out_csv = v; },
       [](const C& c) { return json(c.out_csv); }},
      {"out_manifest", [](C& c, auto&, auto& v) { c.out_manifest = v; },
       [](const C& c) { return json(c.out_manifest); }},
  };
  return table;
}

std::string plain(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    // Shortest form that still round-trips.
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    return std::string(buf, r.ptr);
  }
  return v.dump();
}

}  // namespace

std::string to_string(RefinePolicy p) {
  switch (p) {
    case RefinePolicy::all:
      return "all";
    case RefinePolicy::after_reward:
      return "after_reward";
    case RefinePolicy::after_n:
      return "after_n";
  }
  return "all";
}

std::string to_string(RefinerKind k) { return k == RefinerKind::hoo ? "hoo" : "flat"; }

std::string to_string(ChannelSource c) {
  return c == ChannelSource::scenario ? "scenario" : "static";
}

RefinePolicy parse_policy(const std::string& s) {
  if (s == "all") return RefinePolicy::all;
  if (s == "after_reward") return RefinePolicy::after_reward;
  if (s == "after_n") return RefinePolicy::after_n;
  throw ConfigError("invalid policy: '" + s + "' (expected all, after_reward or after_n)");
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(cfg, key, value);
      return;
    }
  }
  throw ConfigError("unknown configuration key: " + key);
}

void load_config(std::istream& is, ExperimentConfig& cfg) {
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void load_config_file(const std::string& path, ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  load_config(in, cfg);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.emplace_back(f.key);
  return out;
}

void write_config(std::ostream& os, const ExperimentConfig& cfg) {
  for (const auto& f : fields()) os << f.key << " = " << plain(f.get(cfg)) << '\n';
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j = json::object();
  for (const auto& f : fields()) j[f.key] = f.get(cfg);
  return j.dump();
}

}  // namespace beamlearn
