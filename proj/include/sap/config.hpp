#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "sap/engine.hpp"
#include "sap/planner.hpp"
#include "sap/recognize.hpp"
#include "sap/sen.hpp"

namespace sap {

struct AdapterConfig {
  bool enabled = false;
  std::string endpoint;                       // http://host:port/path
  std::string model;
  std::string api_key_env = "SAP_LLM_API_KEY";
  int timeout_ms = 8000;
  int retries = 1;
};

struct LibraryConfig {
  int size = 50;
  int seen = 30;
};

// One structured file drives every subcommand; flags override seed/out-dir/
// workers. Unknown keys are rejected so typos fail loudly.
struct RunConfig {
  std::string map = "basesWorkers8x8";
  int step_limit = 0;  // 0: map default
  int plan_interval = 200;
  int episodes = 5;
  std::uint64_t seed = 0;
  int workers = 0;
  LibraryConfig library{};
  PlannerConfig planner{};
  TrainConfig sen{};
  double sen_test_fraction = 0.2;
  RecognitionConfig recognition{};
  AdapterConfig adapter{};
  StatsTable stats{};
};

namespace detail {

inline void parse_stats_override(StatsTable& stats, const nlohmann::json& j) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    UnitType t;
    if (!unit_type_from_string(it.key(), t))
      throw std::invalid_argument("stats_overrides: unknown unit type " + it.key());
    UnitStats s = stats.of(t);
    const nlohmann::json& o = *it;
    s.hp_max = o.value("hp", s.hp_max);
    s.cost = o.value("cost", s.cost);
    s.attack_damage = o.value("damage", s.attack_damage);
    s.attack_range = o.value("range", s.attack_range);
    s.move_time = o.value("move_time", s.move_time);
    s.harvest_time = o.value("harvest_time", s.harvest_time);
    s.return_time = o.value("return_time", s.return_time);
    s.attack_time = o.value("attack_time", s.attack_time);
    s.produce_time = o.value("produce_time", s.produce_time);
    stats.set(t, s);
  }
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  static const std::set<std::string> known{
      "map", "step_limit", "plan_interval", "episodes", "seed", "workers", "library",
      "planner", "sen", "recognition", "adapter", "stats_overrides"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (known.count(it.key()) == 0)
      throw std::invalid_argument("config: unknown key " + it.key());

  c.map = j.value("map", c.map);
  MapId id;
  if (!map_id_from_string(c.map, id)) throw std::invalid_argument("config: unknown map " + c.map);
  c.step_limit = j.value("step_limit", c.step_limit);
  c.plan_interval = j.value("plan_interval", c.plan_interval);
  c.episodes = j.value("episodes", c.episodes);
  c.seed = j.value("seed", c.seed);
  c.workers = j.value("workers", c.workers);
  if (j.contains("library")) {
    c.library.size = j["library"].value("size", c.library.size);
    c.library.seen = j["library"].value("seen", c.library.seen);
  }
  if (j.contains("planner")) {
    c.planner.plan_entry_cap = j["planner"].value("entry_cap", c.planner.plan_entry_cap);
  }
  if (j.contains("sen")) {
    const auto& s = j["sen"];
    c.sen.hidden1 = s.value("hidden1", c.sen.hidden1);
    c.sen.hidden2 = s.value("hidden2", c.sen.hidden2);
    c.sen.lr = s.value("lr", c.sen.lr);
    c.sen.momentum = s.value("momentum", c.sen.momentum);
    c.sen.weight_decay = s.value("weight_decay", c.sen.weight_decay);
    c.sen.batch_size = s.value("batch", c.sen.batch_size);
    c.sen.max_epochs = s.value("epochs", c.sen.max_epochs);
    c.sen.patience = s.value("patience", c.sen.patience);
    c.sen.val_fraction = s.value("val_fraction", c.sen.val_fraction);
    c.sen_test_fraction = s.value("test_fraction", c.sen_test_fraction);
  }
  if (j.contains("recognition")) {
    const auto& r = j["recognition"];
    c.recognition.barracks_early_max_tick =
        r.value("barracks_early_max_tick", c.recognition.barracks_early_max_tick);
    c.recognition.aggr_enemy_frac = r.value("aggr_enemy_frac", c.recognition.aggr_enemy_frac);
    c.recognition.defense_full_frac = r.value("defense_full_frac", c.recognition.defense_full_frac);
    c.recognition.defense_perimeter_frac =
        r.value("defense_perimeter_frac", c.recognition.defense_perimeter_frac);
    c.recognition.econ_low_max = r.value("econ_low_max", c.recognition.econ_low_max);
    c.recognition.econ_med_max = r.value("econ_med_max", c.recognition.econ_med_max);
    c.recognition.nominal_cycle_ticks =
        r.value("nominal_cycle_ticks", c.recognition.nominal_cycle_ticks);
  }
  if (j.contains("adapter")) {
    const auto& a = j["adapter"];
    c.adapter.enabled = a.value("enabled", c.adapter.enabled);
    c.adapter.endpoint = a.value("endpoint", c.adapter.endpoint);
    c.adapter.model = a.value("model", c.adapter.model);
    c.adapter.api_key_env = a.value("api_key_env", c.adapter.api_key_env);
    c.adapter.timeout_ms = a.value("timeout_ms", c.adapter.timeout_ms);
    c.adapter.retries = a.value("retries", c.adapter.retries);
  }
  if (j.contains("stats_overrides")) detail::parse_stats_override(c.stats, j["stats_overrides"]);
  return c;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["map"] = c.map;
  j["step_limit"] = c.step_limit;
  j["plan_interval"] = c.plan_interval;
  j["episodes"] = c.episodes;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["library"] = {{"size", c.library.size}, {"seen", c.library.seen}};
  j["planner"] = {{"entry_cap", c.planner.plan_entry_cap}};
  j["sen"] = {{"hidden1", c.sen.hidden1}, {"hidden2", c.sen.hidden2}, {"lr", c.sen.lr},
              {"momentum", c.sen.momentum}, {"weight_decay", c.sen.weight_decay},
              {"batch", c.sen.batch_size}, {"epochs", c.sen.max_epochs},
              {"patience", c.sen.patience}, {"val_fraction", c.sen.val_fraction},
              {"test_fraction", c.sen_test_fraction}};
  j["recognition"] = {{"barracks_early_max_tick", c.recognition.barracks_early_max_tick},
                      {"aggr_enemy_frac", c.recognition.aggr_enemy_frac},
                      {"defense_full_frac", c.recognition.defense_full_frac},
                      {"defense_perimeter_frac", c.recognition.defense_perimeter_frac},
                      {"econ_low_max", c.recognition.econ_low_max},
                      {"econ_med_max", c.recognition.econ_med_max},
                      {"nominal_cycle_ticks", c.recognition.nominal_cycle_ticks}};
  j["adapter"] = {{"enabled", c.adapter.enabled}, {"endpoint", c.adapter.endpoint},
                  {"model", c.adapter.model}, {"api_key_env", c.adapter.api_key_env},
                  {"timeout_ms", c.adapter.timeout_ms}, {"retries", c.adapter.retries}};
  return j;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path);
  return config_from_json(nlohmann::json::parse(in));
}

inline std::string config_hash(const RunConfig& c) {
  std::string dump = config_to_json(c).dump();
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline void write_manifest(const std::filesystem::path& out_dir, const RunConfig& c,
                           const std::string& command) {
  nlohmann::json j{{"command", command},
                   {"config_hash", config_hash(c)},
                   {"config", config_to_json(c)},
                   {"format_version", 1}};
  std::ofstream out(out_dir / "manifest.json");
  out << j.dump(2) << "\n";
}

inline MapId map_id_of(const RunConfig& c) {
  MapId id = MapId::basesWorkers8x8;
  map_id_from_string(c.map, id);
  return id;
}

}  // namespace sap
