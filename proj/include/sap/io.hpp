#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sap/sen.hpp"
#include "sap/strategy.hpp"

namespace sap {

using nlohmann::json;

// --- strategy library: one JSON record per line --------------------------------
//
// {"economy":"low",...,"vector":[...],"provenance":"sampled","split":"seen"}

inline json strategy_to_json(const Strategy& s) {
  return json{{"economy", to_string(s.economy)},
              {"barracks", to_string(s.barracks)},
              {"composition", to_string(s.composition)},
              {"aggression", s.aggression},
              {"attack_target", to_string(s.attack_target)},
              {"defense", to_string(s.defense)}};
}

inline Strategy strategy_from_json(const json& j) {
  std::ostringstream os;
  os << "economy=" << j.at("economy").get<std::string>()
     << ",barracks=" << j.at("barracks").get<std::string>()
     << ",composition=" << j.at("composition").get<std::string>()
     << ",aggression=" << (j.at("aggression").get<bool>() ? "true" : "false")
     << ",attack_target=" << j.at("attack_target").get<std::string>()
     << ",defense=" << j.at("defense").get<std::string>();
  auto s = strategy_from_string(os.str());
  if (!s) throw std::invalid_argument("bad strategy record: " + j.dump());
  return *s;
}

inline void save_library(const StrategyLibrary& lib, const std::string& path,
                         const std::vector<std::string>* splits = nullptr) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t i = 0; i < lib.entries.size(); ++i) {
    const LibraryEntry& e = lib.entries[i];
    json j = strategy_to_json(e.strategy);
    j["vector"] = encode(e.strategy);
    j["provenance"] = to_string(e.provenance);
    if (splits != nullptr && i < splits->size()) j["split"] = (*splits)[i];
    out << j.dump() << "\n";
  }
}

struct LoadedLibrary {
  StrategyLibrary lib;
  std::vector<std::string> splits;  // empty strings for untagged entries
};

inline LoadedLibrary load_library(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  LoadedLibrary out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    LibraryEntry e;
    e.strategy = strategy_from_json(j);
    e.provenance = j.value("provenance", std::string("sampled")) == "generated-by-port"
                       ? Provenance::GeneratedByPort
                       : Provenance::Sampled;
    out.lib.entries.push_back(e);
    out.splits.push_back(j.value("split", std::string()));
  }
  return out;
}

// --- result dataset: one JSON record per line -----------------------------------
//
// {"i":0,"j":1,"a":[14 numbers],"b":[...],"r":0.6,"split":"train"}

inline void save_dataset(const ResultDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const ResultRecord& r : data.records) {
    json j{{"i", r.i}, {"j", r.j}, {"a", r.a}, {"b", r.b}, {"r", r.r}};
    if (!r.split.empty()) j["split"] = r.split;
    out << j.dump() << "\n";
  }
}

inline ResultDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  ResultDataset data;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    ResultRecord r;
    r.i = j.value("i", -1);
    r.j = j.value("j", -1);
    auto a = j.at("a").get<std::vector<double>>();
    auto b = j.at("b").get<std::vector<double>>();
    if (a.size() != k_strategy_dim || b.size() != k_strategy_dim)
      throw std::invalid_argument("bad vector length in dataset record");
    std::copy(a.begin(), a.end(), r.a.begin());
    std::copy(b.begin(), b.end(), r.b.begin());
    r.r = j.at("r").get<double>();
    r.split = j.value("split", std::string());
    data.records.push_back(r);
  }
  return data;
}

// --- network parameters: flat arrays with a shape header ------------------------

inline void save_sen(const SENParams& p, const std::string& path) {
  json j{{"format_version", 1}, {"in_dim", p.in_dim}, {"hidden1", p.h1}, {"hidden2", p.h2},
         {"w1", p.w1}, {"b1", p.b1}, {"w2", p.w2}, {"b2", p.b2}, {"w3", p.w3}, {"b3", p.b3}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

inline SENParams load_sen(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json j = json::parse(in);
  if (j.value("format_version", 0) != 1)
    throw std::runtime_error("unsupported network file version in " + path);
  SENParams p;
  p.in_dim = j.at("in_dim").get<int>();
  p.h1 = j.at("hidden1").get<int>();
  p.h2 = j.at("hidden2").get<int>();
  p.w1 = j.at("w1").get<std::vector<double>>();
  p.b1 = j.at("b1").get<std::vector<double>>();
  p.w2 = j.at("w2").get<std::vector<double>>();
  p.b2 = j.at("b2").get<std::vector<double>>();
  p.w3 = j.at("w3").get<std::vector<double>>();
  p.b3 = j.at("b3").get<std::vector<double>>();
  if (!p.shapes_ok()) throw std::runtime_error("inconsistent network shapes in " + path);
  return p;
}

}  // namespace sap
