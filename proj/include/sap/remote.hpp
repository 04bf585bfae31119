#pragma once

#include <httplib.h>

#include "sap/config.hpp"
#include "sap/planner.hpp"
#include "sap/recognize.hpp"

namespace sap {

// Minimal chat-completion client for the optional text-generation adapters.
// Request/response bodies follow the common /v1/chat/completions JSON shape.
// Every port built on it falls back to its rule-based default on any failure.
class ChatClient {
 public:
  explicit ChatClient(AdapterConfig cfg) : cfg_(std::move(cfg)) {
    parse_endpoint();
    if (!cfg_.api_key_env.empty()) {
      const char* key = std::getenv(cfg_.api_key_env.c_str());
      if (key != nullptr) api_key_ = key;
    }
  }

  bool usable() const { return cfg_.enabled && !host_.empty(); }

  std::optional<std::string> complete(const std::string& system_text,
                                      const std::string& user_text) const {
    if (!usable()) return std::nullopt;
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
      auto reply = request_once(system_text, user_text);
      if (reply) return reply;
    }
    return std::nullopt;
  }

 private:
  std::optional<std::string> request_once(const std::string& system_text,
                                          const std::string& user_text) const {
    httplib::Client client(host_, port_);
    client.set_connection_timeout(0, cfg_.timeout_ms * 1000);
    client.set_read_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    nlohmann::json body{{"messages",
                         {{{"role", "system"}, {"content", system_text}},
                          {{"role", "user"}, {"content", user_text}}}}};
    if (!cfg_.model.empty()) body["model"] = cfg_.model;

    auto res = client.Post(path_.c_str(), headers, body.dump(), "application/json");
    if (!res || res->status != 200) return std::nullopt;
    try {
      nlohmann::json j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  void parse_endpoint() {
    std::string e = cfg_.endpoint;
    auto scheme = e.find("://");
    if (scheme == std::string::npos) return;
    std::string rest = e.substr(scheme + 3);
    auto slash = rest.find('/');
    std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
    path_ = slash == std::string::npos ? "/v1/chat/completions" : rest.substr(slash);
    auto colon = hostport.find(':');
    if (colon == std::string::npos) {
      host_ = hostport;
      port_ = e.rfind("https", 0) == 0 ? 443 : 80;
    } else {
      host_ = hostport.substr(0, colon);
      port_ = std::atoi(hostport.substr(colon + 1).c_str());
    }
  }

  AdapterConfig cfg_;
  std::string host_;
  int port_ = 80;
  std::string path_;
  std::string api_key_;
};

// Planner port backed by the remote service; any failure (transport, empty
// parse) falls back to the rule planner so matches never stall.
inline PlannerPort remote_planner_port(std::shared_ptr<ChatClient> client,
                                       const StatsTable& stats, PlannerConfig cfg = {},
                                       std::vector<std::string>* warnings = nullptr) {
  std::string env_info = default_env_info(stats);
  return [client, env_info, cfg, warnings](const GameState& obs, Player me, const Strategy& s,
                                           const std::vector<ExpertTip>& tips) -> Plan {
    if (client != nullptr && client->usable()) {
      try {
        PromptBundle prompt = assemble_prompt(obs, me, s, tips, env_info);
        auto reply = client->complete(prompt.system, prompt.strategy_text + "\n\n" +
                                                         prompt.tips_text + "\n\n" +
                                                         prompt.observation + "\n\n" +
                                                         prompt.format_rules);
        if (reply) {
          PlanParseResult parsed = parse_plan(*reply, obs, me);
          if (warnings != nullptr)
            warnings->insert(warnings->end(), parsed.warnings.begin(), parsed.warnings.end());
          if (parsed.plan) {
            parsed.plan->created_tick = obs.tick;
            if (static_cast<int>(parsed.plan->entries.size()) > cfg.plan_entry_cap)
              parsed.plan->entries.resize(static_cast<std::size_t>(cfg.plan_entry_cap));
            return *parsed.plan;
          }
        }
      } catch (const std::exception&) {
        // fall through to the rule planner
      }
    }
    return rule_plan(obs, me, s, tips, cfg);
  };
}

inline std::string render_summary(const PlayerSummary& s) {
  std::ostringstream os;
  os << "observed ticks: " << s.ticks_observed << "\nharvest actions: " << s.harvest_count
     << "\ndeposits: " << s.return_count << "\nattacks: " << s.attack_count
     << " (in enemy half: " << s.attacks_in_enemy_half << ")";
  os << "\nproduced:";
  for (UnitType t : {UnitType::Worker, UnitType::Light, UnitType::Heavy, UnitType::Ranged,
                     UnitType::Barracks})
    os << " " << to_string(t) << "=" << s.produced(t);
  if (s.barracks_completed_tick) os << "\nbarracks standing since tick " << *s.barracks_completed_tick;
  os << "\nown-half occupancy: " << s.own_half_fraction
     << ", enemy-half occupancy: " << s.enemy_half_fraction
     << "\nmean army distance to enemy base: " << s.mean_army_distance_to_enemy_base;
  return os.str();
}

// Remote recognition: render the digest, ask for one strategy line, validate;
// fall back to the rule recognizer otherwise.
inline RecognizerPort remote_recognizer_port(std::shared_ptr<ChatClient> client,
                                             RecognitionConfig cfg = {},
                                             std::vector<std::string>* warnings = nullptr) {
  return [client, cfg, warnings](const PlayerSummary& s) -> Recognized {
    if (client != nullptr && client->usable()) {
      std::string system_text =
          "Classify the opponent's play from this behavior digest. Reply with exactly one "
          "line of the form:\n"
          "economy=<low|med|high>,barracks=<none|early|late>,"
          "composition=<worker|light|heavy|ranged|mixed>,aggression=<true|false>,"
          "attack_target=<closest|workers|buildings>,defense=<none|perimeter|full>";
      auto reply = client->complete(system_text, render_summary(s));
      if (reply) {
        std::string line = *reply;
        auto nl = line.find('\n');
        if (nl != std::string::npos) line = line.substr(0, nl);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        auto parsed = strategy_from_string(line);
        if (parsed) {
          Recognized out;
          out.strategy = *parsed;
          out.confidence.fill(0.5);  // the service reports no margins
          return out;
        }
        if (warnings != nullptr) warnings->push_back("unparseable recognition reply: " + line);
      }
    }
    return recognize(s, cfg);
  };
}

// Strategy source that asks the service for one fresh strategy per draw,
// given the already-accepted prefix. Unusable or unparseable replies return
// nullopt, which routes the caller to its uniform fallback.
inline StrategySource remote_strategy_source(std::shared_ptr<ChatClient> client,
                                             const StatsTable& stats) {
  StrategySource src;
  src.provenance = Provenance::GeneratedByPort;
  std::string env_info = default_env_info(stats);
  src.draw = [client, env_info](Rng&, const std::vector<Strategy>& existing)
      -> std::optional<Strategy> {
    if (client == nullptr || !client->usable()) return std::nullopt;
    std::ostringstream user;
    user << "Propose one new strategy as a single line:\n"
            "economy=<low|med|high>,barracks=<none|early|late>,"
            "composition=<worker|light|heavy|ranged|mixed>,aggression=<true|false>,"
            "attack_target=<closest|workers|buildings>,defense=<none|perimeter|full>\n"
            "A composition other than worker requires barracks != none.\n"
            "Already taken:\n";
    for (const Strategy& s : existing) user << strategy_to_string(s) << "\n";
    auto reply = client->complete(env_info, user.str());
    if (!reply) return std::nullopt;
    std::string line = *reply;
    auto nl = line.find('\n');
    if (nl != std::string::npos) line = line.substr(0, nl);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    return strategy_from_string(line);
  };
  return src;
}

}  // namespace sap
