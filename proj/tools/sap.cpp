// Command-line front end: offline pipeline (strategy generation, tournament,
// network training/evaluation) and online play (single matches, experiment
// presets, reports).

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

#include "sap/config.hpp"
#include "sap/event_log.hpp"
#include "sap/experiment.hpp"
#include "sap/io.hpp"
#include "sap/remote.hpp"

namespace fs = std::filesystem;
using namespace sap;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
  bool workers_set = false;
};

RunConfig resolve_config(const GlobalOpts& g) {
  RunConfig cfg = g.config_path.empty() ? RunConfig{} : load_config(g.config_path);
  if (g.seed_set) cfg.seed = g.seed;
  if (g.workers_set) cfg.workers = g.workers;
  return cfg;
}

TournamentOptions tournament_options(const RunConfig& cfg, const SENParams* sen) {
  TournamentOptions opt;
  opt.map = map_id_of(cfg);
  opt.episodes = cfg.episodes;
  opt.base_seed = cfg.seed;
  opt.workers = cfg.workers;
  opt.step_limit = cfg.step_limit;
  opt.assets.sen = sen;
  opt.assets.tips = default_tips();
  opt.assets.planner_cfg = cfg.planner;
  opt.assets.recog_cfg = cfg.recognition;
  opt.assets.plan_interval = cfg.plan_interval;
  return opt;
}

std::shared_ptr<ChatClient> make_client(const RunConfig& cfg) {
  if (!cfg.adapter.enabled) return nullptr;
  return std::make_shared<ChatClient>(cfg.adapter);
}

int cmd_gen_strategies(const GlobalOpts& g) {
  RunConfig cfg = resolve_config(g);
  fs::create_directories(g.out_dir);

  StrategySource source = uniform_strategy_source();
  auto client = make_client(cfg);
  if (client != nullptr && client->usable()) source = remote_strategy_source(client, cfg.stats);

  StrategyLibrary lib = generate_library(cfg.library.size, source, cfg.seed);
  LibrarySplit split = split_seen_unseen(lib, cfg.library.seen, cfg.seed + 1);

  std::set<StrategyVector> seen_set;
  for (const auto& e : split.seen.entries) seen_set.insert(encode(e.strategy));
  std::vector<std::string> tags;
  for (const auto& e : lib.entries)
    tags.push_back(seen_set.count(encode(e.strategy)) != 0 ? "seen" : "unseen");

  std::string path = (fs::path(g.out_dir) / "strategies.jsonl").string();
  save_library(lib, path, &tags);
  write_manifest(g.out_dir, cfg, "gen-strategies");
  std::cout << "wrote " << lib.size() << " strategies (" << split.seen.size() << " seen, "
            << split.unseen.size() << " unseen) to " << path << "\n";
  return 0;
}

std::pair<std::vector<Strategy>, std::vector<Strategy>> load_split_strategies(
    const std::string& out_dir) {
  LoadedLibrary loaded = load_library((fs::path(out_dir) / "strategies.jsonl").string());
  std::vector<Strategy> seen, unseen;
  for (std::size_t i = 0; i < loaded.lib.entries.size(); ++i) {
    if (loaded.splits[i] == "seen") seen.push_back(loaded.lib.entries[i].strategy);
    else unseen.push_back(loaded.lib.entries[i].strategy);
  }
  return {seen, unseen};
}

int cmd_tournament(const GlobalOpts& g) {
  RunConfig cfg = resolve_config(g);
  auto [seen, unseen] = load_split_strategies(g.out_dir);
  if (seen.empty()) {
    std::cerr << "no seen strategies in " << g.out_dir << "; run gen-strategies first\n";
    return 1;
  }

  std::string data_path = (fs::path(g.out_dir) / "dataset.jsonl").string();
  ResultDataset resume;
  bool has_resume = fs::exists(data_path);
  if (has_resume) {
    resume = load_dataset(data_path);
    std::cout << "resuming from " << resume.records.size() << " existing records\n";
  }

  TournamentOptions opt = tournament_options(cfg, nullptr);
  auto t0 = std::chrono::steady_clock::now();
  ResultDataset data = run_round_robin(seen, opt, has_resume ? &resume : nullptr,
                                       [](int done, int total) {
                                         if (done % 50 == 0 || done == total)
                                           std::cout << "pairs " << done << "/" << total << "\n";
                                       });
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  save_dataset(data, data_path);
  write_manifest(g.out_dir, cfg, "tournament");
  std::cout << "wrote " << data.records.size() << " records (" << seen.size() << " strategies, "
            << cfg.episodes << " episodes per pair) in " << secs << "s to " << data_path << "\n";
  return 0;
}

int cmd_train_sen(const GlobalOpts& g) {
  RunConfig cfg = resolve_config(g);
  std::string data_path = (fs::path(g.out_dir) / "dataset.jsonl").string();
  ResultDataset data = load_dataset(data_path);
  bool tagged = false;
  for (const auto& r : data.records)
    if (!r.split.empty()) tagged = true;
  if (!tagged) {
    assign_splits(data, cfg.sen_test_fraction, cfg.seed + 17);
    save_dataset(data, data_path);  // freeze the split next to the data
  }

  TrainConfig tc = cfg.sen;
  tc.seed = cfg.seed;
  std::vector<TrainLogRow> log;
  SENParams params = train(data, tc, &log);
  save_sen(params, (fs::path(g.out_dir) / "sen.json").string());

  std::ofstream log_out(fs::path(g.out_dir) / "train_log.csv");
  log_out << "epoch,train_loss,val_loss\n";
  for (const auto& row : log)
    log_out << row.epoch << "," << row.train_loss << "," << row.val_loss << "\n";

  write_manifest(g.out_dir, cfg, "train-sen");
  std::cout << "trained " << log.size() << " epochs; final train loss "
            << (log.empty() ? 0.0 : log.back().train_loss) << "\n";
  return 0;
}

int cmd_eval_sen(const GlobalOpts& g) {
  RunConfig cfg = resolve_config(g);
  SENParams params = load_sen((fs::path(g.out_dir) / "sen.json").string());
  ResultDataset data = load_dataset((fs::path(g.out_dir) / "dataset.jsonl").string());
  auto test = data.tagged("test");
  if (test.empty()) {
    std::cerr << "dataset has no test split; run train-sen first\n";
    return 1;
  }
  EvalMetrics m = evaluate(params, test);
  write_confusion_matrix(m, (fs::path(g.out_dir) / "confusion_matrix.csv").string());
  write_manifest(g.out_dir, cfg, "eval-sen");
  std::cout << "test records " << m.total() << "  accuracy " << m.accuracy << "  fp_rate "
            << m.fp_rate << "\n"
            << "confusion: tp " << m.tp << " fp " << m.fp << " fn " << m.fn << " tn " << m.tn
            << "\n";
  return 0;
}

std::optional<SENParams> try_load_sen(const std::string& out_dir) {
  fs::path p = fs::path(out_dir) / "sen.json";
  if (!fs::exists(p)) return std::nullopt;
  return load_sen(p.string());
}

bool needs_sen(const AgentSpec& s) {
  return s.kind == AgentSpec::Kind::Sap || s.kind == AgentSpec::Kind::SapEpe ||
         s.kind == AgentSpec::Kind::SapNoTips;
}

int cmd_match(const GlobalOpts& g, const std::string& p1_text, const std::string& p2_text,
              const std::string& log_path) {
  RunConfig cfg = resolve_config(g);
  auto p1 = agent_spec_from_string(p1_text);
  auto p2 = agent_spec_from_string(p2_text);
  if (!p1 || !p2) {
    std::cerr << "unknown agent spec; use sap|sap-epe|sap-nosen|sap-notips|vanilla|tips|"
                 "fixed:<strategy>|bot:<kind>\n";
    return 1;
  }

  std::optional<SENParams> sen = try_load_sen(g.out_dir);
  if ((needs_sen(*p1) || needs_sen(*p2)) && !sen) {
    std::cerr << "agent needs " << (fs::path(g.out_dir) / "sen.json").string()
              << "; run train-sen first\n";
    return 1;
  }

  MatchAssets assets;
  assets.sen = sen ? &*sen : nullptr;
  assets.planner_cfg = cfg.planner;
  assets.recog_cfg = cfg.recognition;
  assets.plan_interval = cfg.plan_interval;
  auto client = make_client(cfg);
  if (client != nullptr && client->usable()) {
    assets.planner_override = remote_planner_port(client, cfg.stats, cfg.planner);
    assets.recognizer_override = remote_recognizer_port(client, cfg.recognition);
  }

  MatchConfig mc;
  mc.map = map_id_of(cfg);
  mc.seed = cfg.seed;
  mc.step_limit = cfg.step_limit;
  mc.stats = cfg.stats;
  mc.agents = {*p1, *p2};
  std::ofstream log_file;
  if (!log_path.empty()) {
    log_file.open(log_path);
    mc.event_log = &log_file;
  }

  MatchResult res = run_match(mc, assets);
  nlohmann::json j{{"p1", to_string(*p1)},
                   {"p2", to_string(*p2)},
                   {"outcome", res.outcome.kind == Outcome::Kind::Draw
                                   ? "draw"
                                   : (res.outcome.winner == Player::P1 ? "P1" : "P2")},
                   {"final_tick", res.final_tick}};
  for (int seat = 0; seat < 2; ++seat) {
    const PlayerMetrics& m = res.metrics[static_cast<std::size_t>(seat)];
    j[seat == 0 ? "p1_metrics" : "p2_metrics"] = {{"damage_dealt", m.damage_dealt},
                                                  {"damage_taken", m.damage_taken},
                                                  {"resources_harvested", m.resources_harvested},
                                                  {"units_produced", m.units_produced}};
  }
  for (int seat = 0; seat < 2; ++seat) {
    if (res.replans[static_cast<std::size_t>(seat)].empty()) continue;
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : res.replans[static_cast<std::size_t>(seat)])
      events.push_back({{"tick", e.tick},
                        {"recognized", strategy_to_string(e.recognized)},
                        {"response", strategy_to_string(e.response)},
                        {"predicted_win", e.predicted_win}});
    j[seat == 0 ? "p1_replans" : "p2_replans"] = events;
  }
  j["summary"] = summary_to_json(res.summary);
  std::cout << j.dump(2) << "\n";
  return 0;
}

void save_experiment_json(const ExperimentResult& res, const std::string& path) {
  nlohmann::json j;
  j["agents"] = res.names;
  nlohmann::json table = nlohmann::json::array();
  for (std::size_t a = 0; a < res.names.size(); ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t b = 0; b < res.names.size(); ++b)
      row.push_back({{"wins", res.table[a][b].wins},
                     {"draws", res.table[a][b].draws},
                     {"losses", res.table[a][b].losses}});
    table.push_back(row);
  }
  j["table"] = table;
  j["action_series"] = res.action_series;
  j["metric_series"] = res.metric_series;
  std::ofstream out(path);
  out << j.dump() << "\n";
}

ExperimentResult load_experiment_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  ExperimentResult res;
  res.names = j.at("agents").get<std::vector<std::string>>();
  std::size_t n = res.names.size();
  res.table.assign(n, std::vector<PairwiseCell>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const auto& cell = j.at("table").at(a).at(b);
      res.table[a][b].wins = cell.at("wins").get<int>();
      res.table[a][b].draws = cell.at("draws").get<int>();
      res.table[a][b].losses = cell.at("losses").get<int>();
    }
  res.action_series =
      j.at("action_series").get<std::vector<std::vector<std::array<double, 6>>>>();
  res.metric_series =
      j.at("metric_series").get<std::vector<std::vector<std::array<double, 4>>>>();
  return res;
}

void write_all_reports(const ExperimentResult& res, const std::string& out_dir) {
  write_win_rate_matrix(res, (fs::path(out_dir) / "win_rate_matrix.csv").string());
  write_action_series(res, (fs::path(out_dir) / "action_distribution.csv").string());
  write_metric_series(res, (fs::path(out_dir) / "metric_series.csv").string());
}

int cmd_experiment(const GlobalOpts& g, const std::string& preset, const std::string& agents_csv,
                   int episodes_flag) {
  RunConfig cfg = resolve_config(g);
  if (episodes_flag > 0) cfg.episodes = episodes_flag;
  std::optional<SENParams> sen = try_load_sen(g.out_dir);
  TournamentOptions opt = tournament_options(cfg, sen ? &*sen : nullptr);

  std::vector<AgentSpec> specs;
  if (!agents_csv.empty()) {
    std::istringstream is(agents_csv);
    std::string tok;
    while (std::getline(is, tok, ';')) {
      auto spec = agent_spec_from_string(tok);
      if (!spec) {
        std::cerr << "bad agent spec: " << tok << "\n";
        return 1;
      }
      specs.push_back(*spec);
    }
  } else if (preset == "plan-level") {
    specs = {AgentSpec::vanilla(), AgentSpec::tips_augmented(), AgentSpec::sap()};
  } else if (preset == "ablation") {
    specs = {AgentSpec::sap(), AgentSpec::sap_epe(), AgentSpec::sap_nosen(),
             AgentSpec::sap_notips()};
  } else if (preset == "bots") {
    specs = {AgentSpec::sap(), AgentSpec::scripted(BotKind::WorkerRushLike),
             AgentSpec::scripted(BotKind::LightRushLike),
             AgentSpec::scripted(BotKind::RandomBiased), AgentSpec::scripted(BotKind::Passive)};
  } else {
    std::cerr << "unknown preset '" << preset << "'; use plan-level|ablation|bots or --agents\n";
    return 1;
  }

  bool sap_requested = false;
  for (const auto& s : specs) sap_requested = sap_requested || needs_sen(s);
  if (sap_requested && !sen) {
    std::cerr << "preset needs a trained network in " << g.out_dir << "; run train-sen first\n";
    return 1;
  }

  fs::create_directories(g.out_dir);
  ExperimentResult res = run_experiment(specs, cfg.episodes, opt, [](int done, int total) {
    std::cout << "pairings " << done << "/" << total << "\n";
  });
  save_experiment_json(res, (fs::path(g.out_dir) / "experiment.json").string());
  write_all_reports(res, g.out_dir);
  write_manifest(g.out_dir, cfg, "experiment");

  std::cout << "agent averages:\n";
  for (std::size_t a = 0; a < res.names.size(); ++a) {
    double total = 0.0;
    int cells = 0;
    for (std::size_t b = 0; b < res.names.size(); ++b) {
      if (a == b) continue;
      total += res.table[a][b].score();
      cells++;
    }
    std::cout << "  " << res.names[a] << ": " << (cells > 0 ? total / cells : 0.0) << "\n";
  }
  return 0;
}

int cmd_report(const GlobalOpts& g) {
  fs::path src = fs::path(g.out_dir) / "experiment.json";
  if (!fs::exists(src)) {
    std::cerr << "no experiment.json in " << g.out_dir << "; run experiment first\n";
    return 1;
  }
  ExperimentResult res = load_experiment_json(src.string());
  write_all_reports(res, g.out_dir);
  std::cout << "reports rewritten under " << g.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strategy-augmented planning toolkit"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out-dir", g.out_dir, "artifact directory (default: out)");
  auto* seed_opt = app.add_option("--seed", g.seed, "seed override");
  auto* workers_opt = app.add_option("--workers", g.workers, "worker thread override");

  app.add_subcommand("gen-strategies", "draw the strategy library and split it");
  app.add_subcommand("tournament", "round robin over the seen strategies");
  app.add_subcommand("train-sen", "fit the evaluation network on the dataset");
  app.add_subcommand("eval-sen", "score the network on the held-out split");

  auto* match_cmd = app.add_subcommand("match", "run one match");
  std::string p1_text = "vanilla", p2_text = "vanilla", log_path;
  match_cmd->add_option("--p1", p1_text, "seat 1 agent spec");
  match_cmd->add_option("--p2", p2_text, "seat 2 agent spec");
  match_cmd->add_option("--log", log_path, "write a per-tick event log here");

  auto* exp_cmd = app.add_subcommand("experiment", "pairwise tables and series reports");
  std::string preset = "plan-level", agents_csv;
  int episodes_flag = 0;
  exp_cmd->add_option("--preset", preset, "plan-level|ablation|bots");
  exp_cmd->add_option("--agents", agents_csv, "semicolon-separated agent specs");
  exp_cmd->add_option("--episodes", episodes_flag, "episodes per pairing");

  app.add_subcommand("report", "re-render csv reports from experiment.json");

  CLI11_PARSE(app, argc, argv);
  g.seed_set = seed_opt->count() > 0;
  g.workers_set = workers_opt->count() > 0;

  try {
    fs::create_directories(g.out_dir);
    if (app.got_subcommand("gen-strategies")) return cmd_gen_strategies(g);
    if (app.got_subcommand("tournament")) return cmd_tournament(g);
    if (app.got_subcommand("train-sen")) return cmd_train_sen(g);
    if (app.got_subcommand("eval-sen")) return cmd_eval_sen(g);
    if (app.got_subcommand("match")) return cmd_match(g, p1_text, p2_text, log_path);
    if (app.got_subcommand("experiment")) return cmd_experiment(g, preset, agents_csv, episodes_flag);
    if (app.got_subcommand("report")) return cmd_report(g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
