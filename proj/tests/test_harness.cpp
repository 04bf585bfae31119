#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>

#include "sap/experiment.hpp"
#include "sap/io.hpp"

using namespace sap;

namespace {

Strategy rush_strategy() {
  Strategy s;
  s.economy = Economy::Med;
  s.composition = Composition::Worker;
  s.aggression = true;
  return s;
}

Strategy turtle_strategy() {
  Strategy s;
  s.economy = Economy::Med;
  s.defense = DefensePosture::Full;
  return s;
}

bool results_equal(const MatchResult& a, const MatchResult& b) {
  return a.outcome == b.outcome && a.final_tick == b.final_tick &&
         a.action_histogram == b.action_histogram &&
         a.metrics[0].damage_dealt == b.metrics[0].damage_dealt &&
         a.metrics[1].resources_harvested == b.metrics[1].resources_harvested;
}

}  // namespace

TEST_CASE("passive vs passive ends in a draw at the step limit") {
  MatchConfig cfg;
  cfg.seed = 1;
  cfg.step_limit = 300;
  cfg.agents = {AgentSpec::scripted(BotKind::Passive), AgentSpec::scripted(BotKind::Passive)};
  MatchResult res = run_match(cfg, MatchAssets{});
  CHECK(res.outcome == Outcome::draw());
  CHECK(res.final_tick == 300);
  CHECK(res.score(Player::P1) == 0.5);
}

TEST_CASE("worker rush crushes a passive opponent") {
  MatchConfig cfg;
  cfg.seed = 3;
  cfg.agents = {AgentSpec::scripted(BotKind::WorkerRushLike), AgentSpec::scripted(BotKind::Passive)};
  MatchResult res = run_match(cfg, MatchAssets{});
  CHECK(res.outcome == Outcome::win(Player::P1));
  CHECK(res.final_tick < 2000);
  CHECK(res.metrics[0].units_produced > 0);
}

TEST_CASE("light rush builds a barracks and wins against passive") {
  MatchConfig cfg;
  cfg.seed = 5;
  cfg.agents = {AgentSpec::scripted(BotKind::LightRushLike), AgentSpec::scripted(BotKind::Passive)};
  MatchResult res = run_match(cfg, MatchAssets{});
  CHECK(res.outcome == Outcome::win(Player::P1));
}

TEST_CASE("random biased bot plays legal games to completion") {
  MatchConfig cfg;
  cfg.seed = 8;
  cfg.step_limit = 400;
  cfg.agents = {AgentSpec::scripted(BotKind::RandomBiased), AgentSpec::scripted(BotKind::RandomBiased)};
  MatchResult res = run_match(cfg, MatchAssets{});
  CHECK(res.outcome.over());
}

TEST_CASE("identical configs give identical results") {
  MatchConfig cfg;
  cfg.seed = 21;
  cfg.agents = {AgentSpec::fixed_strategy(rush_strategy()),
                AgentSpec::fixed_strategy(turtle_strategy())};
  MatchResult a = run_match(cfg, MatchAssets{});
  MatchResult b = run_match(cfg, MatchAssets{});
  CHECK(results_equal(a, b));

  cfg.seed = 22;
  MatchResult c = run_match(cfg, MatchAssets{});
  bool same = results_equal(a, c);
  CHECK(!same);
}

TEST_CASE("damage bookkeeping is symmetric and hp-consistent") {
  MatchConfig cfg;
  cfg.seed = 33;
  cfg.agents = {AgentSpec::fixed_strategy(rush_strategy()),
                AgentSpec::fixed_strategy(turtle_strategy())};
  MatchResult res = run_match(cfg, MatchAssets{});
  CHECK(res.metrics[0].damage_dealt == res.metrics[1].damage_taken);
  CHECK(res.metrics[1].damage_dealt == res.metrics[0].damage_taken);
  CHECK(res.metrics[0].damage_dealt > 0);

  // independent hp ledger over a manual run of the same match
  GameState s = load_map(cfg.map, cfg.seed);
  MatchAssets assets;
  auto a1 = make_agent(cfg.agents[0], assets);
  auto a2 = make_agent(cfg.agents[1], assets);
  a1->begin_episode(Player::P1, s);
  a2->begin_episode(Player::P2, s);
  Trajectory traj;
  StepEvents ev;
  long hp_spawned = 0, damage_applied = 0;
  long hp_initial = 0;
  for (const Unit& u : s.units)
    if (u.owner != Player::Neutral) hp_initial += u.hp;
  while (!outcome(s).over()) {
    Assignments x = a1->act(s, traj);
    Assignments y = a2->act(s, traj);
    traj.record(s, x, y);
    x.insert(y.begin(), y.end());
    step_inplace(s, x, &ev);
    for (const auto& at : ev.attacks) damage_applied += at.damage;
    for (const auto& sp : ev.spawns) hp_spawned += s.stats.of(sp.type).hp_max;
  }
  long hp_final = 0;
  for (const Unit& u : s.units)
    if (u.owner != Player::Neutral) hp_final += u.hp;
  CHECK(hp_initial + hp_spawned - hp_final == damage_applied);
  CHECK(damage_applied == res.metrics[0].damage_dealt + res.metrics[1].damage_dealt);
}

TEST_CASE("action histogram buckets cover everything issued") {
  MatchConfig cfg;
  cfg.seed = 11;
  cfg.step_limit = 500;
  cfg.agents = {AgentSpec::fixed_strategy(rush_strategy()), AgentSpec::vanilla()};
  MatchResult res = run_match(cfg, MatchAssets{});
  long bucketed = 0;
  for (int seat = 0; seat < 2; ++seat)
    for (const auto& bucket : res.action_histogram[static_cast<std::size_t>(seat)])
      for (int v : bucket) bucketed += v;
  CHECK(bucketed > 0);
  // every bucket index maps inside the match length
  for (int seat = 0; seat < 2; ++seat)
    CHECK(static_cast<int>(res.action_histogram[static_cast<std::size_t>(seat)].size()) <=
          res.final_tick / k_histogram_bucket_ticks + 1);
}

TEST_CASE("sap agent replans on the interval with the neutral default at t=0") {
  SENParams zero = SENParams::zeros(2 * static_cast<int>(k_strategy_dim), 4, 4);
  MatchAssets assets;
  assets.sen = &zero;
  assets.plan_interval = 200;

  MatchConfig cfg;
  cfg.seed = 2;
  cfg.step_limit = 800;
  cfg.agents = {AgentSpec::sap(), AgentSpec::scripted(BotKind::Passive)};
  MatchResult res = run_match(cfg, assets);
  REQUIRE(res.outcome == Outcome::draw());  // constant net picks the quiet first strategy
  REQUIRE(res.replans[0].size() == 4);      // t = 0, 200, 400, 600
  CHECK(res.replans[0][0].tick == 0);
  CHECK(res.replans[0][0].recognized == k_neutral_strategy);
  CHECK(res.replans[0][1].tick == 200);
  // constant network ties break to the first enumerated strategy
  for (const auto& e : res.replans[0]) CHECK(e.response == enumerate_space().front());
}

TEST_CASE("sap-epe locks one response per episode and carries history") {
  SENParams zero = SENParams::zeros(2 * static_cast<int>(k_strategy_dim), 4, 4);
  MatchAssets assets;
  assets.sen = &zero;
  TournamentOptions opt;
  opt.assets = assets;
  opt.step_limit = 400;
  opt.episodes = 2;
  opt.workers = 1;

  auto epe = make_agent(AgentSpec::sap_epe(), assets);
  auto opp = make_agent(AgentSpec::fixed_strategy(rush_strategy()), assets);
  MatchConfig cfg;
  cfg.step_limit = 400;
  cfg.seed = 9;
  cfg.agents = {AgentSpec::sap_epe(), AgentSpec::fixed_strategy(rush_strategy())};
  MatchResult first = run_match_with(cfg, {epe.get(), opp.get()});
  REQUIRE(first.replans[0].size() == 1);
  CHECK(first.replans[0][0].recognized == k_neutral_strategy);  // no history yet

  cfg.seed = 10;
  MatchResult second = run_match_with(cfg, {epe.get(), opp.get()});
  REQUIRE(second.replans[0].size() == 1);
  // second episode recognizes the rush from episode one
  CHECK(second.replans[0][0].recognized.aggression == true);
}

TEST_CASE("run_battle_pair alternates seats and honors the draw credit") {
  TournamentOptions opt;
  opt.step_limit = 600;
  opt.workers = 1;
  double r = run_battle_pair(rush_strategy(), k_neutral_strategy, 4, 100, opt);
  CHECK(r >= 0.0);
  CHECK(r <= 1.0);
  double again = run_battle_pair(rush_strategy(), k_neutral_strategy, 4, 100, opt);
  CHECK(r == again);

  // passive mirror: all draws -> exactly one half
  double mirror = run_battle_pair(k_neutral_strategy, k_neutral_strategy, 4, 100, opt);
  CHECK(mirror == 0.5);
}

TEST_CASE("round robin emits n^2 records with mirrored scores") {
  std::vector<Strategy> lib{rush_strategy(), turtle_strategy(), k_neutral_strategy};
  TournamentOptions opt;
  opt.episodes = 2;
  opt.step_limit = 500;
  opt.workers = 2;
  ResultDataset data = run_round_robin(lib, opt);
  REQUIRE(data.records.size() == 9);

  auto find = [&](int i, int j) -> const ResultRecord& {
    for (const auto& r : data.records)
      if (r.i == i && r.j == j) return r;
    throw std::runtime_error("missing record");
  };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const ResultRecord& rec = find(i, j);
      if (i != j) CHECK(rec.r + find(j, i).r == doctest::Approx(1.0));
      CHECK(rec.a == encode(lib[static_cast<std::size_t>(i)]));
    }

  // single strategy: just the self pair
  ResultDataset solo = run_round_robin({rush_strategy()}, opt);
  CHECK(solo.records.size() == 1);

  // determinism across worker counts
  TournamentOptions serial = opt;
  serial.workers = 1;
  ResultDataset again = run_round_robin(lib, serial);
  REQUIRE(again.records.size() == data.records.size());
  for (std::size_t k = 0; k < data.records.size(); ++k) {
    CHECK(again.records[k].i == data.records[k].i);
    CHECK(again.records[k].r == data.records[k].r);
  }
}

TEST_CASE("round robin resumes from a partial dataset") {
  std::vector<Strategy> lib{rush_strategy(), turtle_strategy(), k_neutral_strategy};
  TournamentOptions opt;
  opt.episodes = 2;
  opt.step_limit = 500;
  opt.workers = 1;
  ResultDataset full = run_round_robin(lib, opt);

  ResultDataset partial;
  for (const auto& r : full.records)
    if (r.i == 0) partial.records.push_back(r);  // pretend we only finished row 0
  ResultDataset resumed = run_round_robin(lib, opt, &partial);
  REQUIRE(resumed.records.size() == full.records.size());
  for (std::size_t k = 0; k < full.records.size(); ++k) {
    CHECK(resumed.records[k].i == full.records[k].i);
    CHECK(resumed.records[k].j == full.records[k].j);
    CHECK(resumed.records[k].r == full.records[k].r);
  }
}

TEST_CASE("experiment table mirrors scores and writes reports") {
  std::vector<AgentSpec> specs{AgentSpec::fixed_strategy(rush_strategy()),
                               AgentSpec::fixed_strategy(k_neutral_strategy),
                               AgentSpec::vanilla()};
  TournamentOptions opt;
  opt.episodes = 2;
  opt.step_limit = 400;
  opt.workers = 2;
  ExperimentResult res = run_experiment(specs, 2, opt);
  for (std::size_t a = 0; a < specs.size(); ++a)
    for (std::size_t b = 0; b < specs.size(); ++b) {
      if (a == b) continue;
      CHECK(res.table[a][b].score() + res.table[b][a].score() == doctest::Approx(1.0));
      CHECK(res.table[a][b].episodes() == 2);
    }

  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "sap_report_test";
  fs::create_directories(dir);
  write_win_rate_matrix(res, (dir / "win_rate_matrix.csv").string());
  write_action_series(res, (dir / "action_distribution.csv").string());
  write_metric_series(res, (dir / "metric_series.csv").string());
  CHECK(fs::file_size(dir / "win_rate_matrix.csv") > 0);
  CHECK(fs::file_size(dir / "action_distribution.csv") > 0);
  fs::remove_all(dir);
}

TEST_CASE("bootstrap interval brackets the mean") {
  std::vector<double> samples;
  Rng rng(77);
  for (int k = 0; k < 200; ++k) samples.push_back(rng.next_double() > 0.3 ? 1.0 : 0.0);
  BootstrapCI ci = bootstrap_mean_ci(samples, 5);
  CHECK(ci.lo <= ci.mean);
  CHECK(ci.mean <= ci.hi);
  CHECK(ci.hi - ci.lo < 0.2);
  CHECK(ci.mean == doctest::Approx(0.7).epsilon(0.1));
}

TEST_CASE("seat fairness: mirrored seating changes little") {
  // same pairing, each strategy tried from both seats across seeds
  Strategy a = rush_strategy();
  Strategy b;
  b.economy = Economy::Med;
  b.barracks = BarracksTiming::Early;
  b.composition = Composition::Light;
  b.aggression = true;
  int n = 50;
  double a_as_p1 = 0.0, a_as_p2 = 0.0;
  for (int e = 0; e < n; ++e) {
    MatchConfig cfg;
    cfg.seed = 4000 + static_cast<std::uint64_t>(e);
    cfg.agents = {AgentSpec::fixed_strategy(a), AgentSpec::fixed_strategy(b)};
    a_as_p1 += run_match(cfg, MatchAssets{}).score(Player::P1);
    std::swap(cfg.agents[0], cfg.agents[1]);
    a_as_p2 += run_match(cfg, MatchAssets{}).score(Player::P2);
  }
  a_as_p1 /= n;
  a_as_p2 /= n;
  MESSAGE("seat1 ", a_as_p1, " seat2 ", a_as_p2);
  CHECK(std::abs(a_as_p1 - a_as_p2) <= 0.15);
}

TEST_CASE("16x16 map plays to completion") {
  MatchConfig cfg;
  cfg.map = MapId::basesWorkers16x16;
  cfg.seed = 2;
  cfg.agents = {AgentSpec::fixed_strategy(rush_strategy()), AgentSpec::vanilla()};
  MatchResult res = run_match(cfg, MatchAssets{});
  CHECK(res.outcome.over());
  CHECK(res.final_tick <= 4000);
}

TEST_CASE("match throughput supports tournament scale") {
  MatchConfig cfg;
  cfg.seed = 77;
  cfg.agents = {AgentSpec::fixed_strategy(rush_strategy()),
                AgentSpec::fixed_strategy(turtle_strategy())};
  auto t0 = std::chrono::steady_clock::now();
  int n = 10;
  for (int k = 0; k < n; ++k) {
    cfg.seed = static_cast<std::uint64_t>(k);
    run_match(cfg, MatchAssets{});
  }
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() /
              static_cast<double>(n);
  MESSAGE("mean match time ms: ", ms);
  CHECK(ms < 400.0);  // 4500 tournament matches must fit the time budget
}
