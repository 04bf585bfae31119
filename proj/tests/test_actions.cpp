#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <set>

#include "sap/executor.hpp"
#include "sap/pathfind.hpp"
#include "sap/plan.hpp"

using namespace sap;

namespace {

GameState tiny(const std::string& text, std::uint64_t seed = 0) {
  return parse_text_map(text, seed, 2000, 25, 5);
}

// independent oracle: plain queue BFS distance, no parent tracking
std::optional<int> bfs_distance(const GameState& s, Position from, Position to) {
  if (from == to) return 0;
  std::vector<int> dist(static_cast<std::size_t>(s.width * s.height), -1);
  auto idx = [&](Position p) { return static_cast<std::size_t>(p.y * s.width + p.x); };
  for (const Unit& u : s.units) dist[idx(u.pos)] = -2;
  dist[idx(to)] = -1;
  dist[idx(from)] = 0;
  std::deque<Position> q{from};
  while (!q.empty()) {
    Position p = q.front();
    q.pop_front();
    for (Dir d : all_dirs) {
      Position n = neighbor(p, d);
      if (!s.in_bounds(n) || dist[idx(n)] != -1) continue;
      dist[idx(n)] = dist[idx(p)] + 1;
      if (n == to) return dist[idx(n)];
      q.push_back(n);
    }
  }
  return std::nullopt;
}

Assignments drive(const GameState& s, ExecutorState& exec) { return tick_controller(s, exec); }

// run a single-player scenario: P2 does nothing
GameState run_ticks(GameState s, ExecutorState& exec, int ticks) {
  for (int t = 0; t < ticks; ++t) {
    Assignments as = drive(s, exec);
    step_inplace(s, as);
    if (outcome(s).over()) break;
  }
  return s;
}

}  // namespace

TEST_CASE("pathfind: trivial and corridor cases") {
  GameState s = tiny(
      "w....\n"
      ".....\n"
      ".....\n"
      ".....\n"
      ".....\n");
  auto empty = pathfind(s, {0, 0}, {0, 0});
  REQUIRE(empty.has_value());
  CHECK(empty->empty());

  auto corridor = pathfind(s, {0, 0}, {3, 0});
  REQUIRE(corridor.has_value());
  CHECK(*corridor == std::vector<Dir>{Dir::E, Dir::E, Dir::E});
}

TEST_CASE("pathfind: walled-off target is unreachable") {
  GameState s = tiny(
      "w.M..\n"
      "..M..\n"
      "MMM..\n"
      ".....\n"
      ".....\n");
  CHECK(!pathfind(s, {0, 0}, {0, 3}).has_value());  // hmm: below the wall
}

TEST_CASE("pathfind: matches BFS distance oracle on random boards") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    // random obstacles on a 7x7 board
    std::string text;
    for (int y = 0; y < 7; ++y) {
      for (int x = 0; x < 7; ++x) text += (rng.below(4) == 0) ? 'M' : '.';
      text += '\n';
    }
    GameState s = tiny(text, trial);
    Position from{static_cast<int>(rng.below(7)), static_cast<int>(rng.below(7))};
    Position to{static_cast<int>(rng.below(7)), static_cast<int>(rng.below(7))};
    if (s.unit_at(from) != nullptr) continue;  // start must be walkable
    auto path = pathfind(s, from, to);
    auto dist = bfs_distance(s, from, to);
    CHECK(path.has_value() == dist.has_value());
    if (path && dist) {
      CHECK(static_cast<int>(path->size()) == *dist);
      // path must be walkable step by step
      Position p = from;
      for (std::size_t i = 0; i < path->size(); ++i) {
        p = neighbor(p, (*path)[i]);
        CHECK(s.in_bounds(p));
        if (i + 1 < path->size()) CHECK(s.unit_at(p) == nullptr);
      }
      CHECK(p == to);
    }
  }
}

TEST_CASE("plan format round-trips and rejects junk") {
  Plan p;
  p.entries.push_back(AbstractAction::harvest(2));
  p.entries.push_back(AbstractAction::build(UnitType::Barracks, {1, 3}));
  p.entries.push_back(AbstractAction::produce(UnitType::Light, Dir::S));
  p.entries.push_back(AbstractAction::attack(UnitType::Light, UnitType::Worker));
  p.entries.push_back(AbstractAction::attack(UnitType::Heavy, std::nullopt));
  p.entries.push_back(AbstractAction::deploy(UnitType::Ranged, {4, 4}));

  std::string text = serialize_plan(p);
  auto parsed = parse_plan_text(text);
  REQUIRE(parsed.plan.has_value());
  CHECK(parsed.plan->entries == p.entries);
  CHECK(parsed.warnings.empty());

  auto mixed = parse_plan_text("HarvestMineral workers=1\nFrobnicate x=1\nProduceUnit type=Worker dir=N\n");
  REQUIRE(mixed.plan.has_value());
  CHECK(mixed.plan->entries.size() == 2);
  CHECK(mixed.warnings.size() == 1);

  auto nothing = parse_plan_text("\n# comment only\n");
  CHECK(!nothing.plan.has_value());
}

TEST_CASE("validate_plan flags out-of-bounds, affordability") {
  GameState s = load_map(MapId::basesWorkers8x8, 0);
  Plan p;
  p.entries.push_back(AbstractAction::build(UnitType::Barracks, {9, 9}));
  auto issues = validate_plan(p, s, Player::P1);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].message.find("out of bounds") != std::string::npos);

  GameState poor = s;
  poor.resources[0] = 0;
  Plan b;
  b.entries.push_back(AbstractAction::build(UnitType::Barracks, {3, 3}));
  auto afford = validate_plan(b, poor, Player::P1);
  REQUIRE(afford.size() == 1);
  CHECK(afford[0].message.find("affordable") != std::string::npos);

  Plan ok;
  ok.entries.push_back(AbstractAction::harvest(1));
  ok.entries.push_back(AbstractAction::build(UnitType::Barracks, {3, 3}));
  CHECK(validate_plan(ok, s, Player::P1).empty());
}

TEST_CASE("executor: empty plan leaves units idle") {
  GameState s = load_map(MapId::basesWorkers8x8, 0);
  ExecutorState exec = make_executor(Player::P1, Plan{});
  CHECK(drive(s, exec).empty());
}

TEST_CASE("executor: HarvestMineral cycles and grows the stock") {
  GameState s = load_map(MapId::basesWorkers8x8, 0);
  Plan p;
  p.entries.push_back(AbstractAction::harvest(1));
  ExecutorState exec = make_executor(Player::P1, p);

  Assignments first = drive(s, exec);
  REQUIRE(first.size() == 1);
  CHECK(first.begin()->second.kind == AtomicAction::Kind::Harvest);

  GameState after = run_ticks(s, exec, 31);  // harvest 20 + return 10
  CHECK(after.resources[0] == 11);
  GameState later = run_ticks(after, exec, 30);
  CHECK(later.resources[0] == 12);
}

TEST_CASE("executor: harvest entry claims at most worker_count workers") {
  GameState s = tiny(
      "M.b.....\n"
      "Mw.w.w..\n"
      "........\n"
      "........\n"
      "........\n"
      "........\n"
      "......B.\n"
      ".......M\n");
  Plan p;
  p.entries.push_back(AbstractAction::harvest(2));
  ExecutorState exec = make_executor(Player::P1, p);
  drive(s, exec);
  CHECK(exec.entries[0].units.size() == 2);
  CHECK(exec.claims.size() == 2);
}

TEST_CASE("executor: AttackEnemy strikes an adjacent enemy immediately") {
  GameState s = tiny(
      "w.......\n"
      "W.......\n"
      "........\n"
      "........\n"
      "........\n"
      "........\n"
      "........\n"
      "........\n");
  Plan p;
  p.entries.push_back(AbstractAction::attack(UnitType::Worker, std::nullopt));
  ExecutorState exec = make_executor(Player::P1, p);
  Assignments as = drive(s, exec);
  REQUIRE(as.size() == 1);
  CHECK(as.begin()->second.kind == AtomicAction::Kind::Attack);
  CHECK(as.begin()->second.target == Position{0, 1});
}

TEST_CASE("executor: BuildBuilding walks a worker out and builds") {
  GameState s = load_map(MapId::basesWorkers8x8, 0);
  Plan p;
  p.entries.push_back(AbstractAction::build(UnitType::Barracks, {4, 1}));
  p.entries.push_back(AbstractAction::harvest(1));
  ExecutorState exec = make_executor(Player::P1, p);
  GameState after = run_ticks(s, exec, 150);  // 4 moves + produce 100 + done pass
  const Unit* b = after.unit_at({4, 1});
  REQUIRE(b != nullptr);
  CHECK(b->type == UnitType::Barracks);
  CHECK(b->owner == Player::P1);
  CHECK(exec.entries[0].status == EntryStatus::Done);
  // after the build the worker goes back to harvesting
  GameState later = run_ticks(after, exec, 100);
  CHECK(later.resources[0] > after.resources[0]);
}

TEST_CASE("executor: ProduceUnit makes one unit then reports done") {
  GameState s = load_map(MapId::basesWorkers8x8, 0);
  Plan p;
  p.entries.push_back(AbstractAction::produce(UnitType::Worker, Dir::S));
  ExecutorState exec = make_executor(Player::P1, p);
  GameState after = run_ticks(s, exec, 52);
  int workers = 0;
  for (const Unit& u : after.units)
    if (u.owner == Player::P1 && u.type == UnitType::Worker) workers++;
  CHECK(workers == 2);
  CHECK(exec.entries[0].status == EntryStatus::Done);
}

TEST_CASE("executor: DeployUnit reaches the target then reports done") {
  GameState s = load_map(MapId::basesWorkers8x8, 0);
  Plan p;
  p.entries.push_back(AbstractAction::deploy(UnitType::Worker, {4, 4}));
  ExecutorState exec = make_executor(Player::P1, p);
  GameState after = run_ticks(s, exec, 10 * 7 + 5);
  CHECK(exec.entries[0].status == EntryStatus::Done);
  const Unit* u = after.unit_at({4, 4});
  REQUIRE(u != nullptr);
  CHECK(u->type == UnitType::Worker);
}

TEST_CASE("executor: failed prerequisites mark entries failed, not fatal") {
  GameState s = tiny(
      "w...M\n"
      ".....\n"
      ".....\n"
      ".....\n"
      "....W\n");
  Plan p;
  p.entries.push_back(AbstractAction::harvest(1));  // minerals exist but no base
  p.entries.push_back(AbstractAction::produce(UnitType::Light, Dir::N));  // no barracks
  ExecutorState exec = make_executor(Player::P1, p);
  drive(s, exec);
  CHECK(exec.entries[0].status == EntryStatus::Failed);  // no base to return to
  CHECK(exec.entries[1].status == EntryStatus::Failed);  // no barracks, none planned
}

TEST_CASE("executor: determinism over full scripted episodes") {
  auto run = [](std::uint64_t seed) {
    GameState s = load_map(MapId::basesWorkers8x8, seed);
    Plan p1, p2;
    p1.entries.push_back(AbstractAction::harvest(1));
    p1.entries.push_back(AbstractAction::produce(UnitType::Worker, Dir::S));
    p1.entries.push_back(AbstractAction::attack(UnitType::Worker, std::nullopt));
    p2.entries.push_back(AbstractAction::harvest(1));
    ExecutorState e1 = make_executor(Player::P1, p1);
    ExecutorState e2 = make_executor(Player::P2, p2);
    std::vector<GameState> trace;
    GameState cur = s;
    for (int t = 0; t < 400 && !outcome(cur).over(); ++t) {
      Assignments as = tick_controller(cur, e1);
      Assignments bs = tick_controller(cur, e2);
      as.insert(bs.begin(), bs.end());
      step_inplace(cur, as);
      trace.push_back(cur);
    }
    return trace;
  };
  CHECK(run(5) == run(5));
}

TEST_CASE("executor: every emitted action is legal") {
  GameState cur = load_map(MapId::basesWorkers8x8, 17);
  Plan p1, p2;
  p1.entries.push_back(AbstractAction::build(UnitType::Barracks, {3, 2}));
  p1.entries.push_back(AbstractAction::harvest(2));
  p1.entries.push_back(AbstractAction::produce(UnitType::Worker, Dir::S));
  p1.entries.push_back(AbstractAction::produce(UnitType::Light, Dir::S));
  p1.entries.push_back(AbstractAction::attack(UnitType::Light, std::nullopt));
  p2.entries.push_back(AbstractAction::harvest(1));
  p2.entries.push_back(AbstractAction::produce(UnitType::Worker, Dir::N));
  p2.entries.push_back(AbstractAction::attack(UnitType::Worker, UnitType::Worker));
  ExecutorState e1 = make_executor(Player::P1, p1);
  ExecutorState e2 = make_executor(Player::P2, p2);
  for (int t = 0; t < 600 && !outcome(cur).over(); ++t) {
    Assignments as = tick_controller(cur, e1);
    Assignments bs = tick_controller(cur, e2);
    std::array<int, 2> ledger = cur.resources;
    for (auto& [uid, act] : as) {
      const Unit* u = cur.find_unit(uid);
      REQUIRE(u != nullptr);
      CHECK(action_legal(cur, *u, act, ledger[seat_index(u->owner)]));
      if (act.kind == AtomicAction::Kind::Produce)
        ledger[seat_index(u->owner)] -= cur.stats.of(act.produce_type).cost;
    }
    for (auto& [uid, act] : bs) {
      const Unit* u = cur.find_unit(uid);
      REQUIRE(u != nullptr);
      CHECK(action_legal(cur, *u, act, ledger[seat_index(u->owner)]));
      if (act.kind == AtomicAction::Kind::Produce)
        ledger[seat_index(u->owner)] -= cur.stats.of(act.produce_type).cost;
    }
    as.insert(bs.begin(), bs.end());
    step_inplace(cur, as);
  }
}
