#pragma once

#include <atomic>
#include <functional>
#include <set>
#include <thread>

#include "sap/match.hpp"

namespace sap {

struct TournamentOptions {
  MapId map = MapId::basesWorkers8x8;
  int episodes = 5;
  std::uint64_t base_seed = 0;
  int workers = 0;  // 0: hardware concurrency
  int step_limit = 0;
  MatchAssets assets{};
};

inline std::uint64_t pair_seed(std::uint64_t base, int i, int j) {
  Rng rng(base ^ (static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint64_t>(j));
  return rng.next_u64();
}

// Score of `si` against `sj` over N episodes with alternating seats:
// (wins + 0.5 * draws) / N. The mirrored score is 1 minus this by
// construction of the draw credit.
inline double run_battle_pair(const Strategy& si, const Strategy& sj, int episodes,
                              std::uint64_t base_seed, const TournamentOptions& opt) {
  if (episodes < 1) throw std::invalid_argument("run_battle_pair: episodes must be >= 1");
  double wins = 0.0, draws = 0.0;
  for (int e = 0; e < episodes; ++e) {
    MatchConfig cfg;
    cfg.map = opt.map;
    cfg.seed = base_seed + static_cast<std::uint64_t>(e);
    cfg.step_limit = opt.step_limit;
    bool i_first = e % 2 == 0;
    cfg.agents[0] = AgentSpec::fixed_strategy(i_first ? si : sj);
    cfg.agents[1] = AgentSpec::fixed_strategy(i_first ? sj : si);
    MatchResult res = run_match(cfg, opt.assets);
    Player seat_i = i_first ? Player::P1 : Player::P2;
    if (res.outcome.kind == Outcome::Kind::Win && res.outcome.winner == seat_i) wins += 1.0;
    else if (res.outcome.kind == Outcome::Kind::Draw) draws += 1.0;
  }
  return (wins + 0.5 * draws) / static_cast<double>(episodes);
}

// generic bounded worker pool over an indexed task list
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

// Round robin over every ordered pair including self-pairs: n^2 records.
// Each unordered pair plays once; the mirrored record is 1 - r. Pairs listed
// in `done` (from a partial dataset) are skipped, so interrupted runs resume.
inline ResultDataset run_round_robin(const std::vector<Strategy>& lib,
                                     const TournamentOptions& opt,
                                     const ResultDataset* resume = nullptr,
                                     const std::function<void(int, int)>& progress = nullptr) {
  if (lib.empty()) throw std::invalid_argument("run_round_robin: empty library");
  int n = static_cast<int>(lib.size());

  std::set<std::pair<int, int>> done;
  ResultDataset out;
  if (resume != nullptr) {
    for (const ResultRecord& r : resume->records)
      if (r.i >= 0 && r.j >= 0 && r.i < n && r.j < n && done.insert({r.i, r.j}).second)
        out.records.push_back(r);
    // a partial file may hold one direction only; synthesize the mirrors
    std::vector<ResultRecord> loaded = out.records;
    for (const ResultRecord& r : loaded) {
      if (r.i == r.j || done.count({r.j, r.i}) != 0) continue;
      ResultRecord mirror;
      mirror.i = r.j;
      mirror.j = r.i;
      mirror.a = r.b;
      mirror.b = r.a;
      mirror.r = 1.0 - r.r;
      done.insert({mirror.i, mirror.j});
      out.records.push_back(mirror);
    }
  }

  struct Task {
    int i, j;
  };
  std::vector<Task> tasks;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (done.count({i, j}) == 0) tasks.push_back({i, j});

  std::vector<double> scores(tasks.size(), 0.0);
  std::atomic<int> completed{0};
  parallel_for(tasks.size(), opt.workers, [&](std::size_t t) {
    const Task& task = tasks[t];
    scores[t] = run_battle_pair(lib[static_cast<std::size_t>(task.i)],
                                lib[static_cast<std::size_t>(task.j)], opt.episodes,
                                pair_seed(opt.base_seed, task.i, task.j), opt);
    int c = ++completed;
    if (progress) progress(c, static_cast<int>(tasks.size()));
  });

  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const Task& task = tasks[t];
    ResultRecord rec;
    rec.i = task.i;
    rec.j = task.j;
    rec.a = encode(lib[static_cast<std::size_t>(task.i)]);
    rec.b = encode(lib[static_cast<std::size_t>(task.j)]);
    rec.r = scores[t];
    if (done.insert({task.i, task.j}).second) out.records.push_back(rec);
    if (task.i != task.j && done.count({task.j, task.i}) == 0) {
      ResultRecord mirror;
      mirror.i = task.j;
      mirror.j = task.i;
      mirror.a = rec.b;
      mirror.b = rec.a;
      mirror.r = 1.0 - rec.r;
      done.insert({task.j, task.i});
      out.records.push_back(mirror);
    }
  }

  std::sort(out.records.begin(), out.records.end(), [](const ResultRecord& a, const ResultRecord& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  return out;
}

}  // namespace sap
