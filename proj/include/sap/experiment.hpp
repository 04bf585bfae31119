#pragma once

#include <fstream>
#include <iomanip>
#include <mutex>

#include "sap/tournament.hpp"

namespace sap {

struct PairwiseCell {
  int wins = 0, draws = 0, losses = 0;

  int episodes() const { return wins + draws + losses; }
  double score() const {
    return episodes() == 0 ? 0.0
                           : (wins + 0.5 * draws) / static_cast<double>(episodes());
  }
};

struct ExperimentResult {
  std::vector<AgentSpec> agents;
  std::vector<std::string> names;
  std::vector<std::vector<PairwiseCell>> table;  // [row][col], row's perspective
  // mean issued actions / metric deltas per 100-tick bucket, per agent
  std::vector<std::vector<std::array<double, 6>>> action_series;
  std::vector<std::vector<std::array<double, 4>>> metric_series;
  std::vector<int> matches_played;
};

namespace detail {

struct SeriesAccum {
  std::vector<std::array<double, 6>> actions;
  std::vector<std::array<long, 1>> action_matches;
  std::vector<std::array<double, 4>> metrics;
  int matches = 0;

  void add(const MatchResult& r, int seat) {
    const auto& hist = r.action_histogram[static_cast<std::size_t>(seat)];
    if (actions.size() < hist.size()) {
      actions.resize(hist.size());
      action_matches.resize(hist.size());
    }
    for (std::size_t b = 0; b < hist.size(); ++b) {
      for (int k = 0; k < 6; ++k) actions[b][static_cast<std::size_t>(k)] += hist[b][static_cast<std::size_t>(k)];
      action_matches[b][0]++;
    }
    const auto& ms = r.metric_series[static_cast<std::size_t>(seat)];
    if (metrics.size() < ms.size()) metrics.resize(ms.size());
    for (std::size_t b = 0; b < ms.size(); ++b)
      for (int k = 0; k < 4; ++k) metrics[b][static_cast<std::size_t>(k)] += ms[b][static_cast<std::size_t>(k)];
    matches++;
  }

  void finalize() {
    for (std::size_t b = 0; b < actions.size(); ++b) {
      double n = static_cast<double>(std::max<long>(1, action_matches[b][0]));
      for (auto& v : actions[b]) v /= n;
    }
    for (auto& row : metrics)
      for (auto& v : row) v /= std::max(1, matches);
  }
};

}  // namespace detail

// Pairwise table over every unordered agent pair. Within one pairing the same
// agent instances carry through all episodes (per-episode exploitation needs
// the history), seats alternating. Pairings run on the worker pool.
inline ExperimentResult run_experiment(const std::vector<AgentSpec>& specs, int episodes,
                                       const TournamentOptions& opt,
                                       const std::function<void(int, int)>& progress = nullptr) {
  if (specs.size() < 2) throw std::invalid_argument("run_experiment: need at least two agents");
  int n = static_cast<int>(specs.size());

  ExperimentResult out;
  out.agents = specs;
  for (const AgentSpec& s : specs) out.names.push_back(to_string(s));
  out.table.assign(static_cast<std::size_t>(n), std::vector<PairwiseCell>(static_cast<std::size_t>(n)));
  out.matches_played.assign(static_cast<std::size_t>(n), 0);

  struct Task {
    int a, b;
  };
  std::vector<Task> tasks;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) tasks.push_back({a, b});

  std::vector<detail::SeriesAccum> series(static_cast<std::size_t>(n));
  std::mutex merge_mu;
  std::atomic<int> completed{0};

  parallel_for(tasks.size(), opt.workers, [&](std::size_t t) {
    const Task& task = tasks[t];
    std::unique_ptr<Agent> agent_a = make_agent(specs[static_cast<std::size_t>(task.a)], opt.assets);
    std::unique_ptr<Agent> agent_b = make_agent(specs[static_cast<std::size_t>(task.b)], opt.assets);
    std::uint64_t seed0 = pair_seed(opt.base_seed, task.a, task.b);

    PairwiseCell cell_ab, cell_ba;
    std::vector<std::pair<MatchResult, bool>> local;  // result, a_first
    for (int e = 0; e < episodes; ++e) {
      MatchConfig cfg;
      cfg.map = opt.map;
      cfg.step_limit = opt.step_limit;
      cfg.seed = seed0 + static_cast<std::uint64_t>(e);
      bool a_first = e % 2 == 0;
      cfg.agents[0] = specs[static_cast<std::size_t>(a_first ? task.a : task.b)];
      cfg.agents[1] = specs[static_cast<std::size_t>(a_first ? task.b : task.a)];
      MatchResult res = a_first ? run_match_with(cfg, {agent_a.get(), agent_b.get()})
                                : run_match_with(cfg, {agent_b.get(), agent_a.get()});
      double sa = res.score(a_first ? Player::P1 : Player::P2);
      if (sa == 1.0) { cell_ab.wins++; cell_ba.losses++; }
      else if (sa == 0.0) { cell_ab.losses++; cell_ba.wins++; }
      else { cell_ab.draws++; cell_ba.draws++; }
      local.emplace_back(std::move(res), a_first);
    }

    std::lock_guard<std::mutex> lock(merge_mu);
    out.table[static_cast<std::size_t>(task.a)][static_cast<std::size_t>(task.b)] = cell_ab;
    out.table[static_cast<std::size_t>(task.b)][static_cast<std::size_t>(task.a)] = cell_ba;
    for (auto& [res, a_first] : local) {
      series[static_cast<std::size_t>(task.a)].add(res, a_first ? 0 : 1);
      series[static_cast<std::size_t>(task.b)].add(res, a_first ? 1 : 0);
      out.matches_played[static_cast<std::size_t>(task.a)]++;
      out.matches_played[static_cast<std::size_t>(task.b)]++;
    }
    int c = ++completed;
    if (progress) progress(c, static_cast<int>(tasks.size()));
  });

  for (auto& acc : series) {
    acc.finalize();
    out.action_series.push_back(acc.actions);
    out.metric_series.push_back(acc.metrics);
  }
  return out;
}

// One agent spec against a pool of fixed strategies; per-opponent scores from
// the agent's perspective with alternating seats.
struct PoolRun {
  std::vector<double> per_opponent_score;
  std::vector<double> all_scores;          // one entry per match
  std::vector<MatchResult> sample_results; // first episode per opponent
};

inline PoolRun run_vs_pool(const AgentSpec& spec, const std::vector<Strategy>& pool, int episodes,
                           const TournamentOptions& opt,
                           const std::function<void(int, int)>& progress = nullptr) {
  PoolRun out;
  out.per_opponent_score.assign(pool.size(), 0.0);
  std::vector<std::vector<double>> scores(pool.size());
  std::vector<MatchResult> samples(pool.size());
  std::atomic<int> completed{0};

  parallel_for(pool.size(), opt.workers, [&](std::size_t oi) {
    std::unique_ptr<Agent> agent = make_agent(spec, opt.assets);
    std::unique_ptr<Agent> opponent =
        make_agent(AgentSpec::fixed_strategy(pool[oi]), opt.assets);
    std::uint64_t seed0 = pair_seed(opt.base_seed, 7777, static_cast<int>(oi));
    for (int e = 0; e < episodes; ++e) {
      MatchConfig cfg;
      cfg.map = opt.map;
      cfg.step_limit = opt.step_limit;
      cfg.seed = seed0 + static_cast<std::uint64_t>(e);
      bool first = e % 2 == 0;
      cfg.agents[0] = first ? spec : AgentSpec::fixed_strategy(pool[oi]);
      cfg.agents[1] = first ? AgentSpec::fixed_strategy(pool[oi]) : spec;
      MatchResult res = first ? run_match_with(cfg, {agent.get(), opponent.get()})
                              : run_match_with(cfg, {opponent.get(), agent.get()});
      scores[oi].push_back(res.score(first ? Player::P1 : Player::P2));
      if (e == 0) samples[oi] = res;
    }
    int c = ++completed;
    if (progress) progress(c, static_cast<int>(pool.size()));
  });

  for (std::size_t oi = 0; oi < pool.size(); ++oi) {
    double total = 0.0;
    for (double s : scores[oi]) {
      total += s;
      out.all_scores.push_back(s);
    }
    out.per_opponent_score[oi] = total / static_cast<double>(std::max<std::size_t>(1, scores[oi].size()));
    out.sample_results.push_back(std::move(samples[oi]));
  }
  return out;
}

// percentile bootstrap for the mean, 95% by default
struct BootstrapCI {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

inline BootstrapCI bootstrap_mean_ci(const std::vector<double>& samples, std::uint64_t seed,
                                     int iterations = 2000, double alpha = 0.05) {
  BootstrapCI ci;
  if (samples.empty()) return ci;
  double total = 0.0;
  for (double s : samples) total += s;
  ci.mean = total / static_cast<double>(samples.size());

  Rng rng(seed);
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(iterations));
  for (int it = 0; it < iterations; ++it) {
    double sum = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k)
      sum += samples[static_cast<std::size_t>(rng.below(samples.size()))];
    means.push_back(sum / static_cast<double>(samples.size()));
  }
  std::sort(means.begin(), means.end());
  auto at = [&](double q) {
    std::size_t idx = static_cast<std::size_t>(q * static_cast<double>(means.size() - 1));
    return means[idx];
  };
  ci.lo = at(alpha / 2.0);
  ci.hi = at(1.0 - alpha / 2.0);
  return ci;
}

// --- tabular reports -----------------------------------------------------------

// agent names and strategy strings contain commas; quote every text field
inline std::string csv_quote(const std::string& s) { return "\"" + s + "\""; }

inline void write_win_rate_matrix(const ExperimentResult& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "agent";
  for (const auto& n : r.names) out << "," << csv_quote(n);
  out << ",avg\n";
  for (std::size_t a = 0; a < r.names.size(); ++a) {
    out << csv_quote(r.names[a]);
    double total = 0.0;
    int cells = 0;
    for (std::size_t b = 0; b < r.names.size(); ++b) {
      if (a == b) {
        out << ",-";
        continue;
      }
      double s = r.table[a][b].score();
      out << "," << std::fixed << std::setprecision(4) << s;
      total += s;
      cells++;
    }
    out << "," << std::fixed << std::setprecision(4) << (cells > 0 ? total / cells : 0.0) << "\n";
  }
}

inline void write_action_series(const ExperimentResult& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "agent,bucket_start_tick,noop,move,harvest,return,produce,attack\n";
  for (std::size_t a = 0; a < r.names.size(); ++a)
    for (std::size_t b = 0; b < r.action_series[a].size(); ++b) {
      out << csv_quote(r.names[a]) << "," << b * k_histogram_bucket_ticks;
      for (double v : r.action_series[a][b]) out << "," << std::fixed << std::setprecision(3) << v;
      out << "\n";
    }
}

inline void write_metric_series(const ExperimentResult& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "agent,bucket_start_tick,damage_dealt,damage_taken,resources_harvested,units_produced\n";
  for (std::size_t a = 0; a < r.names.size(); ++a)
    for (std::size_t b = 0; b < r.metric_series[a].size(); ++b) {
      out << csv_quote(r.names[a]) << "," << b * k_histogram_bucket_ticks;
      for (double v : r.metric_series[a][b]) out << "," << std::fixed << std::setprecision(3) << v;
      out << "\n";
    }
}

inline void write_confusion_matrix(const EvalMetrics& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << ",predicted_win,predicted_nonwin\n";
  out << "actual_win," << m.tp << "," << m.fn << "\n";
  out << "actual_nonwin," << m.fp << "," << m.tn << "\n";
  out << "accuracy," << std::fixed << std::setprecision(4) << m.accuracy << "\n";
  out << "fp_rate," << std::fixed << std::setprecision(4) << m.fp_rate << "\n";
}

}  // namespace sap
