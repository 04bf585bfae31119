// End-to-end acceptance suite. Runs the offline pipeline through the CLI,
// then checks every gate at its stated tolerance, one pass/fail line each.
// Exit code is the number of failed gates.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include "sap/event_log.hpp"
#include "sap/experiment.hpp"
#include "sap/io.hpp"

namespace fs = std::filesystem;
using namespace sap;

namespace {

struct Gate {
  bool pass = false;
  std::string detail;
};

struct Context {
  std::string cli;
  fs::path out;
  StrategyLibrary library;
  std::vector<Strategy> seen, unseen, pool;
  ResultDataset dataset;
  SENParams sen;
  double tournament_seconds = 0.0;
};

double mean(const std::vector<double>& xs) {
  double t = 0.0;
  for (double x : xs) t += x;
  return xs.empty() ? 0.0 : t / static_cast<double>(xs.size());
}

int run_cli(const Context& ctx, const std::string& args) {
  std::string cmd = ctx.cli + " --out-dir " + ctx.out.string() + " " + args + " > " +
                    (ctx.out / "cli_log.txt").string() + " 2>&1";
  return std::system(cmd.c_str());
}

// ---- criterion 1: pipeline-scale reproduction --------------------------------

Gate criterion1(Context& ctx) {
  auto t0 = std::chrono::steady_clock::now();
  if (run_cli(ctx, "--seed 0 gen-strategies") != 0) return {false, "gen-strategies failed"};
  if (run_cli(ctx, "--seed 0 --workers 8 tournament") != 0) return {false, "tournament failed"};
  ctx.tournament_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  LoadedLibrary loaded = load_library((ctx.out / "strategies.jsonl").string());
  ctx.library = loaded.lib;
  for (std::size_t i = 0; i < loaded.lib.entries.size(); ++i) {
    ctx.pool.push_back(loaded.lib.entries[i].strategy);
    (loaded.splits[i] == "seen" ? ctx.seen : ctx.unseen)
        .push_back(loaded.lib.entries[i].strategy);
  }
  std::set<StrategyVector> uniq;
  for (const auto& e : ctx.library.entries) uniq.insert(encode(e.strategy));

  ctx.dataset = load_dataset((ctx.out / "dataset.jsonl").string());
  std::set<std::pair<int, int>> pairs;
  for (const auto& r : ctx.dataset.records) pairs.insert({r.i, r.j});

  std::ostringstream d;
  d << ctx.library.size() << " strategies (" << uniq.size() << " unique), " << ctx.seen.size()
    << "/" << ctx.unseen.size() << " split, " << ctx.dataset.records.size() << " records ("
    << pairs.size() << " pairs), wall " << ctx.tournament_seconds << "s";
  bool ok = ctx.library.size() == 50 && uniq.size() == 50 && ctx.seen.size() == 30 &&
            ctx.unseen.size() == 20 && ctx.dataset.records.size() == 900 && pairs.size() == 900 &&
            ctx.tournament_seconds < 3600.0;
  return {ok, d.str()};
}

// ---- criterion 2: gradient correctness ----------------------------------------

Gate criterion2(Context&) {
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  const double h = 1e-5;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed * 7919);
    SENParams p = SENParams::init(2 * static_cast<int>(k_strategy_dim), 6, 5, rng.next_u64());
    std::vector<ResultRecord> batch;
    const auto& space = enumerate_space();
    for (int k = 0; k < 5; ++k) {
      ResultRecord r;
      r.a = encode(space[rng.below(space.size())]);
      r.b = encode(space[rng.below(space.size())]);
      r.r = rng.next_double();
      batch.push_back(r);
    }
    std::vector<const ResultRecord*> ptrs;
    for (const auto& r : batch) ptrs.push_back(&r);

    SENGradients g = gradient(p, ptrs);
    auto batch_loss = [&](const SENParams& q) {
      double total = 0.0;
      for (const ResultRecord* r : ptrs) total += bce_loss(forward(q, r->a, r->b), r->r);
      return total / static_cast<double>(ptrs.size());
    };
    auto probe = [&](std::vector<double>& w, const std::vector<double>& gw) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        double keep = w[i];
        w[i] = keep + h;
        double up = batch_loss(p);
        w[i] = keep - h;
        double down = batch_loss(p);
        w[i] = keep;
        double fd = (up - down) / (2.0 * h);
        double denom = std::max({std::abs(fd), std::abs(gw[i]), 1e-6});
        worst = std::max(worst, std::abs(fd - gw[i]) / denom);
      }
    };
    probe(p.w1, g.w1);
    probe(p.b1, g.b1);
    probe(p.w2, g.w2);
    probe(p.b2, g.b2);
    probe(p.w3, g.w3);
    probe(p.b3, g.b3);
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream d;
  d << "max relative error " << worst << " over 10 seeds in " << secs << "s";
  return {worst <= 1e-4 && secs < 10.0, d.str()};
}

// ---- criterion 3: network learnability ----------------------------------------

Gate criterion3(Context& ctx) {
  if (run_cli(ctx, "--seed 0 train-sen") != 0) return {false, "train-sen failed"};
  ctx.dataset = load_dataset((ctx.out / "dataset.jsonl").string());  // now split-tagged
  ctx.sen = load_sen((ctx.out / "sen.json").string());
  auto test = ctx.dataset.tagged("test");
  EvalMetrics m = evaluate(ctx.sen, test);
  write_confusion_matrix(m, (ctx.out / "confusion_matrix.csv").string());
  std::ostringstream d;
  d << "held-out accuracy " << m.accuracy << " (need >= 0.75), fp rate " << m.fp_rate
    << " (need <= 0.30) on " << m.total() << " records";
  return {m.accuracy >= 0.75 && m.fp_rate <= 0.30, d.str()};
}

// ---- criterion 4: best-response exactness -------------------------------------

Gate criterion4(Context& ctx) {
  const auto& space = enumerate_space();
  Rng rng(123);
  int mismatches = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Strategy opp = space[rng.below(space.size())];
    BestResponse got = best_response(ctx.sen, opp);
    // independently coded exhaustive maximizer
    StrategyVector ov = encode(opp);
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
      double v = forward(ctx.sen, encode(space[i]), ov);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    if (!(got.strategy == space[arg]) || got.win_probability != best) mismatches++;
  }
  SENParams flat = SENParams::zeros(2 * static_cast<int>(k_strategy_dim), 4, 4);
  bool tie_ok = best_response(flat, space[100]).strategy == space.front();
  std::ostringstream d;
  d << mismatches << "/20 mismatches vs independent scan, tie-break "
    << (tie_ok ? "first-enumerated" : "WRONG");
  return {mismatches == 0 && tie_ok, d.str()};
}

// ---- criterion 5: searched-response efficacy -----------------------------------

Gate criterion5(Context& ctx) {
  TournamentOptions opt;
  opt.workers = 0;
  opt.assets.sen = &ctx.sen;
  std::ofstream bars(ctx.out / "searched_response.csv");
  bars << "opponent,response,predicted,score\n";
  double total = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < ctx.unseen.size(); ++i) {
    BestResponse br = best_response(ctx.sen, ctx.unseen[i]);
    double r = run_battle_pair(br.strategy, ctx.unseen[i], 5, 4000 + 10 * i, opt);
    bars << csv_quote(strategy_to_string(ctx.unseen[i])) << ","
         << csv_quote(strategy_to_string(br.strategy)) << "," << br.win_probability << "," << r
         << "\n";
    total += r;
    n++;
  }
  double agg = total / n;
  std::ostringstream d;
  d << "aggregate score " << agg << " vs " << n << " unseen opponents (need >= 0.60)";
  return {agg >= 0.60, d.str()};
}

// ---- criterion 6: closed-loop dominance ----------------------------------------

Gate criterion6(Context& ctx) {
  TournamentOptions opt;
  opt.workers = 0;
  opt.assets.sen = &ctx.sen;

  PoolRun sap = run_vs_pool(AgentSpec::sap(), ctx.pool, 2, opt);
  double sap_mean = mean(sap.all_scores);

  Rng rng(99);
  std::vector<double> base_scores;
  for (int k = 0; k < 100; ++k) {
    std::size_t i = rng.below(ctx.pool.size()), j = rng.below(ctx.pool.size());
    if (i == j) { --k; continue; }
    base_scores.push_back(run_battle_pair(ctx.pool[i], ctx.pool[j], 1, 5000 + k, opt));
  }
  double base_mean = mean(base_scores);

  ExperimentResult h2h = run_experiment(
      {AgentSpec::sap(), AgentSpec::vanilla(), AgentSpec::tips_augmented()}, 10, opt);
  double vs_vanilla = h2h.table[0][1].score();
  double vs_tips = h2h.table[0][2].score();

  std::ostringstream d;
  d << "SAP vs pool " << sap_mean << " over " << sap.all_scores.size()
    << " matches, fixed-vs-fixed baseline " << base_mean << " (need gap >= 0.10); vs vanilla "
    << vs_vanilla << ", vs tips-augmented " << vs_tips << " (need >= 0.5 each)";
  bool ok = sap.all_scores.size() >= 100 && sap_mean >= base_mean + 0.10 && vs_vanilla >= 0.5 &&
            vs_tips >= 0.5;
  return {ok, d.str()};
}

// ---- criterion 7: ablation ordering --------------------------------------------

Gate criterion7(Context& ctx) {
  TournamentOptions opt;
  opt.workers = 0;
  opt.assets.sen = &ctx.sen;

  std::ofstream table(ctx.out / "ablation.csv");
  table << "variant,matches,mean_score,ci_lo,ci_hi\n";
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  for (AgentSpec spec : {AgentSpec::sap(), AgentSpec::sap_epe(), AgentSpec::sap_nosen(),
                         AgentSpec::sap_notips()}) {
    PoolRun run = run_vs_pool(spec, ctx.pool, 5, opt);
    BootstrapCI ci = bootstrap_mean_ci(run.all_scores, 7);
    table << to_string(spec) << "," << run.all_scores.size() << "," << ci.mean << "," << ci.lo
          << "," << ci.hi << "\n";
    rows.emplace_back(to_string(spec), run.all_scores);
  }
  double sap = mean(rows[0].second), nosen = mean(rows[2].second), notips = mean(rows[3].second);
  std::ostringstream d;
  d << "sap " << sap << " >= sap-nosen " << nosen << " >= sap-notips " << notips << " over "
    << rows[0].second.size() << " matches each (sap-epe " << mean(rows[1].second) << ")";
  return {rows[0].second.size() >= 100 && sap >= nosen && nosen >= notips, d.str()};
}

// ---- criterion 8: recognition accuracy -----------------------------------------

Gate criterion8(Context& ctx) {
  MatchAssets assets;
  assets.sen = &ctx.sen;
  std::array<std::array<int, 2>, 6> dim_hits{};  // [dimension][truth aggr value] correct counts
  int aggr_correct[2] = {0, 0};
  int per_value_total = 50;

  for (int truth = 0; truth < 2; ++truth) {
    Rng srng(777 + truth);
    for (int ep = 0; ep < per_value_total; ++ep) {
      const Strategy* gt = nullptr;
      while (gt == nullptr) {
        const Strategy& cand = ctx.pool[srng.below(ctx.pool.size())];
        if (cand.aggression == (truth == 1)) gt = &cand;
      }
      MatchConfig mc;
      mc.seed = 9000 + static_cast<std::uint64_t>(truth) * 100 + ep;
      mc.step_limit = 1200;
      mc.agents = {AgentSpec::fixed_strategy(k_neutral_strategy), AgentSpec::fixed_strategy(*gt)};
      auto a1 = make_agent(mc.agents[0], assets);
      auto a2 = make_agent(mc.agents[1], assets);
      GameState st = load_map(mc.map, mc.seed);
      st.step_limit = mc.step_limit;
      a1->begin_episode(Player::P1, st);
      a2->begin_episode(Player::P2, st);
      Trajectory traj;
      while (!outcome(st).over()) {
        Assignments x = a1->act(st, traj), y = a2->act(st, traj);
        traj.record(st, x, y);
        x.insert(y.begin(), y.end());
        step_inplace(st, x);
      }
      Recognized rec = recognize(traj.extract().of(Player::P2));
      if (rec.strategy.aggression == (truth == 1)) aggr_correct[truth]++;
      if (rec.strategy.economy == gt->economy) dim_hits[0][truth]++;
      if (rec.strategy.barracks == gt->barracks) dim_hits[1][truth]++;
      if (rec.strategy.composition == gt->composition) dim_hits[2][truth]++;
      if (rec.strategy.aggression == gt->aggression) dim_hits[3][truth]++;
      if (rec.strategy.attack_target == gt->attack_target) dim_hits[4][truth]++;
      if (rec.strategy.defense == gt->defense) dim_hits[5][truth]++;
    }
  }

  std::ofstream out(ctx.out / "recognition_accuracy.csv");
  out << "dimension,accuracy_vs_passive,accuracy_vs_aggressive\n";
  const char* names[6] = {"economy", "barracks", "composition", "aggression", "attack_target",
                          "defense"};
  for (int dim = 0; dim < 6; ++dim)
    out << names[dim] << "," << dim_hits[dim][0] / 50.0 << "," << dim_hits[dim][1] / 50.0 << "\n";

  std::ostringstream d;
  d << "aggression recovered " << aggr_correct[0] << "/50 passive, " << aggr_correct[1]
    << "/50 aggressive (need >= 40 each)";
  return {aggr_correct[0] >= 40 && aggr_correct[1] >= 40, d.str()};
}

// ---- criterion 9: engine invariants --------------------------------------------

Gate criterion9(Context&) {
  auto t0 = std::chrono::steady_clock::now();
  auto signature = [](const GameState& s) {
    std::vector<std::tuple<int, int, int, int, int, int, int>> sig;
    for (const Unit& u : s.units)
      sig.emplace_back(static_cast<int>(u.owner), static_cast<int>(u.type), u.pos.x, u.pos.y,
                       u.hp, u.carrying, u.resource);
    std::sort(sig.begin(), sig.end());
    return sig;
  };

  int episodes = 1000;
  long violations = 0;
  std::string first_violation;
  auto note = [&](const std::string& what) {
    violations++;
    if (first_violation.empty()) first_violation = what;
  };

  for (int ep = 0; ep < episodes; ++ep) {
    std::uint64_t seed = static_cast<std::uint64_t>(ep) * 977 + 13;
    GameState cur = parse_text_map(
        "Mwb...\n"
        "Mw....\n"
        "......\n"
        "......\n"
        "....WM\n"
        "...BWM\n",
        seed, 500, 10, 8);
    Rng rng(seed ^ 0xabcdefULL);
    int total0 = mineral_total(cur);

    // seat-mirrored replay for the determinism sample
    GameState replay = cur;
    bool check_replay = ep % 10 == 0;
    std::vector<Assignments> script;

    for (int t = 0; t < 60; ++t) {
      Assignments as;
      std::array<int, 2> ledger = cur.resources;
      for (const Unit& u : cur.units) {
        if (u.owner == Player::Neutral || !u.idle()) continue;
        auto acts = legal_actions(cur, u.id);
        AtomicAction pick = acts[rng.below(acts.size())];
        if (pick.kind == AtomicAction::Kind::Noop && acts.size() > 1)
          pick = acts[1 + rng.below(acts.size() - 1)];
        int& stock = ledger[seat_index(u.owner)];
        if (!action_legal(cur, u, pick, stock)) pick = AtomicAction::noop();
        if (pick.kind == AtomicAction::Kind::Produce)
          stock -= cur.stats.of(pick.produce_type).cost;
        as[u.id] = pick;
      }

      // rotation symmetry on conflict-free move/harvest-only assignments
      if (t == 30) {
        bool conflict_free = true;
        std::set<std::pair<int, int>> dests;
        for (const auto& [uid, act] : as) {
          if (act.kind == AtomicAction::Kind::Produce) conflict_free = false;
          if (act.kind == AtomicAction::Kind::Move) {
            Position dst = neighbor(cur.find_unit(uid)->pos, act.dir);
            if (!dests.insert({dst.x, dst.y}).second) conflict_free = false;
          }
        }
        for (const Unit& u : cur.units)
          if (u.busy && u.busy->remaining == 1) conflict_free = false;  // completions pending
        if (conflict_free) {
          GameState rot = rotate180(cur);
          Assignments ras;
          for (const auto& [uid, act] : as) {
            AtomicAction m = act;
            if (m.kind == AtomicAction::Kind::Move || m.kind == AtomicAction::Kind::Harvest ||
                m.kind == AtomicAction::Kind::Return)
              m.dir = opposite(m.dir);
            if (m.kind == AtomicAction::Kind::Attack)
              m.target = {cur.width - 1 - m.target.x, cur.height - 1 - m.target.y};
            ras[uid] = m;
          }
          GameState left = rotate180(step(cur, as));
          GameState right = step(rot, ras);
          if (signature(left) != signature(right)) note("rotation symmetry");
        }
      }

      if (check_replay) script.push_back(as);
      step_inplace(cur, as);

      std::set<std::pair<int, int>> cells;
      for (const Unit& u : cur.units) {
        if (u.hp <= 0) note("non-positive hp");
        if (!cells.insert({u.pos.x, u.pos.y}).second) note("occupancy");
      }
      if (mineral_total(cur) != total0) note("mineral conservation");
      if (outcome(cur).over()) break;
    }

    if (check_replay) {
      for (const Assignments& as : script) step_inplace(replay, as);
      if (!(replay == cur)) note("determinism");
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream d;
  d << episodes << " episodes, " << violations << " violations"
    << (first_violation.empty() ? "" : " (first: " + first_violation + ")") << ", " << secs
    << "s (need < 300s)";
  return {violations == 0 && secs < 300.0, d.str()};
}

// ---- criterion 10: self-play calibration ---------------------------------------

Gate criterion10(Context& ctx) {
  TournamentOptions opt;
  opt.workers = 0;
  Rng prng(31337);
  std::ostringstream d;
  bool ok = true;
  for (int k = 0; k < 5; ++k) {
    const Strategy& s = ctx.pool[prng.below(ctx.pool.size())];
    double r = run_battle_pair(s, s, 50, 60000 + 100 * static_cast<std::uint64_t>(k), opt);
    if (r < 0.35 || r > 0.65) ok = false;
    d << (k ? ", " : "") << r;
  }
  d << " (each needs [0.35, 0.65], 50 seeds)";
  return {ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  ctx.cli = "./sap";
  ctx.out = "acceptance_out";
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) ctx.cli = argv[++i];
    else if (a == "--out-dir" && i + 1 < argc) ctx.out = argv[++i];
    else if (a == "--only" && i + 1 < argc) {
      std::istringstream is(argv[++i]);
      std::string tok;
      while (std::getline(is, tok, ',')) only.insert(std::atoi(tok.c_str()));
    }
  }
  fs::create_directories(ctx.out);

  struct Entry {
    int id;
    const char* name;
    Gate (*fn)(Context&);
  };
  std::vector<Entry> gates{
      {1, "pipeline-scale reproduction", criterion1},
      {2, "gradient correctness", criterion2},
      {3, "network learnability", criterion3},
      {4, "best-response exactness", criterion4},
      {5, "searched-response efficacy", criterion5},
      {6, "closed-loop dominance", criterion6},
      {7, "ablation ordering", criterion7},
      {8, "recognition accuracy", criterion8},
      {9, "engine invariants", criterion9},
      {10, "self-play calibration", criterion10},
  };

  // later gates consume the pipeline artifacts; when --only skips the early
  // gates, run them silently for their side effects
  if (!only.empty()) {
    bool needs_pipeline = false, needs_net = false;
    for (int id : only) {
      if (id >= 3 || id == 1) needs_pipeline = true;
      if (id >= 4) needs_net = true;
    }
    if (needs_pipeline && only.count(1) == 0) {
      Gate setup = criterion1(ctx);
      if (!setup.pass) {
        std::cout << "[FAIL] pipeline setup: " << setup.detail << "\n";
        return 1;
      }
    }
    if (needs_net && only.count(3) == 0) criterion3(ctx);
  }

  int failures = 0;
  for (const Entry& e : gates) {
    if (!only.empty() && only.count(e.id) == 0) continue;
    Gate g = e.fn(ctx);
    std::cout << (g.pass ? "[PASS]" : "[FAIL]") << " C" << e.id << " " << e.name << ": "
              << g.detail << "\n"
              << std::flush;
    if (!g.pass) failures++;
  }
  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: " + std::to_string(failures))
            << "\n";
  return failures;
}
