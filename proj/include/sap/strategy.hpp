#pragma once

#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sap/core.hpp"

namespace sap {

enum class Economy : std::uint8_t { Low, Med, High };
enum class BarracksTiming : std::uint8_t { None, Early, Late };
enum class Composition : std::uint8_t { Worker, Light, Heavy, Ranged, Mixed };
enum class AttackTarget : std::uint8_t { Closest, Workers, Buildings };
enum class DefensePosture : std::uint8_t { None, Perimeter, Full };

inline const char* to_string(Economy v) {
  switch (v) { case Economy::Low: return "low"; case Economy::Med: return "med"; default: return "high"; }
}
inline const char* to_string(BarracksTiming v) {
  switch (v) { case BarracksTiming::None: return "none"; case BarracksTiming::Early: return "early"; default: return "late"; }
}
inline const char* to_string(Composition v) {
  switch (v) {
    case Composition::Worker: return "worker";
    case Composition::Light: return "light";
    case Composition::Heavy: return "heavy";
    case Composition::Ranged: return "ranged";
    default: return "mixed";
  }
}
inline const char* to_string(AttackTarget v) {
  switch (v) { case AttackTarget::Closest: return "closest"; case AttackTarget::Workers: return "workers"; default: return "buildings"; }
}
inline const char* to_string(DefensePosture v) {
  switch (v) { case DefensePosture::None: return "none"; case DefensePosture::Perimeter: return "perimeter"; default: return "full"; }
}

// One point in the explicit strategy space: six orthogonal play-style
// dimensions, each with a small finite domain. The one cross-dimension
// constraint: fielding barracks units requires a barracks timing.
struct Strategy {
  Economy economy = Economy::Low;
  BarracksTiming barracks = BarracksTiming::None;
  Composition composition = Composition::Worker;
  bool aggression = false;
  AttackTarget attack_target = AttackTarget::Closest;
  DefensePosture defense = DefensePosture::None;

  bool valid() const {
    return composition == Composition::Worker || barracks != BarracksTiming::None;
  }

  bool operator==(const Strategy&) const = default;
  auto operator<=>(const Strategy&) const = default;
};

inline const Strategy k_neutral_strategy{};  // {low, none, worker, false, closest, none}

// Numeric form: 14 slots.
//   [0]      economy ordinal          {0, 0.5, 1}
//   [1..3]   barracks one-hot         (none, early, late)
//   [4..8]   composition one-hot      (worker, light, heavy, ranged, mixed)
//   [9]      aggression               {0, 1}
//   [10..12] attack_target one-hot    (closest, workers, buildings)
//   [13]     defense ordinal          {0, 0.5, 1}
using StrategyVector = std::array<double, 14>;

inline constexpr std::size_t k_strategy_dim = 14;

inline StrategyVector encode(const Strategy& s) {
  StrategyVector v{};
  v[0] = 0.5 * static_cast<int>(s.economy);
  v[1 + static_cast<int>(s.barracks)] = 1.0;
  v[4 + static_cast<int>(s.composition)] = 1.0;
  v[9] = s.aggression ? 1.0 : 0.0;
  v[10 + static_cast<int>(s.attack_target)] = 1.0;
  v[13] = 0.5 * static_cast<int>(s.defense);
  return v;
}

namespace detail {

inline int ordinal_index(double x) {
  if (x == 0.0) return 0;
  if (x == 0.5) return 1;
  if (x == 1.0) return 2;
  return -1;
}

inline int one_hot_index(const StrategyVector& v, int begin, int count) {
  int idx = -1;
  for (int i = 0; i < count; ++i) {
    double x = v[static_cast<std::size_t>(begin + i)];
    if (x == 1.0) {
      if (idx != -1) return -1;  // two hot slots
      idx = i;
    } else if (x != 0.0) {
      return -1;
    }
  }
  return idx;
}

}  // namespace detail

inline Strategy decode(const StrategyVector& v) {
  int eco = detail::ordinal_index(v[0]);
  int bar = detail::one_hot_index(v, 1, 3);
  int comp = detail::one_hot_index(v, 4, 5);
  int tgt = detail::one_hot_index(v, 10, 3);
  int def = detail::ordinal_index(v[13]);
  bool aggr;
  if (v[9] == 0.0) aggr = false;
  else if (v[9] == 1.0) aggr = true;
  else throw std::invalid_argument("decode: aggression slot must be 0 or 1");
  if (eco < 0) throw std::invalid_argument("decode: bad economy ordinal");
  if (bar < 0) throw std::invalid_argument("decode: bad barracks one-hot");
  if (comp < 0) throw std::invalid_argument("decode: bad composition one-hot");
  if (tgt < 0) throw std::invalid_argument("decode: bad attack_target one-hot");
  if (def < 0) throw std::invalid_argument("decode: bad defense ordinal");
  Strategy s;
  s.economy = static_cast<Economy>(eco);
  s.barracks = static_cast<BarracksTiming>(bar);
  s.composition = static_cast<Composition>(comp);
  s.aggression = aggr;
  s.attack_target = static_cast<AttackTarget>(tgt);
  s.defense = static_cast<DefensePosture>(def);
  if (!s.valid()) throw std::invalid_argument("decode: composition requires a barracks");
  return s;
}

// Every valid strategy exactly once, lexicographic by field order
// (economy, barracks, composition, aggression, attack_target, defense).
inline const std::vector<Strategy>& enumerate_space() {
  static const std::vector<Strategy> space = [] {
    std::vector<Strategy> out;
    for (int e = 0; e < 3; ++e)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 5; ++c)
          for (int a = 0; a < 2; ++a)
            for (int t = 0; t < 3; ++t)
              for (int d = 0; d < 3; ++d) {
                Strategy s;
                s.economy = static_cast<Economy>(e);
                s.barracks = static_cast<BarracksTiming>(b);
                s.composition = static_cast<Composition>(c);
                s.aggression = a == 1;
                s.attack_target = static_cast<AttackTarget>(t);
                s.defense = static_cast<DefensePosture>(d);
                if (s.valid()) out.push_back(s);
              }
    return out;
  }();
  return space;
}

inline std::string strategy_to_string(const Strategy& s) {
  std::ostringstream os;
  os << "economy=" << to_string(s.economy) << ",barracks=" << to_string(s.barracks)
     << ",composition=" << to_string(s.composition)
     << ",aggression=" << (s.aggression ? "true" : "false")
     << ",attack_target=" << to_string(s.attack_target) << ",defense=" << to_string(s.defense);
  return os.str();
}

inline std::optional<Strategy> strategy_from_string(const std::string& text) {
  Strategy s;
  std::istringstream is(text);
  std::string tok;
  int seen = 0;
  while (std::getline(is, tok, ',')) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) return std::nullopt;
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "economy") {
      if (val == "low") s.economy = Economy::Low;
      else if (val == "med") s.economy = Economy::Med;
      else if (val == "high") s.economy = Economy::High;
      else return std::nullopt;
    } else if (key == "barracks") {
      if (val == "none") s.barracks = BarracksTiming::None;
      else if (val == "early") s.barracks = BarracksTiming::Early;
      else if (val == "late") s.barracks = BarracksTiming::Late;
      else return std::nullopt;
    } else if (key == "composition") {
      if (val == "worker") s.composition = Composition::Worker;
      else if (val == "light") s.composition = Composition::Light;
      else if (val == "heavy") s.composition = Composition::Heavy;
      else if (val == "ranged") s.composition = Composition::Ranged;
      else if (val == "mixed") s.composition = Composition::Mixed;
      else return std::nullopt;
    } else if (key == "aggression") {
      if (val == "true") s.aggression = true;
      else if (val == "false") s.aggression = false;
      else return std::nullopt;
    } else if (key == "attack_target") {
      if (val == "closest") s.attack_target = AttackTarget::Closest;
      else if (val == "workers") s.attack_target = AttackTarget::Workers;
      else if (val == "buildings") s.attack_target = AttackTarget::Buildings;
      else return std::nullopt;
    } else if (key == "defense") {
      if (val == "none") s.defense = DefensePosture::None;
      else if (val == "perimeter") s.defense = DefensePosture::Perimeter;
      else if (val == "full") s.defense = DefensePosture::Full;
      else return std::nullopt;
    } else {
      return std::nullopt;
    }
    ++seen;
  }
  if (seen != 6 || !s.valid()) return std::nullopt;
  return s;
}

// --- library generation -------------------------------------------------------

enum class Provenance : std::uint8_t { Sampled, GeneratedByPort };

inline const char* to_string(Provenance p) {
  return p == Provenance::Sampled ? "sampled" : "generated-by-port";
}

struct LibraryEntry {
  Strategy strategy;
  Provenance provenance = Provenance::Sampled;

  bool operator==(const LibraryEntry&) const = default;
};

struct StrategyLibrary {
  std::vector<LibraryEntry> entries;

  bool contains(const Strategy& s) const {
    for (const LibraryEntry& e : entries)
      if (encode(e.strategy) == encode(s)) return true;
    return false;
  }

  std::vector<Strategy> strategies() const {
    std::vector<Strategy> out;
    out.reserve(entries.size());
    for (const LibraryEntry& e : entries) out.push_back(e.strategy);
    return out;
  }

  std::size_t size() const { return entries.size(); }
};

// A strategy source draws one candidate given the already-accepted prefix.
// The default source samples the space uniformly; an adapter backed by a
// text-generation service plugs in behind the same signature.
struct StrategySource {
  std::function<std::optional<Strategy>(Rng&, const std::vector<Strategy>&)> draw;
  Provenance provenance = Provenance::Sampled;
};

inline StrategySource uniform_strategy_source() {
  StrategySource src;
  src.provenance = Provenance::Sampled;
  src.draw = [](Rng& rng, const std::vector<Strategy>&) -> std::optional<Strategy> {
    const auto& space = enumerate_space();
    return space[static_cast<std::size_t>(rng.below(space.size()))];
  };
  return src;
}

// Draw K unique strategies. Each candidate is rejected while it duplicates an
// accepted entry; after `max_retries` rejections the slot falls back to a
// uniform draw over the still-unused part of the space.
inline StrategyLibrary generate_library(int k, const StrategySource& source, std::uint64_t seed,
                                        int max_retries = 64) {
  const auto& space = enumerate_space();
  if (k < 0 || static_cast<std::size_t>(k) > space.size())
    throw std::invalid_argument("generate_library: K exceeds the strategy space");

  StrategyLibrary lib;
  Rng rng(seed);
  std::set<StrategyVector> used;
  std::vector<Strategy> accepted;

  for (int i = 0; i < k; ++i) {
    std::optional<Strategy> pick;
    Provenance prov = source.provenance;
    for (int attempt = 0; attempt < max_retries; ++attempt) {
      std::optional<Strategy> cand = source.draw(rng, accepted);
      if (!cand || !cand->valid()) continue;
      if (used.count(encode(*cand)) != 0) continue;
      pick = cand;
      break;
    }
    if (!pick) {
      // uniform over unused strategies
      std::vector<const Strategy*> unused;
      for (const Strategy& s : space)
        if (used.count(encode(s)) == 0) unused.push_back(&s);
      pick = *unused[static_cast<std::size_t>(rng.below(unused.size()))];
      prov = Provenance::Sampled;
    }
    used.insert(encode(*pick));
    accepted.push_back(*pick);
    lib.entries.push_back({*pick, prov});
  }
  return lib;
}

struct LibrarySplit {
  StrategyLibrary seen;
  StrategyLibrary unseen;
};

inline LibrarySplit split_seen_unseen(const StrategyLibrary& lib, int n_seen, std::uint64_t seed) {
  if (n_seen < 0 || static_cast<std::size_t>(n_seen) > lib.size())
    throw std::invalid_argument("split_seen_unseen: n_seen out of range");
  std::vector<std::size_t> order(lib.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  LibrarySplit out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i < static_cast<std::size_t>(n_seen))
      out.seen.entries.push_back(lib.entries[order[i]]);
    else
      out.unseen.entries.push_back(lib.entries[order[i]]);
  }
  return out;
}

}  // namespace sap
