#pragma once

#include <optional>
#include <vector>

#include "sap/engine.hpp"

namespace sap {

// Shortest 4-connected path from `from` to `to`, treating every occupied cell
// as an obstacle except `to` itself (so units can path at an occupied target
// and stop adjacent). BFS expands N,E,S,W, which fixes tie-breaking.
// Returns nullopt when unreachable, an empty path when from == to.
inline std::optional<std::vector<Dir>> pathfind(const GameState& s, Position from, Position to) {
  if (!s.in_bounds(from) || !s.in_bounds(to)) return std::nullopt;
  if (from == to) return std::vector<Dir>{};

  const int w = s.width, h = s.height;
  auto idx = [w](Position p) { return p.y * w + p.x; };

  std::vector<char> blocked(static_cast<std::size_t>(w * h), 0);
  for (const Unit& u : s.units) blocked[static_cast<std::size_t>(idx(u.pos))] = 1;
  blocked[static_cast<std::size_t>(idx(to))] = 0;
  blocked[static_cast<std::size_t>(idx(from))] = 0;

  std::vector<std::int8_t> came(static_cast<std::size_t>(w * h), -1);
  std::vector<int> queue;
  queue.reserve(static_cast<std::size_t>(w * h));
  queue.push_back(idx(from));
  came[static_cast<std::size_t>(idx(from))] = 4;  // sentinel: start

  for (std::size_t head = 0; head < queue.size(); ++head) {
    int cur = queue[head];
    Position p{cur % w, cur / w};
    if (p == to) break;
    for (std::size_t di = 0; di < all_dirs.size(); ++di) {
      Position n = neighbor(p, all_dirs[di]);
      if (!s.in_bounds(n)) continue;
      int ni = idx(n);
      if (blocked[static_cast<std::size_t>(ni)] || came[static_cast<std::size_t>(ni)] != -1)
        continue;
      came[static_cast<std::size_t>(ni)] = static_cast<std::int8_t>(di);
      queue.push_back(ni);
    }
  }

  if (came[static_cast<std::size_t>(idx(to))] == -1) return std::nullopt;

  std::vector<Dir> path;
  Position p = to;
  while (!(p == from)) {
    Dir d = all_dirs[static_cast<std::size_t>(came[static_cast<std::size_t>(idx(p))])];
    path.push_back(d);
    p = neighbor(p, opposite(d));
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// Path length in steps, or nullopt when unreachable.
inline std::optional<int> path_length(const GameState& s, Position from, Position to) {
  auto p = pathfind(s, from, to);
  if (!p) return std::nullopt;
  return static_cast<int>(p->size());
}

}  // namespace sap
