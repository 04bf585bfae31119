#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace sap {

// Deterministic PRNG (splitmix64). We avoid std distributions because their
// output is implementation-defined; every draw here is bit-stable across
// platforms and compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  // Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t state() const { return state_; }
  void set_state(std::uint64_t s) { state_ = s; }

 private:
  std::uint64_t state_;
};

enum class Dir : std::uint8_t { N, E, S, W };

inline constexpr std::array<Dir, 4> all_dirs = {Dir::N, Dir::E, Dir::S, Dir::W};

inline int dx_of(Dir d) {
  switch (d) {
    case Dir::E: return 1;
    case Dir::W: return -1;
    default: return 0;
  }
}

inline int dy_of(Dir d) {
  switch (d) {
    case Dir::N: return -1;
    case Dir::S: return 1;
    default: return 0;
  }
}

inline Dir opposite(Dir d) {
  switch (d) {
    case Dir::N: return Dir::S;
    case Dir::S: return Dir::N;
    case Dir::E: return Dir::W;
    default: return Dir::E;
  }
}

inline const char* to_string(Dir d) {
  switch (d) {
    case Dir::N: return "N";
    case Dir::E: return "E";
    case Dir::S: return "S";
    default: return "W";
  }
}

inline bool dir_from_string(const std::string& s, Dir& out) {
  if (s == "N") { out = Dir::N; return true; }
  if (s == "E") { out = Dir::E; return true; }
  if (s == "S") { out = Dir::S; return true; }
  if (s == "W") { out = Dir::W; return true; }
  return false;
}

struct Position {
  int x = 0;
  int y = 0;

  bool operator==(const Position&) const = default;
};

inline int manhattan(Position a, Position b) {
  int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
  int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
  return dx + dy;
}

inline int chebyshev(Position a, Position b) {
  int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
  int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
  return dx > dy ? dx : dy;
}

inline Position neighbor(Position p, Dir d) { return {p.x + dx_of(d), p.y + dy_of(d)}; }

}  // namespace sap
