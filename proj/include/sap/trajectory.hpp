#pragma once

#include <deque>
#include <optional>

#include "sap/engine.hpp"

namespace sap {

// Bounded digest of one player's behavior over a match. Fixed size no matter
// how long the trajectory runs; the attack position sample is capped.
struct PlayerSummary {
  int harvest_count = 0;
  int return_count = 0;
  int attack_count = 0;
  std::array<int, 7> produce_count{};  // by produced unit type
  std::optional<int> barracks_completed_tick;
  std::vector<Position> attack_issue_positions;  // first k_attack_pos_cap only
  int attacks_in_own_half = 0;
  int attacks_in_enemy_half = 0;
  std::array<int, 7> victim_type_count{};  // unit type at the attacked cell
  double own_half_fraction = 0.0;          // tick-weighted, mobile units
  double enemy_half_fraction = 0.0;
  double mean_army_distance_to_enemy_base = 0.0;
  int ticks_observed = 0;

  int produced(UnitType t) const { return produce_count[static_cast<std::size_t>(t)]; }
};

inline constexpr std::size_t k_attack_pos_cap = 32;

struct TrajectorySummary {
  std::array<PlayerSummary, 2> players;
  int ticks = 0;

  const PlayerSummary& of(Player p) const { return players[static_cast<std::size_t>(seat_index(p))]; }
};

// Halves split along the main anti-diagonal; P1 owns the top-left side.
inline bool in_enemy_half(const GameState& s, Player p, Position pos) {
  int mid = (s.width + s.height - 2) / 2;
  return p == Player::P1 ? pos.x + pos.y > mid : pos.x + pos.y < mid;
}

struct TrajectoryTick {
  int tick = 0;
  std::array<Assignments, 2> issued;
};

// Issued-action record of both seats plus incrementally maintained summary
// counters, so extraction stays O(1) in trajectory length. A short ring of
// recent snapshots is kept for offline inspection.
class Trajectory {
 public:
  void record(const GameState& pre_state, const Assignments& p1_issued,
              const Assignments& p2_issued) {
    if (pre_state.tick <= last_tick_)
      throw std::invalid_argument("trajectory record: tick not increasing");
    last_tick_ = pre_state.tick;

    TrajectoryTick rec;
    rec.tick = pre_state.tick;
    rec.issued = {p1_issued, p2_issued};
    ticks_.push_back(rec);

    for (Player p : {Player::P1, Player::P2}) {
      PlayerSummary& ps = acc_[static_cast<std::size_t>(seat_index(p))];
      const Assignments& issued = rec.issued[static_cast<std::size_t>(seat_index(p))];
      for (const auto& [uid, action] : issued) {
        const Unit* u = pre_state.find_unit(uid);
        switch (action.kind) {
          case AtomicAction::Kind::Harvest: ps.harvest_count++; break;
          case AtomicAction::Kind::Return: ps.return_count++; break;
          case AtomicAction::Kind::Produce:
            ps.produce_count[static_cast<std::size_t>(action.produce_type)]++;
            break;
          case AtomicAction::Kind::Attack: {
            ps.attack_count++;
            if (u != nullptr) {
              if (ps.attack_issue_positions.size() < k_attack_pos_cap)
                ps.attack_issue_positions.push_back(u->pos);
              if (in_enemy_half(pre_state, p, u->pos)) ps.attacks_in_enemy_half++;
              else ps.attacks_in_own_half++;
            }
            const Unit* victim = pre_state.unit_at(action.target);
            if (victim != nullptr)
              ps.victim_type_count[static_cast<std::size_t>(victim->type)]++;
            break;
          }
          default: break;
        }
      }

      const Unit* enemy_base = nullptr;
      for (const Unit& u : pre_state.units)
        if (u.owner == enemy_of(p) && u.type == UnitType::Base) enemy_base = &u;
      bool has_barracks = false;
      for (const Unit& u : pre_state.units) {
        if (u.owner != p) continue;
        if (u.type == UnitType::Barracks) has_barracks = true;
        if (!is_mobile(u.type)) continue;
        if (in_enemy_half(pre_state, p, u.pos)) enemy_half_ticks_[seat_index(p)]++;
        else own_half_ticks_[seat_index(p)]++;
        if (enemy_base != nullptr) {
          army_dist_sum_[seat_index(p)] += manhattan(u.pos, enemy_base->pos);
          army_dist_n_[seat_index(p)]++;
        }
      }
      if (has_barracks && !ps.barracks_completed_tick)
        ps.barracks_completed_tick = pre_state.tick;
    }

    snapshots_.push_back(pre_state);
    if (snapshots_.size() > k_snapshot_ring) snapshots_.pop_front();
  }

  TrajectorySummary extract() const {
    TrajectorySummary out;
    out.ticks = size();
    for (int seat = 0; seat < 2; ++seat) {
      PlayerSummary ps = acc_[static_cast<std::size_t>(seat)];
      long occupied = own_half_ticks_[seat] + enemy_half_ticks_[seat];
      if (occupied > 0) {
        ps.own_half_fraction = static_cast<double>(own_half_ticks_[seat]) / static_cast<double>(occupied);
        ps.enemy_half_fraction =
            static_cast<double>(enemy_half_ticks_[seat]) / static_cast<double>(occupied);
      }
      if (army_dist_n_[seat] > 0)
        ps.mean_army_distance_to_enemy_base =
            army_dist_sum_[seat] / static_cast<double>(army_dist_n_[seat]);
      ps.ticks_observed = out.ticks;
      out.players[static_cast<std::size_t>(seat)] = ps;
    }
    return out;
  }

  int size() const { return static_cast<int>(ticks_.size()); }
  int last_tick() const { return last_tick_; }
  const std::vector<TrajectoryTick>& ticks() const { return ticks_; }
  const std::deque<GameState>& snapshots() const { return snapshots_; }

  static constexpr std::size_t k_snapshot_ring = 4;

 private:
  int last_tick_ = -1;
  std::vector<TrajectoryTick> ticks_;
  std::array<PlayerSummary, 2> acc_{};
  std::array<long, 2> own_half_ticks_{};
  std::array<long, 2> enemy_half_ticks_{};
  std::array<double, 2> army_dist_sum_{};
  std::array<long, 2> army_dist_n_{};
  std::deque<GameState> snapshots_;
};

// free-function forms
inline void record(Trajectory& traj, const GameState& pre_state, const Assignments& p1,
                   const Assignments& p2) {
  traj.record(pre_state, p1, p2);
}

inline TrajectorySummary extract(const Trajectory& traj) { return traj.extract(); }

}  // namespace sap
