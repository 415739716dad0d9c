#pragma once

// The game restricted to SRCs: fixed SPC split, per-SRC strategy sets, and the
// map from a joint pure profile to sol(Pi) and the utility vector.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "femto/allocator.hpp"
#include "femto/model.hpp"

namespace femto {

/// Joint pure profile as one strategy index per SRC.
using Profile = std::vector<std::size_t>;

struct Game {
  SpcProfile spc;
  std::vector<SrcProfile> srcs;
  QosBounds bounds;
  double grid_step = 0.0;
  ValueMaps maps;
  AllocationLimits limits;
  std::vector<StrategySet> strategies;  // one per SRC

  std::size_t players() const { return srcs.size(); }
  std::vector<std::size_t> dims() const;
  std::uint64_t profile_count() const;  // saturating

  /// Strategy values (s_1..s_N) of a profile.
  std::vector<double> strategy_values(const Profile& profile) const;
  std::vector<BandwidthRequest> requests(const Profile& profile) const;
};

/// Builds strategy sets and validates everything. grid_step <= 0 selects the
/// default (bw_max - bw_min) / 10.
Game make_game(const SpcProfile& spc, std::vector<SrcProfile> srcs, const QosBounds& bounds,
               double grid_step = 0.0, ValueMaps maps = {}, AllocationLimits limits = {});

double default_grid_step(const QosBounds& bounds);

/// Lexicographic rank of a profile (first SRC most significant).
std::uint64_t profile_rank(const Profile& profile, std::span<const std::size_t> dims);
Profile profile_unrank(std::uint64_t rank, std::span<const std::size_t> dims);

struct ProfileOutcome {
  SolutionSet sol;
  std::vector<Utility> utilities;  // U_i(Pi), one per SRC
};

ProfileOutcome evaluate_profile(const Game& game, const Profile& profile);

/// Memoizing front end over evaluate_profile. Not thread-safe; give each
/// worker its own instance.
class ProfileCache {
 public:
  explicit ProfileCache(const Game& game) : game_(&game), dims_(game.dims()) {}

  const ProfileOutcome& get(const Profile& profile);
  std::size_t size() const { return cache_.size(); }

 private:
  const Game* game_;
  std::vector<std::size_t> dims_;
  std::unordered_map<std::uint64_t, std::unique_ptr<ProfileOutcome>> cache_;
};

}  // namespace femto
