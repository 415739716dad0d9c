#include "femto/game.hpp"

#include <limits>
#include <string>

#include "femto/error.hpp"

namespace femto {

std::vector<std::size_t> Game::dims() const {
  std::vector<std::size_t> d;
  d.reserve(strategies.size());
  for (const auto& s : strategies) d.push_back(s.size());
  return d;
}

std::uint64_t Game::profile_count() const {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  for (const auto& s : strategies) {
    const std::uint64_t k = s.size();
    total = total > kMax / k ? kMax : total * k;
  }
  return total;
}

std::vector<double> Game::strategy_values(const Profile& profile) const {
  std::vector<double> out;
  out.reserve(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) out.push_back(strategies[i][profile[i]]);
  return out;
}

std::vector<BandwidthRequest> Game::requests(const Profile& profile) const {
  if (profile.size() != srcs.size()) {
    throw ValidationError("profile has " + std::to_string(profile.size()) +
                          " entries for " + std::to_string(srcs.size()) + " SRCs");
  }
  std::vector<BandwidthRequest> out;
  out.reserve(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i] >= strategies[i].size()) {
      throw ValidationError("strategy index " + std::to_string(profile[i]) +
                            " out of range for SRC " + std::to_string(i));
    }
    out.push_back(request_from_strategy(srcs[i], strategies[i][profile[i]], bounds, spc.delta));
  }
  return out;
}

double default_grid_step(const QosBounds& bounds) { return (bounds.bw_max - bounds.bw_min) / 10.0; }

Game make_game(const SpcProfile& spc, std::vector<SrcProfile> srcs, const QosBounds& bounds,
               double grid_step, ValueMaps maps, AllocationLimits limits) {
  validate(spc);
  if (srcs.empty()) throw ValidationError("at least one SRC is required");
  Game game;
  game.spc = spc;
  game.bounds = bounds;
  game.grid_step = grid_step > 0.0 ? grid_step : default_grid_step(bounds);
  if (!(game.grid_step > 0.0)) {
    throw ValidationError("grid_step must be positive (bw_max equals bw_min?)");
  }
  game.maps = maps;
  game.limits = std::move(limits);
  game.strategies.reserve(srcs.size());
  for (std::size_t i = 0; i < srcs.size(); ++i) {
    try {
      game.strategies.push_back(build_strategy_set(srcs[i], i));
    } catch (const ValidationError& e) {
      throw ValidationError("srcs[" + std::to_string(i) + "]: " + e.what());
    }
  }
  game.srcs = std::move(srcs);
  return game;
}

std::uint64_t profile_rank(const Profile& profile, std::span<const std::size_t> dims) {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) r = r * dims[i] + profile[i];
  return r;
}

Profile profile_unrank(std::uint64_t rank, std::span<const std::size_t> dims) {
  Profile p(dims.size());
  for (std::size_t i = dims.size(); i-- > 0;) {
    p[i] = static_cast<std::size_t>(rank % dims[i]);
    rank /= dims[i];
  }
  return p;
}

ProfileOutcome evaluate_profile(const Game& game, const Profile& profile) {
  const auto reqs = game.requests(profile);
  ProfileOutcome out;
  out.sol = solve_allocation(reqs, game.spc, game.grid_step, game.limits);
  out.utilities.reserve(game.players());
  for (std::size_t i = 0; i < game.players(); ++i) {
    out.utilities.push_back(
        src_utility(i, out.sol, game.srcs[i], game.bounds, game.spc.delta, game.maps));
  }
  return out;
}

const ProfileOutcome& ProfileCache::get(const Profile& profile) {
  const auto key = profile_rank(profile, dims_);
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    it = cache_.emplace(key, std::make_unique<ProfileOutcome>(evaluate_profile(*game_, profile)))
             .first;
  }
  return *it->second;
}

}  // namespace femto
