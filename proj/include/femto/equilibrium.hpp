#pragma once

// Exhaustive oracle for the game restricted to SRCs: the full payoff matrix,
// every pure Nash equilibrium, and best-response dynamics.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "femto/game.hpp"

namespace femto {

/// Utilities are compared with this slack when testing for a strict improvement.
inline constexpr double kImprovementTolerance = 1e-12;

class PayoffMatrix {
 public:
  PayoffMatrix() = default;
  PayoffMatrix(std::vector<std::size_t> dims, std::vector<double> utilities);

  /// Fills every entry from `utility(profile)`, which returns one value per player.
  static PayoffMatrix tabulate(std::vector<std::size_t> dims,
                               const std::function<std::vector<double>(const Profile&)>& utility);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t players() const { return dims_.size(); }
  std::uint64_t profiles() const { return profiles_; }
  double utility(std::uint64_t rank, std::size_t player) const {
    return utilities_[rank * players() + player];
  }
  double utility(const Profile& profile, std::size_t player) const;
  std::uint64_t rank(const Profile& profile) const { return profile_rank(profile, dims_); }
  Profile profile(std::uint64_t rank) const { return profile_unrank(rank, dims_); }

 private:
  std::vector<std::size_t> dims_;
  std::vector<double> utilities_;  // rank-major, player-minor
  std::uint64_t profiles_ = 0;
};

/// U_i(Pi) for every joint profile, in lexicographic profile order. Throws
/// ResourceError when the profile count exceeds `max_profiles`.
PayoffMatrix build_payoff_matrix(const Game& game, std::uint64_t max_profiles = 1'000'000,
                                 unsigned threads = 0);

/// True when no player gains more than kImprovementTolerance by deviating alone.
bool is_pure_ne(const PayoffMatrix& matrix, const Profile& profile);

/// Every pure NE, lexicographically ordered.
std::vector<Profile> find_pure_ne(const PayoffMatrix& matrix);

/// Same test as is_pure_ne but evaluated on demand through `cache`, for games
/// too large to tabulate.
bool certify_pure_ne(const Game& game, const Profile& profile, ProfileCache& cache);

struct BrdStep {
  Profile from;
  std::size_t player = 0;
  std::size_t old_strategy = 0;
  std::size_t new_strategy = 0;
};

struct BrdResult {
  std::vector<BrdStep> trace;
  Profile terminal;
};

/// Lowest-indexed improving player moves to its best response (lowest index
/// among ties) until nobody can improve. A revisited profile or more than
/// `max_steps` moves throws PropertyViolation.
BrdResult best_response_dynamics(const PayoffMatrix& matrix, const Profile& start,
                                 std::size_t max_steps = 100'000);

struct NeReport {
  std::vector<Profile> pure_ne;
  std::vector<BrdStep> brd_trace;
  Profile terminal;
};

NeReport analyze_equilibria(const PayoffMatrix& matrix, const Profile& start);

}  // namespace femto
