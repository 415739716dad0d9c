#include "femto/equilibrium.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "femto/error.hpp"

namespace femto {

namespace {

std::string format_profile(const Profile& p) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
  os << ')';
  return os.str();
}

// Best alternative strategy for `player` holding the others fixed; lowest
// index wins ties.
std::size_t best_response(const PayoffMatrix& m, Profile p, std::size_t player) {
  std::size_t best = 0;
  double best_u = 0.0;
  for (std::size_t s = 0; s < m.dims()[player]; ++s) {
    p[player] = s;
    const double u = m.utility(p, player);
    if (s == 0 || u > best_u + kImprovementTolerance) {
      best = s;
      best_u = u;
    }
  }
  return best;
}

bool can_improve(const PayoffMatrix& m, const Profile& p, std::size_t player) {
  const double current = m.utility(p, player);
  Profile q = p;
  for (std::size_t s = 0; s < m.dims()[player]; ++s) {
    if (s == p[player]) continue;
    q[player] = s;
    if (m.utility(q, player) > current + kImprovementTolerance) return true;
  }
  return false;
}

}  // namespace

PayoffMatrix::PayoffMatrix(std::vector<std::size_t> dims, std::vector<double> utilities)
    : dims_(std::move(dims)), utilities_(std::move(utilities)) {
  profiles_ = 1;
  for (auto d : dims_) {
    if (d == 0) throw ValidationError("payoff matrix dimension must be positive");
    profiles_ *= d;
  }
  if (utilities_.size() != profiles_ * dims_.size()) {
    throw ValidationError("payoff matrix is incomplete");
  }
}

PayoffMatrix PayoffMatrix::tabulate(
    std::vector<std::size_t> dims,
    const std::function<std::vector<double>(const Profile&)>& utility) {
  std::uint64_t count = 1;
  for (auto d : dims) count *= d;
  std::vector<double> u;
  u.reserve(count * dims.size());
  for (std::uint64_t r = 0; r < count; ++r) {
    const auto row = utility(profile_unrank(r, dims));
    if (row.size() != dims.size()) throw ValidationError("utility row has the wrong length");
    u.insert(u.end(), row.begin(), row.end());
  }
  return PayoffMatrix(std::move(dims), std::move(u));
}

double PayoffMatrix::utility(const Profile& profile, std::size_t player) const {
  return utility(rank(profile), player);
}

PayoffMatrix build_payoff_matrix(const Game& game, std::uint64_t max_profiles, unsigned threads) {
  const auto count = game.profile_count();
  if (count > max_profiles) {
    std::ostringstream os;
    os << game.limits.label << ": payoff matrix of " << count
       << " profiles exceeds the cap of " << max_profiles;
    throw ResourceError(os.str());
  }
  const auto dims = game.dims();
  const std::size_t n = game.players();
  std::vector<double> utilities(count * n);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
  // Entries are independent; each worker owns a strided slice of ranks.
  auto work = [&](unsigned w) {
    for (std::uint64_t r = w; r < count; r += threads) {
      const auto out = evaluate_profile(game, profile_unrank(r, dims));
      for (std::size_t i = 0; i < n; ++i) utilities[r * n + i] = out.utilities[i].raw;
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          work(w);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }
  return PayoffMatrix(dims, std::move(utilities));
}

bool is_pure_ne(const PayoffMatrix& matrix, const Profile& profile) {
  for (std::size_t i = 0; i < matrix.players(); ++i) {
    if (can_improve(matrix, profile, i)) return false;
  }
  return true;
}

std::vector<Profile> find_pure_ne(const PayoffMatrix& matrix) {
  std::vector<Profile> out;
  for (std::uint64_t r = 0; r < matrix.profiles(); ++r) {
    auto p = matrix.profile(r);
    if (is_pure_ne(matrix, p)) out.push_back(std::move(p));
  }
  return out;
}

bool certify_pure_ne(const Game& game, const Profile& profile, ProfileCache& cache) {
  const auto base = cache.get(profile).utilities;
  for (std::size_t i = 0; i < game.players(); ++i) {
    Profile q = profile;
    for (std::size_t s = 0; s < game.strategies[i].size(); ++s) {
      if (s == profile[i]) continue;
      q[i] = s;
      if (cache.get(q).utilities[i].raw > base[i].raw + kImprovementTolerance) return false;
    }
  }
  return true;
}

BrdResult best_response_dynamics(const PayoffMatrix& matrix, const Profile& start,
                                 std::size_t max_steps) {
  if (start.size() != matrix.players()) throw ValidationError("start profile has the wrong size");
  BrdResult res;
  Profile p = start;
  std::unordered_set<std::uint64_t> seen{matrix.rank(p)};
  while (true) {
    std::size_t mover = matrix.players();
    for (std::size_t i = 0; i < matrix.players(); ++i) {
      if (can_improve(matrix, p, i)) {
        mover = i;
        break;
      }
    }
    if (mover == matrix.players()) break;
    if (res.trace.size() >= max_steps) {
      throw PropertyViolation("best-response dynamics exceeded " + std::to_string(max_steps) +
                              " steps");
    }
    const std::size_t next = best_response(matrix, p, mover);
    res.trace.push_back({p, mover, p[mover], next});
    p[mover] = next;
    if (!seen.insert(matrix.rank(p)).second) {
      throw PropertyViolation("best-response dynamics revisited profile " + format_profile(p) +
                              " after " + std::to_string(res.trace.size()) + " steps");
    }
  }
  res.terminal = std::move(p);
  return res;
}

NeReport analyze_equilibria(const PayoffMatrix& matrix, const Profile& start) {
  NeReport report;
  report.pure_ne = find_pure_ne(matrix);
  auto brd = best_response_dynamics(matrix, start);
  report.brd_trace = std::move(brd.trace);
  report.terminal = std::move(brd.terminal);
  return report;
}

}  // namespace femto
