#include "femto/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "femto/error.hpp"

namespace femto {

namespace {

double shape(double x, ResponseCurve curve) {
  x = std::clamp(x, 0.0, 1.0);
  switch (curve) {
    case ResponseCurve::linear:
      return x;
    case ResponseCurve::concave:
      return std::sqrt(x);
    case ResponseCurve::convex:
      return x * x;
  }
  return x;
}

double connection_weight(const AllocationAnswer& a, double delta) {
  return (a.green ? 1.0 : 0.0) + (a.yellow ? 1.0 - delta : 0.0);
}

struct Usage {
  double green = 0.0;
  double yellow = 0.0;
};

Usage usage_of(const AllocationAnswer& a) {
  return {a.green ? a.bw : 0.0, a.yellow ? a.bw : 0.0};
}

// Depth-first walk over the candidate product with capacity pruning and an
// optimistic bound on what the remaining SRCs can still add.
class Search {
 public:
  Search(std::span<const BandwidthRequest> requests, const SpcProfile& spc, double grid_step)
      : spc_(spc), n_(requests.size()) {
    candidates_.reserve(n_);
    values_.reserve(n_);
    for (const auto& r : requests) {
      auto cands = candidate_answers(r, grid_step);
      std::vector<double> vals;
      vals.reserve(cands.size());
      for (const auto& c : cands) vals.push_back(answer_value(c, spc));
      candidates_.push_back(std::move(cands));
      values_.push_back(std::move(vals));
    }
    suffix_best_.assign(n_ + 1, 0.0);
    for (std::size_t i = n_; i-- > 0;) {
      suffix_best_[i] =
          suffix_best_[i + 1] + *std::max_element(values_[i].begin(), values_[i].end());
    }
    coef_ = (spc.mu - spc.gamma) / spc.b_s;
    current_.answers.resize(n_);
  }

  double find_best() {
    mode_ = Mode::maximize;
    best_ = -std::numeric_limits<double>::infinity();
    walk(0, 0.0, {});
    return best_;
  }

  std::vector<AllocationConfig> collect_ties(double best) {
    mode_ = Mode::collect;
    best_ = best;
    ties_.clear();
    walk(0, 0.0, {});
    return std::move(ties_);
  }

 private:
  enum class Mode { maximize, collect };

  double upper_bound(std::size_t i, const Usage& used) const {
    double ub = suffix_best_[i];
    if (coef_ > 0.0) {
      const double green_left = std::max(0.0, spc_.green_capacity() - used.green);
      const double yellow_left = std::max(0.0, spc_.yellow_capacity() - used.yellow);
      ub = std::min(ub, coef_ * (green_left + (1.0 - spc_.delta) * yellow_left));
    }
    return ub;
  }

  void walk(std::size_t i, double partial, Usage used) {
    if (i == n_) {
      if (mode_ == Mode::maximize) {
        best_ = std::max(best_, partial);
      } else if (partial >= best_ - kTieTolerance) {
        ties_.push_back(current_);
      }
      return;
    }
    // The bound is summed in a different order than the walk, so leave room
    // for rounding before pruning.
    const double ub = upper_bound(i, used) + 1e-12;
    if (mode_ == Mode::maximize ? partial + ub < best_ : partial + ub < best_ - kTieTolerance) {
      return;
    }
    const auto& cands = candidates_[i];
    for (std::size_t k = 0; k < cands.size(); ++k) {
      const Usage add = usage_of(cands[k]);
      const Usage next{used.green + add.green, used.yellow + add.yellow};
      if (next.green > spc_.green_capacity() + kCapacityTolerance ||
          next.yellow > spc_.yellow_capacity() + kCapacityTolerance) {
        continue;
      }
      current_.answers[i] = cands[k];
      walk(i + 1, partial + values_[i][k], next);
    }
  }

  const SpcProfile& spc_;
  std::size_t n_;
  std::vector<std::vector<AllocationAnswer>> candidates_;
  std::vector<std::vector<double>> values_;
  std::vector<double> suffix_best_;
  double coef_ = 0.0;
  Mode mode_ = Mode::maximize;
  double best_ = 0.0;
  AllocationConfig current_;
  std::vector<AllocationConfig> ties_;
};

void check_enumeration_cap(std::span<const BandwidthRequest> requests, double grid_step,
                           const AllocationLimits& limits) {
  if (!(grid_step > 0.0)) throw ValidationError("grid_step must be positive");
  const auto size = projected_enumeration_size(requests, grid_step);
  if (size > limits.max_enumeration) {
    std::ostringstream os;
    os << limits.label << ": projected allocation enumeration of " << size
       << " configurations exceeds the cap of " << limits.max_enumeration;
    throw ResourceError(os.str());
  }
}

}  // namespace

ResponseCurve parse_response_curve(const std::string& name) {
  if (name == "linear") return ResponseCurve::linear;
  if (name == "concave") return ResponseCurve::concave;
  if (name == "convex") return ResponseCurve::convex;
  throw ValidationError("unknown response curve '" + name +
                        "' (expected linear, concave or convex)");
}

std::string to_string(ResponseCurve curve) {
  switch (curve) {
    case ResponseCurve::linear:
      return "linear";
    case ResponseCurve::concave:
      return "concave";
    case ResponseCurve::convex:
      return "convex";
  }
  return "linear";
}

double revenue_level(double bw, const QosBounds& bounds, ResponseCurve curve) {
  const double span = bounds.bw_max - bounds.bw_min;
  if (span <= 0.0) return bw >= bounds.bw_max ? 1.0 : 0.0;
  return shape((bw - bounds.bw_min) / span, curve);
}

double cost_level(double bw, const QosBounds& bounds, ResponseCurve curve) {
  if (bounds.bw_max <= 0.0) return 0.0;
  return shape(bw / bounds.bw_max, curve);
}

double answer_value(const AllocationAnswer& answer, const SpcProfile& spc) {
  if (!answer.green && !answer.yellow) return 0.0;
  return (answer.bw / spc.b_s) * (spc.mu - spc.gamma) * connection_weight(answer, spc.delta);
}

double spc_outcome(const AllocationConfig& config, const SpcProfile& spc) {
  double total = 0.0;
  for (const auto& a : config.answers) total += answer_value(a, spc);
  return total;
}

bool is_feasible(const AllocationConfig& config, std::span<const BandwidthRequest> requests,
                 const SpcProfile& spc) {
  if (config.size() != requests.size()) return false;
  double green = 0.0;
  double yellow = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    const auto& a = config[i];
    if (a.green && a.yellow) return false;
    if (a.green) {
      if (!requests[i].green.contains(a.bw)) return false;
      green += a.bw;
    } else if (a.yellow) {
      if (!requests[i].yellow.contains(a.bw)) return false;
      yellow += a.bw;
    } else if (a.bw != 0.0) {
      return false;
    }
  }
  return green <= spc.green_capacity() + kCapacityTolerance &&
         yellow <= spc.yellow_capacity() + kCapacityTolerance;
}

std::vector<double> grid_points(const Interval& interval, double grid_step) {
  if (!(grid_step > 0.0)) throw ValidationError("grid_step must be positive");
  std::vector<double> pts;
  const double span = interval.hi - interval.lo;
  if (span <= 1e-12) {
    pts.push_back(interval.lo);
    return pts;
  }
  const auto steps = static_cast<std::size_t>(std::floor(span / grid_step + 1e-9));
  for (std::size_t k = 0; k <= steps; ++k) {
    pts.push_back(std::min(interval.lo + static_cast<double>(k) * grid_step, interval.hi));
  }
  if (interval.hi - pts.back() > 1e-9) {
    pts.push_back(interval.hi);
  } else {
    pts.back() = interval.hi;
  }
  return pts;
}

std::vector<AllocationAnswer> candidate_answers(const BandwidthRequest& request,
                                                double grid_step) {
  std::vector<AllocationAnswer> out{AllocationAnswer::deny()};
  for (double bw : grid_points(request.green, grid_step)) out.push_back(AllocationAnswer::make_green(bw));
  for (double bw : grid_points(request.yellow, grid_step)) out.push_back(AllocationAnswer::make_yellow(bw));
  return out;
}

std::uint64_t projected_enumeration_size(std::span<const BandwidthRequest> requests,
                                         double grid_step) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  for (const auto& r : requests) {
    const std::uint64_t k = 1 + grid_points(r.green, grid_step).size() +
                            grid_points(r.yellow, grid_step).size();
    total = total > kMax / k ? kMax : total * k;
  }
  return total;
}

std::vector<AllocationConfig> enumerate_feasible(std::span<const BandwidthRequest> requests,
                                                 const SpcProfile& spc, double grid_step,
                                                 const AllocationLimits& limits) {
  check_enumeration_cap(requests, grid_step, limits);
  std::vector<std::vector<AllocationAnswer>> cands;
  for (const auto& r : requests) cands.push_back(candidate_answers(r, grid_step));

  std::vector<AllocationConfig> out;
  AllocationConfig current;
  current.answers.resize(requests.size());
  auto rec = [&](auto&& self, std::size_t i, double green, double yellow) -> void {
    if (i == requests.size()) {
      out.push_back(current);
      return;
    }
    for (const auto& c : cands[i]) {
      const Usage add = usage_of(c);
      if (green + add.green > spc.green_capacity() + kCapacityTolerance ||
          yellow + add.yellow > spc.yellow_capacity() + kCapacityTolerance) {
        continue;
      }
      current.answers[i] = c;
      self(self, i + 1, green + add.green, yellow + add.yellow);
    }
  };
  rec(rec, 0, 0.0, 0.0);
  return out;
}

SolutionSet solve_allocation(std::span<const BandwidthRequest> requests, const SpcProfile& spc,
                             double grid_step, const AllocationLimits& limits) {
  check_enumeration_cap(requests, grid_step, limits);
  Search search(requests, spc, grid_step);
  SolutionSet sol;
  sol.best_outcome = search.find_best();
  sol.configs = search.collect_ties(sol.best_outcome);
  return sol;
}

double src_gain(const AllocationAnswer& answer, const SrcProfile& profile,
                const QosBounds& bounds, double delta, const ValueMaps& maps) {
  const double w = connection_weight(answer, delta);
  if (w == 0.0) return 0.0;
  const double rev = revenue_level(answer.bw, bounds, maps.revenue) * profile.alpha * w;
  const double cost = cost_level(answer.bw, bounds, maps.cost) * profile.beta * w;
  return rev - cost;
}

Utility src_utility(std::size_t i, const SolutionSet& sol, const SrcProfile& profile,
                    const QosBounds& bounds, double delta, const ValueMaps& maps) {
  if (sol.configs.empty()) throw ValidationError("src_utility needs a non-empty sol(Pi)");
  double total = 0.0;
  for (const auto& c : sol.configs) total += src_gain(c[i], profile, bounds, delta, maps);
  const double raw = total / static_cast<double>(sol.m());
  return {raw, (raw + 1.0) / 2.0};
}

}  // namespace femto
