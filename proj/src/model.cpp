#include "femto/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "femto/error.hpp"

namespace femto {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

double round_grid(double x) {
  constexpr double kScale = 1e10;
  return std::round(x * kScale) / kScale;
}

void validate(const SpcProfile& spc) {
  require(in_unit(spc.mu), "spc.mu must lie in [0,1], got " + num(spc.mu));
  require(in_unit(spc.gamma), "spc.gamma must lie in [0,1], got " + num(spc.gamma));
  require(std::abs(spc.mu + spc.gamma - 1.0) <= kDualityTolerance,
          "spc.mu + spc.gamma must equal 1");
  require(std::abs(spc.mu - 0.5) > kDualityTolerance,
          "spc.mu = 0.5 makes every allocation score identically");
  require(in_unit(spc.psi), "spc.psi must lie in [0,1], got " + num(spc.psi));
  require(spc.b_s > 0.0 && std::isfinite(spc.b_s), "spc.b_s must be positive");
  require(spc.delta >= 0.0 && spc.delta < 1.0,
          "spc.delta must lie in [0,1), got " + num(spc.delta));
}

SpcProfile make_spc_profile(double mu, double gamma, double psi, double b_s,
                            double delta) {
  SpcProfile spc{mu, gamma, psi, b_s, delta};
  validate(spc);
  return spc;
}

void validate(const SrcProfile& src) {
  require(in_unit(src.alpha), "alpha must lie in [0,1], got " + num(src.alpha));
  require(in_unit(src.beta), "beta must lie in [0,1], got " + num(src.beta));
  require(std::abs(src.alpha + src.beta - 1.0) <= kDualityTolerance,
          "alpha + beta must equal 1");
  require(in_unit(src.kappa), "kappa must lie in [0,1], got " + num(src.kappa));
  require(src.epsilon > 0.0 && src.epsilon <= 1.0,
          "epsilon must lie in (0,1], got " + num(src.epsilon));
  const double th = round_grid(src.threshold());
  require(in_unit(th), std::string(src.qos_sensitive() ? "Rev_Th" : "Cost_Th") +
                           " = " + num(th) + " falls outside [0,1]");
}

SrcProfile make_src_profile(double alpha, double beta, double kappa, double epsilon) {
  SrcProfile src{alpha, beta, kappa, epsilon};
  validate(src);
  return src;
}

QosBounds qos_bounds(double file_size, double t1, double t2) {
  require(t1 > 0.0, "t1 must be positive");
  require(t1 < t2, "t1 must be strictly below t2");
  require(file_size >= 0.0 && std::isfinite(file_size), "file_size must be non-negative");
  return QosBounds{file_size / t2, file_size / t1, file_size, t1, t2};
}

std::size_t StrategySet::index_of(double value) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::abs(values[i] - value) < 1e-9) return i;
  }
  throw ValidationError("strategy " + num(value) + " is not in the set of SRC " +
                        std::to_string(owner));
}

StrategySet build_strategy_set(const SrcProfile& profile, std::size_t owner) {
  validate(profile);
  StrategySet set;
  set.owner = owner;
  const double th = round_grid(profile.threshold());
  const double eps = profile.epsilon;
  // The free end of the grid is pinned to 1 (QoS) or 0 (price); the count
  // follows from the span over eps.
  const bool qos = profile.qos_sensitive();
  set.orientation = qos ? Orientation::qos_sensitive : Orientation::price_sensitive;
  const double span = qos ? 1.0 - th : th;
  const auto n = static_cast<std::size_t>(std::llround(span / eps)) + 1;
  set.values.reserve(n);
  if (n == 1) {
    set.values.push_back(th);
    return set;
  }
  if (qos) {
    for (std::size_t k = 0; k + 1 < n; ++k) set.values.push_back(round_grid(th + k * eps));
    set.values.push_back(1.0);
  } else {
    for (std::size_t k = 0; k + 1 < n; ++k) set.values.push_back(round_grid(k * eps));
    set.values.push_back(th);
  }
  return set;
}

BandwidthRequest request_from_strategy(const SrcProfile& profile, double s,
                                       const QosBounds& bounds, double delta) {
  const auto clamp = [&](double x) { return std::clamp(x, bounds.bw_min, bounds.bw_max); };
  const double scaled = s * bounds.bw_max;
  BandwidthRequest req;
  if (profile.qos_sensitive()) {
    req.green = {clamp(scaled), bounds.bw_max};
    req.yellow = {clamp(scaled * (1.0 - delta)), bounds.bw_max};
  } else {
    req.green = {bounds.bw_min, clamp(scaled)};
    req.yellow = {bounds.bw_min, clamp(scaled * (1.0 - delta))};
  }
  return req;
}

}  // namespace femto
