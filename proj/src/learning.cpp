#include "femto/learning.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "femto/error.hpp"

namespace femto {

NormalizationMode parse_normalization_mode(const std::string& name) {
  if (name == "zero_floor") return NormalizationMode::zero_floor;
  if (name == "running_min") return NormalizationMode::running_min;
  throw ValidationError("unknown normalization '" + name +
                        "' (expected zero_floor or running_min)");
}

std::string to_string(NormalizationMode mode) {
  return mode == NormalizationMode::zero_floor ? "zero_floor" : "running_min";
}

GainMode parse_gain_mode(const std::string& name) {
  if (name == "sampled") return GainMode::sampled;
  if (name == "expected") return GainMode::expected;
  throw ValidationError("unknown gain mode '" + name + "' (expected sampled or expected)");
}

std::string to_string(GainMode mode) {
  return mode == GainMode::sampled ? "sampled" : "expected";
}

MixedState MixedState::uniform(std::size_t strategies, NormalizationMode mode) {
  if (strategies == 0) throw ValidationError("a mixed state needs at least one strategy");
  MixedState s;
  s.probs.assign(strategies, 1.0 / static_cast<double>(strategies));
  s.mode = mode;
  return s;
}

std::size_t MixedState::argmax() const {
  return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

double MixedState::max_prob() const { return *std::max_element(probs.begin(), probs.end()); }

std::size_t Rng::index(std::size_t n) {
  const auto k = static_cast<std::size_t>(unit() * static_cast<double>(n));
  return std::min(k, n - 1);
}

std::size_t sample_action(const MixedState& state, Rng& rng) {
  const double x = rng.unit();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < state.probs.size(); ++j) {
    if (state.probs[j] <= 0.0) continue;
    acc += state.probs[j];
    last_positive = j;
    if (x < acc) return j;
  }
  // Rounding left the cumulative sum a hair under 1.
  return last_positive;
}

void observe_gain(MixedState& state, double gain) {
  if (!state.observed) {
    state.u_max = gain;
    state.u_min = gain;
    state.observed = true;
    return;
  }
  state.u_max = std::max(state.u_max, gain);
  state.u_min = std::min(state.u_min, gain);
}

double normalize_gain(const MixedState& state, double gain) {
  const double floor = state.mode == NormalizationMode::zero_floor ? 0.0 : state.u_min;
  const double width = state.u_max - floor;
  if (!(width > 0.0)) return 0.0;
  return std::clamp((gain - floor) / width, 0.0, 1.0);
}

MixedState a_dist_update(const MixedState& state, std::size_t played, double u, double b) {
  if (played >= state.probs.size()) throw ValidationError("played strategy out of range");
  if (!(u >= 0.0 && u <= 1.0)) throw ValidationError("normalized gain must lie in [0,1]");
  if (!(b >= 0.0 && b <= 1.0)) throw ValidationError("learning rate must lie in [0,1]");
  MixedState next = state;
  const double step = b * u;
  if (step == 0.0) return next;
  double moved = 0.0;
  for (std::size_t j = 0; j < next.probs.size(); ++j) {
    if (j == played) continue;
    const double take = step * state.probs[j];
    next.probs[j] = state.probs[j] - take;
    moved += take;
  }
  next.probs[played] = state.probs[played] + moved;
  return next;
}

ConvergenceVerdict check_convergence(std::span<const MixedState> states, double p_threshold) {
  ConvergenceVerdict v;
  v.converged = true;
  v.argmax.reserve(states.size());
  for (const auto& s : states) {
    v.argmax.push_back(s.argmax());
    if (s.max_prob() < p_threshold) v.converged = false;
  }
  return v;
}

void validate(const LearningParams& p) {
  if (!(p.b >= 0.0 && p.b <= 1.0)) throw ValidationError("learning.b must lie in [0,1]");
  if (!(p.p_threshold > 0.0 && p.p_threshold <= 1.0)) {
    throw ValidationError("learning.p_threshold must lie in (0,1]");
  }
  if (!(p.q > 0.0 && p.q <= 1.0)) throw ValidationError("learning.q must lie in (0,1]");
}

std::uint64_t connection_count(std::size_t iterations, double q) {
  return static_cast<std::uint64_t>(std::ceil(static_cast<double>(iterations) * q - 1e-9));
}

RunRecord run_learning(const Game& game, const LearningParams& params, std::uint64_t seed,
                       ProfileCache* cache) {
  validate(params);
  std::optional<ProfileCache> local;
  if (cache == nullptr) cache = &local.emplace(game);

  const std::size_t n = game.players();
  std::vector<MixedState> states;
  states.reserve(n);
  for (const auto& set : game.strategies) {
    states.push_back(MixedState::uniform(set.size(), params.normalization));
  }

  Rng rng(seed);
  RunRecord rec;
  rec.seed = seed;
  auto verdict = check_convergence(states, params.p_threshold);
  Profile profile(n);
  while (!verdict.converged && rec.iterations.size() < params.max_iters) {
    for (std::size_t i = 0; i < n; ++i) profile[i] = sample_action(states[i], rng);
    const ProfileOutcome& outcome = cache->get(profile);

    IterationRecord it;
    it.played = profile;
    it.gains.resize(n);
    it.expected.resize(n);
    const AllocationConfig* drawn = nullptr;
    if (params.gain_mode == GainMode::sampled) {
      drawn = &outcome.sol.configs[rng.index(outcome.sol.m())];
    }
    for (std::size_t i = 0; i < n; ++i) {
      it.expected[i] = outcome.utilities[i].raw;
      it.gains[i] = drawn != nullptr ? src_gain((*drawn)[i], game.srcs[i], game.bounds,
                                                game.spc.delta, game.maps)
                                     : outcome.utilities[i].raw;
      observe_gain(states[i], it.gains[i]);
      const double u = normalize_gain(states[i], it.gains[i]);
      states[i] = a_dist_update(states[i], profile[i], u, params.b);
    }
    it.probs.reserve(n);
    for (const auto& s : states) it.probs.push_back(s.probs);
    rec.iterations.push_back(std::move(it));
    verdict = check_convergence(states, params.p_threshold);
  }

  rec.converged = verdict.converged;
  rec.convergence_iteration = verdict.converged ? rec.iterations.size() : 0;
  rec.final_profile = verdict.argmax;
  rec.connections = connection_count(rec.iterations.size(), params.q);
  return rec;
}

}  // namespace femto
