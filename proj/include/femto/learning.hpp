#pragma once

// Decentralized learning automata (linear reward-inaction) run by each SRC
// with only its own plays and gains, plus the repeated-game driver.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "femto/game.hpp"

namespace femto {

inline constexpr double kSimplexTolerance = 1e-9;

/// How A_i^t, the low end of the normalization window, is tracked.
enum class NormalizationMode { running_min, zero_floor };

/// What an SRC observes each round: the gain of one uniformly drawn member of
/// sol(Pi), or the expected utility U_i(Pi) directly.
enum class GainMode { sampled, expected };

NormalizationMode parse_normalization_mode(const std::string& name);
std::string to_string(NormalizationMode mode);
GainMode parse_gain_mode(const std::string& name);
std::string to_string(GainMode mode);

struct MixedState {
  std::vector<double> probs;
  double u_max = 0.0;  // U_i^t
  double u_min = 0.0;  // A_i^t
  bool observed = false;
  NormalizationMode mode = NormalizationMode::zero_floor;

  static MixedState uniform(std::size_t strategies,
                            NormalizationMode mode = NormalizationMode::zero_floor);
  std::size_t argmax() const;
  double max_prob() const;
};

/// Seeded generator with a portable unit-interval draw, so runs reproduce
/// bit-for-bit across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform in {0, ..., n-1}; n must be positive.
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

std::size_t sample_action(const MixedState& state, Rng& rng);

/// Folds a newly observed gain into the running extrema.
void observe_gain(MixedState& state, double gain);

/// (gain - A) / (U - A) clamped to [0, 1]; 0 when the window is degenerate.
/// zero_floor mode uses A = 0.
double normalize_gain(const MixedState& state, double gain);

/// One L_R-I step: non-played strategies shrink by b*u of their mass and the
/// played strategy collects exactly what they lost.
MixedState a_dist_update(const MixedState& state, std::size_t played, double u, double b);

struct ConvergenceVerdict {
  bool converged = false;
  Profile argmax;  // Pi*, the most likely strategy of each SRC
};

ConvergenceVerdict check_convergence(std::span<const MixedState> states, double p_threshold);

struct LearningParams {
  double b = 0.1;
  std::size_t max_iters = 5000;
  double p_threshold = 0.99;
  double q = 1.0;  // learning triggers per requested connection
  NormalizationMode normalization = NormalizationMode::zero_floor;
  GainMode gain_mode = GainMode::sampled;
};

void validate(const LearningParams& params);

struct IterationRecord {
  std::vector<std::size_t> played;     // margin_i^t
  std::vector<double> gains;           // observed gain_i^t
  std::vector<double> expected;        // U_i of the played profile
  std::vector<std::vector<double>> probs;  // after the update
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<IterationRecord> iterations;
  bool converged = false;
  std::size_t convergence_iteration = 0;  // iterations executed when converged
  Profile final_profile;                  // Pi* when converged, argmax otherwise
  std::uint64_t connections = 0;          // ceil(iterations * q)

  std::size_t iteration_count() const { return iterations.size(); }
};

/// Number of requested connections for `iterations` learning steps.
std::uint64_t connection_count(std::size_t iterations, double q);

/// Repeats sample -> allocate -> observe -> update until every SRC holds a
/// strategy with probability >= p_threshold, or max_iters is reached.
RunRecord run_learning(const Game& game, const LearningParams& params, std::uint64_t seed,
                       ProfileCache* cache = nullptr);

}  // namespace femto
