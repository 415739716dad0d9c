#pragma once

// Actors, strategy sets and bandwidth requests of the femto access sharing
// game. Everything here is an immutable value built by a validating factory.

#include <cstddef>
#include <vector>

namespace femto {

inline constexpr double kDualityTolerance = 1e-12;

/// The femto-cell owner sharing its bandwidth.
struct SpcProfile {
  double mu = 1.0;     // gain sensitivity
  double gamma = 0.0;  // own-QoS sensitivity, mu + gamma = 1
  double psi = 0.5;    // green share of b_s
  double b_s = 20.0;   // shared bandwidth, Mb/s
  double delta = 0.1;  // yellow preemption discount

  double green_capacity() const { return psi * b_s; }
  double yellow_capacity() const { return (1.0 - psi) * b_s; }
};

/// Throws ValidationError when a field is out of range, mu + gamma != 1,
/// or mu == 0.5.
SpcProfile make_spc_profile(double mu, double gamma, double psi, double b_s,
                            double delta);
void validate(const SpcProfile& spc);

/// A mobile user requesting bandwidth.
struct SrcProfile {
  double alpha = 1.0;  // QoS sensitivity
  double beta = 0.0;   // price sensitivity, alpha + beta = 1
  double kappa = 0.1;  // threshold slack
  double epsilon = 0.1;

  bool qos_sensitive() const { return alpha > 0.5; }
  /// alpha - kappa when QoS sensitive, alpha + kappa otherwise.
  double threshold() const { return qos_sensitive() ? alpha - kappa : alpha + kappa; }
};

SrcProfile make_src_profile(double alpha, double beta, double kappa, double epsilon);
void validate(const SrcProfile& src);

struct QosBounds {
  double bw_min = 0.0;  // file_size / t2
  double bw_max = 0.0;  // file_size / t1
  double file_size = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
};

/// Bandwidth bounds for transferring `file_size` Mb in a time within [t1, t2] s.
QosBounds qos_bounds(double file_size, double t1, double t2);

enum class Orientation { qos_sensitive, price_sensitive };

struct StrategySet {
  std::size_t owner = 0;
  std::vector<double> values;  // ascending
  Orientation orientation = Orientation::qos_sensitive;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  /// Index of `value` in the set; throws ValidationError when absent.
  std::size_t index_of(double value) const;
};

/// {alpha-kappa, +eps, ..., 1} for QoS-sensitive profiles,
/// {0, eps, ..., alpha+kappa} otherwise. Values rounded to 10 decimals.
StrategySet build_strategy_set(const SrcProfile& profile, std::size_t owner = 0);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x, double tol = 1e-12) const {
    return x >= lo - tol && x <= hi + tol;
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// The green/yellow request couple (g_i, y_i) attached to one pure strategy.
struct BandwidthRequest {
  Interval green;
  Interval yellow;
};

/// Maps a pure strategy onto its bandwidth request.
///
/// QoS-sensitive: green = [s*bw_max, bw_max], yellow = [s*bw_max*(1-delta), bw_max].
/// Price-sensitive: green = [bw_min, s*bw_max], yellow = [bw_min, s*bw_max*(1-delta)].
/// Every endpoint is clamped into [bw_min, bw_max], which keeps the
/// intervals non-empty.
BandwidthRequest request_from_strategy(const SrcProfile& profile, double s,
                                       const QosBounds& bounds, double delta);

/// Rounds to 10 decimal places; used to make strategy grids comparable.
double round_grid(double x);

}  // namespace femto
