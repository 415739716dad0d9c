#pragma once

// SPC-side allocation: candidate answers on a bandwidth grid, the outcome
// function the SPC maximizes, the tie set sol(Pi), and SRC gains/utilities.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "femto/model.hpp"

namespace femto {

inline constexpr double kTieTolerance = 1e-9;
/// Slack on the capacity test that absorbs rounding in sums of grid points.
inline constexpr double kCapacityTolerance = 1e-9;

enum class Color : std::uint8_t { deny, green, yellow };

/// The SPC's answer (G_i, Y_i, bw_i) to one SRC.
struct AllocationAnswer {
  bool green = false;
  bool yellow = false;
  double bw = 0.0;

  static AllocationAnswer deny() { return {}; }
  static AllocationAnswer make_green(double bw) { return {true, false, bw}; }
  static AllocationAnswer make_yellow(double bw) { return {false, true, bw}; }

  Color color() const {
    return green ? Color::green : (yellow ? Color::yellow : Color::deny);
  }
  friend bool operator==(const AllocationAnswer&, const AllocationAnswer&) = default;
};

/// One answer per SRC, in SRC index order.
struct AllocationConfig {
  std::vector<AllocationAnswer> answers;

  std::size_t size() const { return answers.size(); }
  const AllocationAnswer& operator[](std::size_t i) const { return answers[i]; }
  friend bool operator==(const AllocationConfig&, const AllocationConfig&) = default;
};

/// sol(Pi): every feasible configuration attaining the best outcome.
struct SolutionSet {
  std::vector<AllocationConfig> configs;
  double best_outcome = 0.0;

  std::size_t m() const { return configs.size(); }
};

struct AllocationLimits {
  std::uint64_t max_enumeration = 100'000'000;
  std::string label = "allocation";  // named in resource errors
};

/// Rev(bw) and Cost(bw) shapes. Linear is the default; the others exist for
/// sensitivity studies.
enum class ResponseCurve { linear, concave, convex };

struct ValueMaps {
  ResponseCurve revenue = ResponseCurve::linear;
  ResponseCurve cost = ResponseCurve::linear;
};

ResponseCurve parse_response_curve(const std::string& name);
std::string to_string(ResponseCurve curve);

/// Rev(bw): ramp from 0 at bw_min to 1 at bw_max.
double revenue_level(double bw, const QosBounds& bounds, ResponseCurve curve = ResponseCurve::linear);
/// Cost(bw): ramp from 0 at 0 to 1 at bw_max.
double cost_level(double bw, const QosBounds& bounds, ResponseCurve curve = ResponseCurve::linear);

/// Contribution of one answer to the SPC outcome.
double answer_value(const AllocationAnswer& answer, const SpcProfile& spc);

/// sum_i Prop(bw_i) (mu - Gamma) (G_i + Y_i (1 - delta)), Prop(bw) = bw / B_S.
double spc_outcome(const AllocationConfig& config, const SpcProfile& spc);

bool is_feasible(const AllocationConfig& config, std::span<const BandwidthRequest> requests,
                 const SpcProfile& spc);

/// lo, lo + step, ... and hi itself; both endpoints are always present.
std::vector<double> grid_points(const Interval& interval, double grid_step);

/// Deny, then green grid points ascending, then yellow grid points ascending.
std::vector<AllocationAnswer> candidate_answers(const BandwidthRequest& request, double grid_step);

/// Product of per-SRC candidate counts (saturating).
std::uint64_t projected_enumeration_size(std::span<const BandwidthRequest> requests,
                                         double grid_step);

/// Every capacity-feasible configuration, in canonical order. Materializes the
/// whole set; meant for small instances and inspection.
std::vector<AllocationConfig> enumerate_feasible(std::span<const BandwidthRequest> requests,
                                                 const SpcProfile& spc, double grid_step,
                                                 const AllocationLimits& limits = {});

/// sol(Pi) via a bounded depth-first search over the same candidate space
/// enumerate_feasible walks, returned in the same canonical order.
SolutionSet solve_allocation(std::span<const BandwidthRequest> requests, const SpcProfile& spc,
                             double grid_step, const AllocationLimits& limits = {});

/// gain_i = Rev_i - Cost_i for one answer; lies in [-1, 1].
double src_gain(const AllocationAnswer& answer, const SrcProfile& profile,
                const QosBounds& bounds, double delta, const ValueMaps& maps = {});

struct Utility {
  double raw = 0.0;         // in [-1, 1]
  double normalized = 0.5;  // (raw + 1) / 2, in [0, 1]
};

/// Mean gain of SRC `i` over every member of sol(Pi).
Utility src_utility(std::size_t i, const SolutionSet& sol, const SrcProfile& profile,
                    const QosBounds& bounds, double delta, const ValueMaps& maps = {});

}  // namespace femto
