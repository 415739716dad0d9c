#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "femto/allocator.hpp"
#include "femto/error.hpp"
#include "oracle.hpp"

using namespace femto;
using doctest::Approx;

namespace {

const SpcProfile kSpc{1.0, 0.0, 0.5, 20.0, 0.1};

BandwidthRequest fixed_green(double bw) { return {{bw, bw}, {bw, bw}}; }

// Green-only request: the yellow interval is unreachable given zero yellow capacity.
SpcProfile green_only(double green_cap) {
  return SpcProfile{1.0, 0.0, 1.0, green_cap, 0.1};
}

}  // namespace

TEST_CASE("spc outcome") {
  CHECK(spc_outcome({{AllocationAnswer::make_green(2.0)}}, kSpc) == Approx(0.1));
  CHECK(spc_outcome({{AllocationAnswer::make_yellow(2.0)}}, kSpc) == Approx(0.09));
  CHECK(spc_outcome({{AllocationAnswer::deny(), AllocationAnswer::deny()}}, kSpc) == 0.0);
}

TEST_CASE("grid points include both endpoints") {
  CHECK(grid_points({1.8, 2.0}, 0.1).size() == 3);
  CHECK(grid_points({2.0, 2.0}, 0.1) == std::vector<double>{2.0});
  const auto pts = grid_points({1.62, 2.0}, 0.197);
  CHECK(pts.front() == 1.62);
  CHECK(pts.back() == 2.0);
  CHECK(pts.size() == 3);
  CHECK_THROWS_AS(grid_points({0.0, 1.0}, 0.0), ValidationError);
}

TEST_CASE("enumerate feasible") {
  SUBCASE("single point interval") {
    const std::vector<BandwidthRequest> reqs{fixed_green(2.0)};
    const auto all = enumerate_feasible(reqs, green_only(10.0), 0.1);
    // deny, green 2, yellow 2 (yellow capacity is zero so it is filtered)
    REQUIRE(all.size() == 2);
    CHECK(all[0][0].color() == Color::deny);
    CHECK(all[1][0] == AllocationAnswer::make_green(2.0));
  }
  SUBCASE("joint grant infeasible") {
    const std::vector<BandwidthRequest> reqs{fixed_green(2.0), fixed_green(2.0)};
    const auto all = enumerate_feasible(reqs, green_only(2.0), 0.1);
    REQUIRE(all.size() == 3);
    CHECK(all[0][0].color() == Color::deny);
    CHECK(all[0][1].color() == Color::deny);
    CHECK(all[1][0].color() == Color::deny);
    CHECK(all[1][1].color() == Color::green);
    CHECK(all[2][0].color() == Color::green);
    CHECK(all[2][1].color() == Color::deny);
  }
  SUBCASE("cap is enforced") {
    std::vector<BandwidthRequest> reqs(6, BandwidthRequest{{0.0, 2.0}, {0.0, 2.0}});
    AllocationLimits limits{1000, "tiny"};
    CHECK_THROWS_AS(enumerate_feasible(reqs, kSpc, 0.1, limits), ResourceError);
    CHECK_THROWS_AS(solve_allocation(reqs, kSpc, 0.1, limits), ResourceError);
    try {
      solve_allocation(reqs, kSpc, 0.1, limits);
    } catch (const ResourceError& e) {
      CHECK(std::string(e.what()).find("tiny") != std::string::npos);
    }
  }
}

TEST_CASE("solve allocation") {
  SUBCASE("both granted when capacity allows") {
    const std::vector<BandwidthRequest> reqs{fixed_green(2.0), fixed_green(2.0)};
    const auto sol = solve_allocation(reqs, kSpc, 0.1);
    REQUIRE(sol.m() == 1);
    CHECK(sol.best_outcome == Approx(0.2));
    CHECK(sol.configs[0][0] == AllocationAnswer::make_green(2.0));
    CHECK(sol.configs[0][1] == AllocationAnswer::make_green(2.0));
  }
  SUBCASE("symmetric tie when only one fits") {
    const std::vector<BandwidthRequest> reqs{fixed_green(2.0), fixed_green(2.0)};
    const auto sol = solve_allocation(reqs, green_only(2.0), 0.1);
    REQUIRE(sol.m() == 2);
    CHECK(sol.configs[0][0].color() == Color::deny);
    CHECK(sol.configs[1][0].color() == Color::green);
  }
  SUBCASE("nothing fits") {
    const std::vector<BandwidthRequest> reqs{fixed_green(3.0), fixed_green(3.0)};
    const auto sol = solve_allocation(reqs, green_only(2.0), 0.1);
    REQUIRE(sol.m() == 1);
    CHECK(sol.best_outcome == 0.0);
    CHECK(sol.configs[0][0].color() == Color::deny);
    CHECK(sol.configs[0][1].color() == Color::deny);
  }
}

TEST_CASE("src gain") {
  const auto bounds = qos_bounds(8.0, 4.0, 300.0);
  const SrcProfile qos{1.0, 0.0, 0.1, 0.1};
  const SrcProfile even{0.5, 0.5, 0.1, 0.1};
  CHECK(src_gain(AllocationAnswer::deny(), qos, bounds, 0.1) == 0.0);
  CHECK(src_gain(AllocationAnswer::make_green(2.0), qos, bounds, 0.1) == Approx(1.0));
  CHECK(src_gain(AllocationAnswer::make_yellow(2.0), even, bounds, 0.1) == Approx(0.0));
  CHECK(src_gain(AllocationAnswer::make_yellow(2.0), qos, bounds, 0.1) == Approx(0.9));
  CHECK(revenue_level(bounds.bw_min, bounds) == 0.0);
  CHECK(cost_level(1.0, bounds) == Approx(0.5));
  CHECK(revenue_level(1.0, bounds, ResponseCurve::concave) >
        revenue_level(1.0, bounds, ResponseCurve::linear));
}

TEST_CASE("src utility") {
  const auto bounds = qos_bounds(8.0, 4.0, 300.0);
  const SrcProfile p{1.0, 0.0, 0.1, 0.1};
  SolutionSet one;
  one.configs = {{{AllocationAnswer::make_green(2.0)}}};
  CHECK(src_utility(0, one, p, bounds, 0.1).raw == Approx(1.0));
  CHECK(src_utility(0, one, p, bounds, 0.1).normalized == Approx(1.0));

  SolutionSet pair;
  pair.configs = {{{AllocationAnswer::deny(), AllocationAnswer::make_green(2.0)}},
                  {{AllocationAnswer::make_green(2.0), AllocationAnswer::deny()}}};
  const double granted = src_gain(AllocationAnswer::make_green(2.0), p, bounds, 0.1);
  CHECK(src_utility(0, pair, p, bounds, 0.1).raw == Approx(granted / 2));

  SolutionSet denied;
  denied.configs = {{{AllocationAnswer::deny()}}, {{AllocationAnswer::deny()}}};
  CHECK(src_utility(0, denied, p, bounds, 0.1).raw == 0.0);
  CHECK(src_utility(0, denied, p, bounds, 0.1).normalized == 0.5);
  CHECK_THROWS_AS(src_utility(0, SolutionSet{}, p, bounds, 0.1), ValidationError);
}

TEST_CASE("allocation properties on random instances") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto bounds = qos_bounds(8.0, 4.0, 300.0);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + rng() % 3;
    SpcProfile spc{0.6 + 0.4 * unit(rng), 0.0, 0.2 + 0.6 * unit(rng), 2.0 + 6.0 * unit(rng),
                   0.3 * unit(rng)};
    spc.gamma = 1.0 - spc.mu;
    std::vector<BandwidthRequest> reqs;
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = bounds.bw_min + unit(rng) * 1.5;
      const double hi = std::min(bounds.bw_max, lo + unit(rng) * 0.5);
      reqs.push_back({{lo, hi}, {lo * (1 - spc.delta), hi}});
    }
    const double step = 0.1 + 0.2 * unit(rng);
    const auto sol = solve_allocation(reqs, spc, step);
    REQUIRE(sol.m() >= 1);
    for (const auto& c : sol.configs) {
      CHECK(is_feasible(c, reqs, spc));
      CHECK(spc_outcome(c, spc) >= sol.best_outcome - kTieTolerance);
    }

    // Upgrading any granted bandwidth within its colour never lowers the outcome.
    const auto& best = sol.configs.front();
    for (std::size_t i = 0; i < n; ++i) {
      if (best[i].color() == Color::deny) continue;
      AllocationConfig bigger = best;
      const auto& iv = best[i].green ? reqs[i].green : reqs[i].yellow;
      bigger.answers[i].bw = iv.hi;
      CHECK(spc_outcome(bigger, spc) >= spc_outcome(best, spc) - 1e-15);
    }

    // Swapping two identical SRCs permutes the tie set.
    if (n >= 2) {
      std::vector<BandwidthRequest> twin{reqs[0], reqs[0]};
      if (n == 3) twin.push_back(reqs[2]);
      const auto a = solve_allocation(twin, spc, step);
      std::vector<AllocationConfig> swapped;
      for (auto c : a.configs) {
        std::swap(c.answers[0], c.answers[1]);
        swapped.push_back(c);
      }
      for (const auto& c : swapped) {
        CHECK(std::find(a.configs.begin(), a.configs.end(), c) != a.configs.end());
      }
    }
  }
}

TEST_CASE("green never pays less than yellow at equal bandwidth") {
  const auto bounds = qos_bounds(8.0, 4.0, 300.0);
  for (double alpha : {0.0, 0.3, 0.5, 0.8, 1.0}) {
    const SrcProfile p{alpha, 1.0 - alpha, 0.0, 0.1};
    for (double delta : {0.0, 0.1, 0.5, 0.99}) {
      for (double bw : {bounds.bw_min, 0.5, 1.0, 2.0}) {
        const double g = src_gain(AllocationAnswer::make_green(bw), p, bounds, delta);
        const double y = src_gain(AllocationAnswer::make_yellow(bw), p, bounds, delta);
        // Both scale the same signed base, so the claim holds for non-negative gains.
        if (g >= 0.0) CHECK(g >= y - 1e-15);
        CHECK(std::abs(y) <= std::abs(g) + 1e-15);
        CHECK(g <= 1.0);
        CHECK(g >= -1.0);
      }
    }
  }
}

TEST_CASE("bounded search agrees with the literal product scan") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng() % 3;
    SpcProfile spc{0.6 + 0.4 * unit(rng), 0.0, unit(rng), 1.0 + 6.0 * unit(rng), 0.5 * unit(rng)};
    spc.gamma = 1.0 - spc.mu;
    std::vector<BandwidthRequest> reqs;
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = 0.1 + unit(rng) * 1.5;
      const double hi = lo + unit(rng) * 0.4;
      reqs.push_back({{lo, hi}, {lo * (1 - spc.delta), hi * (1 - spc.delta)}});
    }
    const double step = 0.1;
    const auto sol = solve_allocation(reqs, spc, step);
    const auto scan = oracle::full_product_scan(reqs, spc, step);
    CHECK(enumerate_feasible(reqs, spc, step).size() == scan.feasible);
    CHECK(sol.best_outcome == Approx(scan.best).epsilon(1e-12));
    REQUIRE(sol.m() == scan.ties.size());
    for (std::size_t k = 0; k < sol.m(); ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(static_cast<int>(sol.configs[k][i].color()) == scan.ties[k][i].color);
        CHECK(sol.configs[k][i].bw == Approx(scan.ties[k][i].bw).epsilon(1e-12));
      }
    }
  }
}
