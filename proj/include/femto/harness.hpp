#pragma once

// Experiment orchestration: learning runs with certification, exhaustive
// equilibrium reports, and N-sweeps. Results land as CSV + JSON.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "femto/equilibrium.hpp"
#include "femto/scenario.hpp"

namespace femto {

/// Figure-style smoothing: disjoint windows of this many iterations.
inline constexpr std::size_t kSeriesWindow = 15;

std::string version_string();

/// Where outputs go: the explicit flag, else $FEMTO_SHARE_OUT, else ./femto_share_out.
std::filesystem::path resolve_output_dir(const std::optional<std::string>& flag);

struct RunSummary {
  std::uint64_t seed = 0;
  bool converged = false;
  std::size_t iterations = 0;
  std::uint64_t connections = 0;
  Profile profile;                     // strategy indices
  std::vector<double> strategies;      // strategy values
  std::optional<bool> ne_certified;    // set when converged
  std::vector<double> expected_gains;  // U_i at `profile`
};

RunSummary summarize_run(const Game& game, const RunRecord& record, ProfileCache& cache);

/// runs.csv: one row per (iteration, src).
std::string runs_csv(const Game& game, const RunRecord& record);
/// series.csv: window means of expected gain and strategy probabilities.
std::string series_csv(const Game& game, const RunRecord& record,
                       std::size_t window = kSeriesWindow);
std::string manifest_json(const Scenario& scenario, const RunSummary& summary);

struct SimulateResult {
  std::vector<RunSummary> runs;
  std::vector<std::filesystem::path> run_dirs;  // one per seed
};

/// Runs every seed of `scenario` (or just `seed` when given) and writes
/// seed_<S>/{runs.csv, series.csv, manifest.json} under `out_dir`.
SimulateResult cmd_simulate(const Scenario& scenario, const std::filesystem::path& out_dir,
                            std::optional<std::uint64_t> seed = std::nullopt);

/// Reads the scenario and seed embedded in a manifest written by cmd_simulate.
std::pair<Scenario, std::uint64_t> load_manifest(const std::filesystem::path& path);

struct EquilibriaResult {
  PayoffMatrix matrix;
  std::vector<Profile> pure_ne;
  BrdResult brd;  // started from the all-lowest-strategy profile
};

/// Writes payoff_matrix.csv, pure_ne.csv and equilibria.json.
EquilibriaResult cmd_equilibria(const Scenario& scenario, const std::filesystem::path& out_dir);

struct SweepRow {
  std::size_t n = 0;
  std::vector<RunSummary> runs;
  std::optional<double> median_iterations;  // over converged runs
  std::optional<double> median_connections;
  std::size_t converged = 0;
  bool all_certified = true;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool nondecreasing = true;  // median trend, reported only
};

struct SweepOptions {
  std::size_t n_min = 2;
  std::size_t n_max = 8;
  std::size_t seed_count = 20;
  bool allow_large_n = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Clones the first SRC of `base` N times for each N in range and runs seeds
/// 1..seed_count. Writes table1.csv, sweep_runs.csv and sweep.json.
SweepResult cmd_sweep(const Scenario& base, const SweepOptions& options,
                      const std::filesystem::path& out_dir);

/// Parses "a..b" or "a" into an inclusive range.
std::pair<std::size_t, std::size_t> parse_n_range(const std::string& text);

/// Shortest round-trip text for a double.
std::string format_number(double x);

}  // namespace femto
