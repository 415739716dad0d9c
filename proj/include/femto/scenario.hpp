#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "femto/game.hpp"
#include "femto/learning.hpp"

namespace femto {

/// Hardware connection limit of a femto access; a validation default only.
inline constexpr std::size_t kDefaultMaxSrcs = 8;

/// Everything needed to reproduce an experiment. Stored as TOML.
struct Scenario {
  std::string name = "scenario";
  SpcProfile spc;
  std::vector<SrcProfile> srcs;
  double file_size = 8.0;  // Mb
  double t1 = 4.0;         // s
  double t2 = 300.0;       // s
  double grid_step = 0.0;  // <= 0 selects (bw_max - bw_min) / 10
  ValueMaps maps;
  LearningParams learning;
  std::vector<std::uint64_t> seeds{1};
  std::size_t max_srcs = kDefaultMaxSrcs;
  std::uint64_t max_enumeration = 100'000'000;
  std::uint64_t max_profiles = 1'000'000;

  friend bool operator==(const Scenario&, const Scenario&);
};

struct LoadOptions {
  bool allow_large_n = false;  // lifts max_srcs
};

/// Validates every model invariant; errors carry the offending field path.
void validate(const Scenario& scenario, const LoadOptions& options = {});

Scenario parse_scenario(std::string_view toml_text, std::string_view source = "<string>",
                        const LoadOptions& options = {});
Scenario load_scenario(const std::filesystem::path& path, const LoadOptions& options = {});

/// TOML text that parse_scenario reads back to an equal Scenario.
std::string write_scenario(const Scenario& scenario);

QosBounds scenario_bounds(const Scenario& scenario);
Game make_game(const Scenario& scenario);

}  // namespace femto
