// femto_share: simulate A_dist runs, enumerate equilibria, sweep over N.
//
// Exit codes: 0 success, 1 validation error, 2 resource cap exceeded,
// 3 any other failure.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "femto/error.hpp"
#include "femto/harness.hpp"

namespace {

void print_profile(std::ostream& os, const std::vector<double>& values) {
  os << '(';
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << (i ? "," : "") << femto::format_number(values[i]);
  }
  os << ')';
}

struct SimulateFlags {
  std::string scenario;
  std::string manifest;
  std::optional<std::uint64_t> seed;
  std::optional<double> b;
  std::optional<std::size_t> max_iters;
  std::optional<double> p_threshold;
  std::optional<double> q;
  std::optional<double> grid_step;
  std::optional<std::string> out;
  bool allow_large_n = false;
};

int run_simulate(const SimulateFlags& f) {
  femto::Scenario sc;
  std::optional<std::uint64_t> seed = f.seed;
  if (!f.manifest.empty()) {
    auto [loaded, manifest_seed] = femto::load_manifest(f.manifest);
    sc = std::move(loaded);
    if (!seed) seed = manifest_seed;
  } else {
    sc = femto::load_scenario(f.scenario, {.allow_large_n = f.allow_large_n});
  }
  if (f.b) sc.learning.b = *f.b;
  if (f.max_iters) sc.learning.max_iters = *f.max_iters;
  if (f.p_threshold) sc.learning.p_threshold = *f.p_threshold;
  if (f.q) sc.learning.q = *f.q;
  if (f.grid_step) sc.grid_step = *f.grid_step;
  femto::validate(sc, {.allow_large_n = f.allow_large_n || !f.manifest.empty()});

  const auto out = femto::resolve_output_dir(f.out);
  const auto res = femto::cmd_simulate(sc, out, seed);
  for (std::size_t k = 0; k < res.runs.size(); ++k) {
    const auto& r = res.runs[k];
    std::cout << "seed " << r.seed << ": "
              << (r.converged ? "converged after " : "not converged after ") << r.iterations
              << " iterations (" << r.connections << " connections), profile ";
    print_profile(std::cout, r.strategies);
    if (r.ne_certified) std::cout << (*r.ne_certified ? ", pure NE" : ", NOT a pure NE");
    std::cout << " -> " << res.run_dirs[k].string() << '\n';
  }
  return 0;
}

int run_equilibria(const std::string& path, const std::optional<std::string>& out_flag,
                   std::optional<double> grid_step, bool allow_large_n) {
  auto sc = femto::load_scenario(path, {.allow_large_n = allow_large_n});
  if (grid_step) sc.grid_step = *grid_step;
  femto::validate(sc, {.allow_large_n = allow_large_n});
  const auto out = femto::resolve_output_dir(out_flag);
  const auto res = femto::cmd_equilibria(sc, out);
  const auto game = femto::make_game(sc);
  std::cout << res.matrix.profiles() << " profiles, " << res.pure_ne.size() << " pure NE\n";
  for (const auto& p : res.pure_ne) {
    std::cout << "  ";
    print_profile(std::cout, game.strategy_values(p));
    std::cout << '\n';
  }
  std::cout << "best-response dynamics from the lowest profile: " << res.brd.trace.size()
            << " steps -> ";
  print_profile(std::cout, game.strategy_values(res.brd.terminal));
  std::cout << "\nwritten to " << out.string() << '\n';
  return 0;
}

int run_sweep(const std::string& path, const std::string& n_range, std::size_t seeds,
              const std::optional<std::string>& out_flag, bool allow_large_n) {
  const auto sc = femto::load_scenario(path, {.allow_large_n = allow_large_n});
  femto::SweepOptions opts;
  std::tie(opts.n_min, opts.n_max) = femto::parse_n_range(n_range);
  opts.seed_count = seeds;
  opts.allow_large_n = allow_large_n;
  const auto out = femto::resolve_output_dir(out_flag);
  const auto res = femto::cmd_sweep(sc, opts, out);
  std::cout << "N  converged  median_iterations  all_ne\n";
  for (const auto& row : res.rows) {
    std::cout << row.n << "  " << row.converged << "/" << row.runs.size() << "  "
              << (row.median_iterations ? femto::format_number(*row.median_iterations) : "-")
              << "  " << (row.all_certified ? "yes" : "NO") << '\n';
  }
  std::cout << "median trend " << (res.nondecreasing ? "nondecreasing" : "not monotone")
            << "\nwritten to " << out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Femto access sharing game: learning, allocation and equilibria"};
  app.set_version_flag("--version", femto::version_string());
  app.require_subcommand(1);

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Run A_dist learning per seed");
  auto* scen_opt = simulate->add_option("--scenario", sim.scenario, "Scenario TOML file");
  auto* manifest_opt =
      simulate->add_option("--manifest", sim.manifest, "Replay a manifest.json from a prior run");
  scen_opt->excludes(manifest_opt);
  simulate->add_option("--seed", sim.seed, "Run only this seed");
  simulate->add_option("--b", sim.b, "Learning rate");
  simulate->add_option("--max-iters", sim.max_iters, "Iteration budget");
  simulate->add_option("--p-threshold", sim.p_threshold, "Convergence probability");
  simulate->add_option("--q", sim.q, "Learning triggers per requested connection");
  simulate->add_option("--grid-step", sim.grid_step, "Allocation bandwidth grid step, Mb/s");
  simulate->add_option("--out", sim.out, "Output directory");
  simulate->add_flag("--allow-large-n", sim.allow_large_n, "Permit more than 8 SRCs");

  std::string eq_scenario;
  std::optional<std::string> eq_out;
  std::optional<double> eq_grid;
  bool eq_large = false;
  auto* equilibria = app.add_subcommand("equilibria", "Payoff matrix and pure Nash equilibria");
  equilibria->add_option("--scenario", eq_scenario, "Scenario TOML file")->required();
  equilibria->add_option("--out", eq_out, "Output directory");
  equilibria->add_option("--grid-step", eq_grid, "Allocation bandwidth grid step, Mb/s");
  equilibria->add_flag("--allow-large-n", eq_large, "Permit more than 8 SRCs");

  std::string sw_scenario;
  std::string sw_n = "2..8";
  std::size_t sw_seeds = 20;
  std::optional<std::string> sw_out;
  bool sw_large = false;
  auto* sweep = app.add_subcommand("sweep", "Convergence iterations as N varies");
  sweep->add_option("--scenario", sw_scenario, "Base scenario TOML file")->required();
  sweep->add_option("--n", sw_n, "SRC count range, e.g. 2..8")->capture_default_str();
  sweep->add_option("--seeds", sw_seeds, "Seeds per N (1..S)")->capture_default_str();
  sweep->add_option("--out", sw_out, "Output directory");
  sweep->add_flag("--allow-large-n", sw_large, "Permit N outside 2..8");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate) {
      if (sim.scenario.empty() && sim.manifest.empty()) {
        std::cerr << "simulate: one of --scenario or --manifest is required\n";
        return 1;
      }
      return run_simulate(sim);
    }
    if (*equilibria) return run_equilibria(eq_scenario, eq_out, eq_grid, eq_large);
    if (*sweep) return run_sweep(sw_scenario, sw_n, sw_seeds, sw_out, sw_large);
  } catch (const femto::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 1;
  } catch (const femto::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
