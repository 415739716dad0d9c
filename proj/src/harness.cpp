#include "femto/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "femto/error.hpp"

#ifndef FEMTO_SHARE_VERSION
#define FEMTO_SHARE_VERSION "0.0.0"
#endif

namespace femto {

namespace {

using json = nlohmann::json;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::optional<double> median(std::vector<double> xs) {
  if (xs.empty()) return std::nullopt;
  std::sort(xs.begin(), xs.end());
  const auto mid = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

json optional_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

std::string join_profile(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_number(values[i]);
  }
  return out;
}

// Runs fn(0..count-1) on up to `threads` workers and rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < count; k = next++) {
          try {
            fn(k);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string version_string() { return FEMTO_SHARE_VERSION; }

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::filesystem::path resolve_output_dir(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("FEMTO_SHARE_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return "femto_share_out";
}

RunSummary summarize_run(const Game& game, const RunRecord& record, ProfileCache& cache) {
  RunSummary s;
  s.seed = record.seed;
  s.converged = record.converged;
  s.iterations = record.iteration_count();
  s.connections = record.connections;
  s.profile = record.final_profile;
  s.strategies = game.strategy_values(s.profile);
  if (record.converged) s.ne_certified = certify_pure_ne(game, s.profile, cache);
  for (const auto& u : cache.get(s.profile).utilities) s.expected_gains.push_back(u.raw);
  return s;
}

std::string runs_csv(const Game& game, const RunRecord& record) {
  std::ostringstream os;
  os << "iteration,src,played_index,played_strategy,gain,expected_utility,max_prob\n";
  for (std::size_t t = 0; t < record.iterations.size(); ++t) {
    const auto& it = record.iterations[t];
    for (std::size_t i = 0; i < it.played.size(); ++i) {
      const double pmax = *std::max_element(it.probs[i].begin(), it.probs[i].end());
      os << t + 1 << ',' << i << ',' << it.played[i] << ','
         << format_number(game.strategies[i][it.played[i]]) << ',' << format_number(it.gains[i])
         << ',' << format_number(it.expected[i]) << ',' << format_number(pmax) << '\n';
    }
  }
  return os.str();
}

std::string series_csv(const Game& game, const RunRecord& record, std::size_t window) {
  if (window == 0) throw ValidationError("series window must be positive");
  std::ostringstream os;
  os << "window,iter_start,iter_end,src,strategy_index,strategy,mean_prob,mean_expected_gain\n";
  const std::size_t total = record.iterations.size();
  for (std::size_t w = 0; w * window < total; ++w) {
    const std::size_t begin = w * window;
    const std::size_t end = std::min(total, begin + window);
    const auto len = static_cast<double>(end - begin);
    for (std::size_t i = 0; i < game.players(); ++i) {
      double gain = 0.0;
      std::vector<double> probs(game.strategies[i].size(), 0.0);
      for (std::size_t t = begin; t < end; ++t) {
        gain += record.iterations[t].expected[i];
        for (std::size_t j = 0; j < probs.size(); ++j) probs[j] += record.iterations[t].probs[i][j];
      }
      for (std::size_t j = 0; j < probs.size(); ++j) {
        os << w << ',' << begin + 1 << ',' << end << ',' << i << ',' << j << ','
           << format_number(game.strategies[i][j]) << ',' << format_number(probs[j] / len) << ','
           << format_number(gain / len) << '\n';
      }
    }
  }
  return os.str();
}

std::string manifest_json(const Scenario& scenario, const RunSummary& s) {
  json m;
  m["tool"] = "femto_share";
  m["version"] = version_string();
  m["scenario_name"] = scenario.name;
  m["seed"] = s.seed;
  m["srcs"] = scenario.srcs.size();
  m["learning"] = {{"b", scenario.learning.b},
                   {"max_iters", scenario.learning.max_iters},
                   {"p_threshold", scenario.learning.p_threshold},
                   {"q", scenario.learning.q},
                   {"normalization", to_string(scenario.learning.normalization)},
                   {"gain_mode", to_string(scenario.learning.gain_mode)}};
  m["converged"] = s.converged;
  m["iterations"] = s.iterations;
  m["convergence_iteration"] = s.converged ? json(s.iterations) : json(nullptr);
  m["connections"] = s.connections;
  m["profile_indices"] = s.profile;
  m["profile"] = s.strategies;
  m["ne_certified"] = s.ne_certified ? json(*s.ne_certified) : json(nullptr);
  m["expected_gains"] = s.expected_gains;
  m["scenario_toml"] = write_scenario(scenario);
  return m.dump(2) + "\n";
}

SimulateResult cmd_simulate(const Scenario& scenario, const std::filesystem::path& out_dir,
                            std::optional<std::uint64_t> seed) {
  const Game game = make_game(scenario);
  ProfileCache cache(game);
  const std::vector<std::uint64_t> seeds = seed ? std::vector{*seed} : scenario.seeds;
  SimulateResult res;
  for (auto s : seeds) {
    const RunRecord rec = run_learning(game, scenario.learning, s, &cache);
    RunSummary summary = summarize_run(game, rec, cache);
    const auto dir = out_dir / ("seed_" + std::to_string(s));
    write_text(dir / "runs.csv", runs_csv(game, rec));
    write_text(dir / "series.csv", series_csv(game, rec));
    write_text(dir / "manifest.json", manifest_json(scenario, summary));
    res.runs.push_back(std::move(summary));
    res.run_dirs.push_back(dir);
  }
  return res;
}

std::pair<Scenario, std::uint64_t> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string() + ": cannot open manifest");
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  if (!m.contains("scenario_toml") || !m["scenario_toml"].is_string()) {
    throw ValidationError(path.string() + ": scenario_toml: missing or not a string");
  }
  if (!m.contains("seed") || !m["seed"].is_number_unsigned()) {
    throw ValidationError(path.string() + ": seed: missing or not an unsigned integer");
  }
  auto scenario = parse_scenario(m["scenario_toml"].get<std::string>(),
                                 path.string() + "#scenario_toml", {.allow_large_n = true});
  return {std::move(scenario), m["seed"].get<std::uint64_t>()};
}

EquilibriaResult cmd_equilibria(const Scenario& scenario, const std::filesystem::path& out_dir) {
  const Game game = make_game(scenario);
  EquilibriaResult res;
  res.matrix = build_payoff_matrix(game, scenario.max_profiles);
  res.pure_ne = find_pure_ne(res.matrix);
  res.brd = best_response_dynamics(res.matrix, Profile(game.players(), 0));

  const std::size_t n = game.players();
  std::ostringstream matrix_csv;
  matrix_csv << "rank";
  for (std::size_t i = 0; i < n; ++i) matrix_csv << ",s_" << i + 1;
  for (std::size_t i = 0; i < n; ++i) matrix_csv << ",U_" << i + 1;
  matrix_csv << ",pure_ne\n";
  std::vector<bool> is_ne(res.matrix.profiles(), false);
  for (const auto& p : res.pure_ne) is_ne[res.matrix.rank(p)] = true;
  for (std::uint64_t r = 0; r < res.matrix.profiles(); ++r) {
    const auto values = game.strategy_values(res.matrix.profile(r));
    matrix_csv << r;
    for (double v : values) matrix_csv << ',' << format_number(v);
    for (std::size_t i = 0; i < n; ++i) matrix_csv << ',' << format_number(res.matrix.utility(r, i));
    matrix_csv << ',' << (is_ne[r] ? 1 : 0) << '\n';
  }

  std::ostringstream ne_csv;
  ne_csv << "rank";
  for (std::size_t i = 0; i < n; ++i) ne_csv << ",s_" << i + 1;
  ne_csv << '\n';
  json ne_list = json::array();
  for (const auto& p : res.pure_ne) {
    const auto values = game.strategy_values(p);
    ne_csv << res.matrix.rank(p);
    for (double v : values) ne_csv << ',' << format_number(v);
    ne_csv << '\n';
    ne_list.push_back(values);
  }

  json summary;
  summary["tool"] = "femto_share";
  summary["version"] = version_string();
  summary["scenario_name"] = scenario.name;
  summary["profiles"] = res.matrix.profiles();
  summary["pure_ne_count"] = res.pure_ne.size();
  summary["pure_ne"] = ne_list;
  summary["brd"] = {{"start", Profile(n, 0)},
                    {"steps", res.brd.trace.size()},
                    {"terminal", game.strategy_values(res.brd.terminal)}};
  summary["scenario_toml"] = write_scenario(scenario);

  write_text(out_dir / "payoff_matrix.csv", matrix_csv.str());
  write_text(out_dir / "pure_ne.csv", ne_csv.str());
  write_text(out_dir / "equilibria.json", summary.dump(2) + "\n");
  return res;
}

std::pair<std::size_t, std::size_t> parse_n_range(const std::string& text) {
  const auto parse = [&](std::string_view part) {
    std::size_t v = 0;
    const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (res.ec != std::errc{} || res.ptr != part.data() + part.size() || part.empty()) {
      throw ValidationError("--n: expected 'a..b' or 'a', got '" + text + "'");
    }
    return v;
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const auto v = parse(text);
    return {v, v};
  }
  const auto lo = parse(std::string_view(text).substr(0, dots));
  const auto hi = parse(std::string_view(text).substr(dots + 2));
  if (lo > hi) throw ValidationError("--n: empty range '" + text + "'");
  return {lo, hi};
}

SweepResult cmd_sweep(const Scenario& base, const SweepOptions& options,
                      const std::filesystem::path& out_dir) {
  if (options.n_min == 0 || options.n_min > options.n_max) {
    throw ValidationError("sweep: invalid N range");
  }
  if (!options.allow_large_n && (options.n_min < 2 || options.n_max > base.max_srcs)) {
    throw ValidationError("sweep: N range must lie within [2, " + std::to_string(base.max_srcs) +
                          "] unless large N is explicitly allowed");
  }
  if (options.seed_count == 0) throw ValidationError("sweep: need at least one seed");
  if (base.srcs.empty()) throw ValidationError("sweep: base scenario has no SRC to clone");

  SweepResult result;
  for (std::size_t n = options.n_min; n <= options.n_max; ++n) {
    Scenario sc = base;
    sc.name = base.name + "_n" + std::to_string(n);
    sc.srcs.assign(n, base.srcs.front());
    validate(sc, {.allow_large_n = options.allow_large_n});
    const Game game = make_game(sc);

    SweepRow row;
    row.n = n;
    row.runs.resize(options.seed_count);
    parallel_for(options.seed_count, options.threads, [&](std::size_t k) {
      // Caches are per task; runs share nothing mutable.
      ProfileCache cache(game);
      const auto rec = run_learning(game, sc.learning, k + 1, &cache);
      row.runs[k] = summarize_run(game, rec, cache);
    });

    std::vector<double> iters;
    std::vector<double> conns;
    for (const auto& r : row.runs) {
      if (!r.converged) continue;
      ++row.converged;
      iters.push_back(static_cast<double>(r.iterations));
      conns.push_back(static_cast<double>(r.connections));
      if (!r.ne_certified.value_or(false)) row.all_certified = false;
    }
    row.median_iterations = median(iters);
    row.median_connections = median(conns);
    result.rows.push_back(std::move(row));
  }

  std::optional<double> prev;
  for (const auto& row : result.rows) {
    if (!row.median_iterations) continue;
    if (prev && *row.median_iterations < *prev) result.nondecreasing = false;
    prev = row.median_iterations;
  }

  std::ostringstream table;
  table << "n,runs,converged,median_iterations,median_connections,all_ne_certified\n";
  std::ostringstream runs;
  runs << "n,seed,converged,iterations,connections,profile,ne_certified\n";
  json rows = json::array();
  for (const auto& row : result.rows) {
    table << row.n << ',' << row.runs.size() << ',' << row.converged << ','
          << (row.median_iterations ? format_number(*row.median_iterations) : "nan") << ','
          << (row.median_connections ? format_number(*row.median_connections) : "nan") << ','
          << (row.all_certified ? 1 : 0) << '\n';
    for (const auto& r : row.runs) {
      runs << row.n << ',' << r.seed << ',' << (r.converged ? 1 : 0) << ',' << r.iterations << ','
           << r.connections << ',' << join_profile(r.strategies) << ','
           << (r.ne_certified ? (*r.ne_certified ? "1" : "0") : "") << '\n';
    }
    rows.push_back({{"n", row.n},
                    {"runs", row.runs.size()},
                    {"converged", row.converged},
                    {"median_iterations", optional_json(row.median_iterations)},
                    {"median_connections", optional_json(row.median_connections)},
                    {"all_ne_certified", row.all_certified}});
  }
  json summary;
  summary["tool"] = "femto_share";
  summary["version"] = version_string();
  summary["scenario_name"] = base.name;
  summary["seeds"] = options.seed_count;
  summary["rows"] = rows;
  summary["median_trend_nondecreasing"] = result.nondecreasing;
  summary["scenario_toml"] = write_scenario(base);

  write_text(out_dir / "table1.csv", table.str());
  write_text(out_dir / "sweep_runs.csv", runs.str());
  write_text(out_dir / "sweep.json", summary.dump(2) + "\n");
  return result;
}

}  // namespace femto
