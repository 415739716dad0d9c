#include "femto/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <toml++/toml.hpp>

#include "femto/error.hpp"

namespace femto {

namespace {

[[noreturn]] void fail(std::string_view path, const std::string& what) {
  throw ValidationError(std::string(path) + ": " + what);
}

template <typename Fn>
void at(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

double get_double(const toml::table& tbl, std::string_view key, const std::string& path) {
  const auto* node = tbl.get(key);
  if (node == nullptr) fail(path + "." + std::string(key), "missing required field");
  if (auto v = node->value<double>()) return *v;
  fail(path + "." + std::string(key), "expected a number");
}

double get_double_or(const toml::table& tbl, std::string_view key, const std::string& path,
                     double fallback) {
  return tbl.contains(key) ? get_double(tbl, key, path) : fallback;
}

std::int64_t get_int_or(const toml::table& tbl, std::string_view key, const std::string& path,
                        std::int64_t fallback) {
  const auto* node = tbl.get(key);
  if (node == nullptr) return fallback;
  if (!node->is_integer()) fail(path + "." + std::string(key), "expected an integer");
  return *node->value<std::int64_t>();
}

std::uint64_t get_count_or(const toml::table& tbl, std::string_view key, const std::string& path,
                           std::uint64_t fallback) {
  const auto v = get_int_or(tbl, key, path, static_cast<std::int64_t>(fallback));
  if (v < 0) fail(path + "." + std::string(key), "must be non-negative");
  return static_cast<std::uint64_t>(v);
}

std::string get_string_or(const toml::table& tbl, std::string_view key, const std::string& path,
                          std::string fallback) {
  const auto* node = tbl.get(key);
  if (node == nullptr) return fallback;
  if (!node->is_string()) fail(path + "." + std::string(key), "expected a string");
  return *node->value<std::string>();
}

const toml::table& get_table(const toml::table& root, std::string_view key) {
  const auto* node = root.get(key);
  if (node == nullptr) fail(key, "missing required table");
  if (!node->is_table()) fail(key, "expected a table");
  return *node->as_table();
}

const toml::table* get_optional_table(const toml::table& root, std::string_view key) {
  const auto* node = root.get(key);
  if (node == nullptr) return nullptr;
  if (!node->is_table()) fail(key, "expected a table");
  return node->as_table();
}

}  // namespace

bool operator==(const Scenario& a, const Scenario& b) {
  const auto spc_eq = [](const SpcProfile& x, const SpcProfile& y) {
    return x.mu == y.mu && x.gamma == y.gamma && x.psi == y.psi && x.b_s == y.b_s &&
           x.delta == y.delta;
  };
  const auto src_eq = [](const SrcProfile& x, const SrcProfile& y) {
    return x.alpha == y.alpha && x.beta == y.beta && x.kappa == y.kappa &&
           x.epsilon == y.epsilon;
  };
  if (a.srcs.size() != b.srcs.size()) return false;
  for (std::size_t i = 0; i < a.srcs.size(); ++i) {
    if (!src_eq(a.srcs[i], b.srcs[i])) return false;
  }
  const auto& la = a.learning;
  const auto& lb = b.learning;
  return a.name == b.name && spc_eq(a.spc, b.spc) && a.file_size == b.file_size &&
         a.t1 == b.t1 && a.t2 == b.t2 && a.grid_step == b.grid_step &&
         a.maps.revenue == b.maps.revenue && a.maps.cost == b.maps.cost && la.b == lb.b &&
         la.max_iters == lb.max_iters && la.p_threshold == lb.p_threshold && la.q == lb.q &&
         la.normalization == lb.normalization && la.gain_mode == lb.gain_mode &&
         a.seeds == b.seeds && a.max_srcs == b.max_srcs &&
         a.max_enumeration == b.max_enumeration && a.max_profiles == b.max_profiles;
}

void validate(const Scenario& s, const LoadOptions& options) {
  at("spc", [&] { femto::validate(s.spc); });
  // A Gamma-dominant SPC flips the sign of the outcome and would deny every
  // request; such scenarios are out of scope.
  if (s.spc.mu < 0.5) fail("spc.mu", "scenarios require a gain-sensitive SPC (mu > 0.5)");
  if (s.srcs.empty()) fail("srcs", "at least one SRC is required");
  if (!options.allow_large_n && s.srcs.size() > s.max_srcs) {
    fail("srcs", std::to_string(s.srcs.size()) + " SRCs exceed the limit of " +
                     std::to_string(s.max_srcs) + " connections per femto access");
  }
  for (std::size_t i = 0; i < s.srcs.size(); ++i) {
    at("srcs[" + std::to_string(i) + "]", [&] {
      femto::validate(s.srcs[i]);
      (void)build_strategy_set(s.srcs[i], i);
    });
  }
  at("qos", [&] { (void)qos_bounds(s.file_size, s.t1, s.t2); });
  if (!std::isfinite(s.grid_step) || s.grid_step < 0.0) {
    fail("allocation.grid_step", "must be positive (or omitted for the default)");
  }
  at("learning", [&] { femto::validate(s.learning); });
  if (s.learning.max_iters == 0) fail("learning.max_iters", "must be positive");
  if (s.seeds.empty()) fail("learning.seeds", "at least one seed is required");
  if (s.max_profiles == 0 || s.max_enumeration == 0) fail("limits", "caps must be positive");
}

Scenario parse_scenario(std::string_view toml_text, std::string_view source,
                        const LoadOptions& options) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
       << e.description();
    throw ValidationError(os.str());
  }

  Scenario s;
  s.name = get_string_or(root, "name", "", s.name);

  const auto& spc = get_table(root, "spc");
  s.spc.mu = get_double(spc, "mu", "spc");
  s.spc.gamma = get_double_or(spc, "gamma", "spc", 1.0 - s.spc.mu);
  s.spc.psi = get_double(spc, "psi", "spc");
  s.spc.b_s = get_double(spc, "b_s", "spc");
  s.spc.delta = get_double(spc, "delta", "spc");

  if (const auto* qos = get_optional_table(root, "qos")) {
    s.file_size = get_double_or(*qos, "file_size", "qos", s.file_size);
    s.t1 = get_double_or(*qos, "t1", "qos", s.t1);
    s.t2 = get_double_or(*qos, "t2", "qos", s.t2);
  }

  if (const auto* alloc = get_optional_table(root, "allocation")) {
    s.grid_step = get_double_or(*alloc, "grid_step", "allocation", 0.0);
    at("allocation.rev_map", [&] {
      s.maps.revenue = parse_response_curve(get_string_or(*alloc, "rev_map", "allocation", "linear"));
    });
    at("allocation.cost_map", [&] {
      s.maps.cost = parse_response_curve(get_string_or(*alloc, "cost_map", "allocation", "linear"));
    });
  }

  if (const auto* learn = get_optional_table(root, "learning")) {
    auto& l = s.learning;
    l.b = get_double_or(*learn, "b", "learning", l.b);
    l.max_iters = get_count_or(*learn, "max_iters", "learning", l.max_iters);
    l.p_threshold = get_double_or(*learn, "p_threshold", "learning", l.p_threshold);
    l.q = get_double_or(*learn, "q", "learning", l.q);
    at("learning.normalization", [&] {
      l.normalization = parse_normalization_mode(
          get_string_or(*learn, "normalization", "learning", to_string(l.normalization)));
    });
    at("learning.gain_mode", [&] {
      l.gain_mode =
          parse_gain_mode(get_string_or(*learn, "gain_mode", "learning", to_string(l.gain_mode)));
    });
    if (const auto* seeds = learn->get("seeds")) {
      const auto* arr = seeds->as_array();
      if (arr == nullptr) fail("learning.seeds", "expected an array of integers");
      s.seeds.clear();
      for (std::size_t i = 0; i < arr->size(); ++i) {
        const auto v = (*arr)[i].value<std::int64_t>();
        if (!v || *v < 0) {
          fail("learning.seeds[" + std::to_string(i) + "]", "expected a non-negative integer");
        }
        s.seeds.push_back(static_cast<std::uint64_t>(*v));
      }
    }
  }

  if (const auto* limits = get_optional_table(root, "limits")) {
    s.max_srcs = get_count_or(*limits, "max_srcs", "limits", s.max_srcs);
    s.max_enumeration = get_count_or(*limits, "max_enumeration", "limits", s.max_enumeration);
    s.max_profiles = get_count_or(*limits, "max_profiles", "limits", s.max_profiles);
  }

  const auto* srcs_node = root.get("srcs");
  if (srcs_node == nullptr) fail("srcs", "missing required array of tables");
  const auto* srcs = srcs_node->as_array();
  if (srcs == nullptr) fail("srcs", "expected an array of tables");
  for (std::size_t i = 0; i < srcs->size(); ++i) {
    const std::string path = "srcs[" + std::to_string(i) + "]";
    const auto* tbl = (*srcs)[i].as_table();
    if (tbl == nullptr) fail(path, "expected a table");
    SrcProfile src;
    src.alpha = get_double(*tbl, "alpha", path);
    src.beta = get_double_or(*tbl, "beta", path, 1.0 - src.alpha);
    src.kappa = get_double(*tbl, "kappa", path);
    src.epsilon = get_double(*tbl, "epsilon", path);
    s.srcs.push_back(src);
  }

  validate(s, options);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string() + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string(), options);
}

std::string write_scenario(const Scenario& s) {
  toml::table root;
  root.insert("name", s.name);
  root.insert("spc", toml::table{{"mu", s.spc.mu},
                                 {"gamma", s.spc.gamma},
                                 {"psi", s.spc.psi},
                                 {"b_s", s.spc.b_s},
                                 {"delta", s.spc.delta}});
  root.insert("qos", toml::table{{"file_size", s.file_size}, {"t1", s.t1}, {"t2", s.t2}});
  toml::table alloc{{"rev_map", to_string(s.maps.revenue)}, {"cost_map", to_string(s.maps.cost)}};
  if (s.grid_step > 0.0) alloc.insert("grid_step", s.grid_step);
  root.insert("allocation", std::move(alloc));
  toml::array seeds;
  for (auto seed : s.seeds) seeds.push_back(static_cast<std::int64_t>(seed));
  root.insert("learning", toml::table{{"b", s.learning.b},
                                      {"max_iters", static_cast<std::int64_t>(s.learning.max_iters)},
                                      {"p_threshold", s.learning.p_threshold},
                                      {"q", s.learning.q},
                                      {"normalization", to_string(s.learning.normalization)},
                                      {"gain_mode", to_string(s.learning.gain_mode)},
                                      {"seeds", std::move(seeds)}});
  root.insert("limits", toml::table{{"max_srcs", static_cast<std::int64_t>(s.max_srcs)},
                                    {"max_enumeration", static_cast<std::int64_t>(s.max_enumeration)},
                                    {"max_profiles", static_cast<std::int64_t>(s.max_profiles)}});
  toml::array srcs;
  for (const auto& src : s.srcs) {
    srcs.push_back(toml::table{{"alpha", src.alpha},
                               {"beta", src.beta},
                               {"kappa", src.kappa},
                               {"epsilon", src.epsilon}});
  }
  root.insert("srcs", std::move(srcs));
  std::ostringstream os;
  os << root << '\n';
  return os.str();
}

QosBounds scenario_bounds(const Scenario& s) { return qos_bounds(s.file_size, s.t1, s.t2); }

Game make_game(const Scenario& s) {
  AllocationLimits limits;
  limits.max_enumeration = s.max_enumeration;
  limits.label = "scenario '" + s.name + "'";
  return make_game(s.spc, s.srcs, scenario_bounds(s), s.grid_step, s.maps, std::move(limits));
}

}  // namespace femto
