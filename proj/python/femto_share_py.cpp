#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "femto/equilibrium.hpp"
#include "femto/error.hpp"
#include "femto/harness.hpp"
#include "femto/scenario.hpp"

namespace py = pybind11;
using namespace femto;

namespace {

std::string interval_repr(const Interval& iv) {
  return "[" + format_number(iv.lo) + ", " + format_number(iv.hi) + "]";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Allocation, learning and equilibrium routines of femto_share.";
  m.attr("__version__") = version_string();

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
  py::register_exception<PropertyViolation>(m, "PropertyViolation", PyExc_RuntimeError);

  py::class_<SpcProfile>(m, "SpcProfile")
      .def(py::init(&make_spc_profile), py::arg("mu") = 1.0, py::arg("gamma") = 0.0,
           py::arg("psi") = 0.5, py::arg("b_s") = 20.0, py::arg("delta") = 0.1)
      .def_readonly("mu", &SpcProfile::mu)
      .def_readonly("gamma", &SpcProfile::gamma)
      .def_readonly("psi", &SpcProfile::psi)
      .def_readonly("b_s", &SpcProfile::b_s)
      .def_readonly("delta", &SpcProfile::delta)
      .def_property_readonly("green_capacity", &SpcProfile::green_capacity)
      .def_property_readonly("yellow_capacity", &SpcProfile::yellow_capacity);

  py::class_<SrcProfile>(m, "SrcProfile")
      .def(py::init([](double alpha, std::optional<double> beta, double kappa, double epsilon) {
             return make_src_profile(alpha, beta.value_or(1.0 - alpha), kappa, epsilon);
           }),
           py::arg("alpha"), py::arg("beta") = py::none(), py::arg("kappa") = 0.1,
           py::arg("epsilon") = 0.1)
      .def_readonly("alpha", &SrcProfile::alpha)
      .def_readonly("beta", &SrcProfile::beta)
      .def_readonly("kappa", &SrcProfile::kappa)
      .def_readonly("epsilon", &SrcProfile::epsilon)
      .def_property_readonly("qos_sensitive", &SrcProfile::qos_sensitive)
      .def_property_readonly("threshold", &SrcProfile::threshold);

  py::class_<QosBounds>(m, "QosBounds")
      .def_readonly("bw_min", &QosBounds::bw_min)
      .def_readonly("bw_max", &QosBounds::bw_max);
  m.def("qos_bounds", &qos_bounds, py::arg("file_size"), py::arg("t1"), py::arg("t2"));

  py::class_<StrategySet>(m, "StrategySet")
      .def_readonly("values", &StrategySet::values)
      .def_property_readonly("qos_sensitive",
                             [](const StrategySet& s) {
                               return s.orientation == Orientation::qos_sensitive;
                             })
      .def("index_of", &StrategySet::index_of)
      .def("__len__", &StrategySet::size);
  m.def("build_strategy_set", &build_strategy_set, py::arg("profile"), py::arg("owner") = 0);

  py::class_<Interval>(m, "Interval")
      .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
      .def_readonly("lo", &Interval::lo)
      .def_readonly("hi", &Interval::hi)
      .def("__repr__", &interval_repr);

  py::class_<BandwidthRequest>(m, "BandwidthRequest")
      .def(py::init<Interval, Interval>(), py::arg("green"), py::arg("yellow"))
      .def_readonly("green", &BandwidthRequest::green)
      .def_readonly("yellow", &BandwidthRequest::yellow);
  m.def("request_from_strategy", &request_from_strategy, py::arg("profile"), py::arg("s"),
        py::arg("bounds"), py::arg("delta"));

  py::class_<AllocationAnswer>(m, "AllocationAnswer")
      .def_readonly("green", &AllocationAnswer::green)
      .def_readonly("yellow", &AllocationAnswer::yellow)
      .def_readonly("bw", &AllocationAnswer::bw)
      .def_property_readonly("color", [](const AllocationAnswer& a) {
        switch (a.color()) {
          case Color::green: return "green";
          case Color::yellow: return "yellow";
          default: return "deny";
        }
      });

  py::class_<SolutionSet>(m, "SolutionSet")
      .def_readonly("best_outcome", &SolutionSet::best_outcome)
      .def_property_readonly("configs",
                             [](const SolutionSet& s) {
                               std::vector<std::vector<AllocationAnswer>> out;
                               for (const auto& c : s.configs) out.push_back(c.answers);
                               return out;
                             })
      .def("__len__", &SolutionSet::m);

  m.def(
      "solve_allocation",
      [](const std::vector<BandwidthRequest>& reqs, const SpcProfile& spc, double grid_step,
         std::uint64_t max_enumeration) {
        return solve_allocation(reqs, spc, grid_step, AllocationLimits{max_enumeration, "python"});
      },
      py::arg("requests"), py::arg("spc"), py::arg("grid_step"),
      py::arg("max_enumeration") = AllocationLimits{}.max_enumeration);
  m.def(
      "spc_outcome",
      [](const std::vector<AllocationAnswer>& answers, const SpcProfile& spc) {
        return spc_outcome(AllocationConfig{answers}, spc);
      },
      py::arg("answers"), py::arg("spc"));
  m.def(
      "src_utility",
      [](std::size_t i, const SolutionSet& sol, const SrcProfile& p, const QosBounds& b,
         double delta) { return src_utility(i, sol, p, b, delta).raw; },
      py::arg("i"), py::arg("sol"), py::arg("profile"), py::arg("bounds"), py::arg("delta"));

  py::class_<Game>(m, "Game")
      .def_property_readonly("players", &Game::players)
      .def_property_readonly("dims", &Game::dims)
      .def_readonly("strategies", &Game::strategies)
      .def("strategy_values", &Game::strategy_values)
      .def("utilities", [](const Game& g, const Profile& p) {
        std::vector<double> out;
        for (const auto& u : evaluate_profile(g, p).utilities) out.push_back(u.raw);
        return out;
      });
  m.def(
      "make_game",
      [](const SpcProfile& spc, std::vector<SrcProfile> srcs, const QosBounds& bounds,
         double grid_step) { return make_game(spc, std::move(srcs), bounds, grid_step); },
      py::arg("spc"), py::arg("srcs"), py::arg("bounds"), py::arg("grid_step") = 0.0);

  py::class_<LearningParams>(m, "LearningParams")
      .def(py::init([](double b, std::size_t max_iters, double p_threshold, double q,
                       const std::string& normalization, const std::string& gain_mode) {
             LearningParams p;
             p.b = b;
             p.max_iters = max_iters;
             p.p_threshold = p_threshold;
             p.q = q;
             p.normalization = parse_normalization_mode(normalization);
             p.gain_mode = parse_gain_mode(gain_mode);
             validate(p);
             return p;
           }),
           py::arg("b") = 0.1, py::arg("max_iters") = 5000, py::arg("p_threshold") = 0.99,
           py::arg("q") = 1.0, py::arg("normalization") = "zero_floor",
           py::arg("gain_mode") = "sampled")
      .def_readonly("b", &LearningParams::b)
      .def_readonly("max_iters", &LearningParams::max_iters)
      .def_readonly("p_threshold", &LearningParams::p_threshold)
      .def_readonly("q", &LearningParams::q);

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("seed", &RunRecord::seed)
      .def_readonly("converged", &RunRecord::converged)
      .def_readonly("convergence_iteration", &RunRecord::convergence_iteration)
      .def_readonly("final_profile", &RunRecord::final_profile)
      .def_readonly("connections", &RunRecord::connections)
      .def_property_readonly("iterations", &RunRecord::iteration_count)
      .def_property_readonly("final_probs", [](const RunRecord& r) {
        return r.iterations.empty() ? std::vector<std::vector<double>>{}
                                    : r.iterations.back().probs;
      });
  m.def(
      "run_learning",
      [](const Game& g, const LearningParams& p, std::uint64_t seed) {
        py::gil_scoped_release release;
        return run_learning(g, p, seed);
      },
      py::arg("game"), py::arg("params"), py::arg("seed"));

  py::class_<PayoffMatrix>(m, "PayoffMatrix")
      .def_property_readonly("dims", &PayoffMatrix::dims)
      .def_property_readonly("profiles", &PayoffMatrix::profiles)
      .def("utility", py::overload_cast<const Profile&, std::size_t>(&PayoffMatrix::utility,
                                                                     py::const_))
      .def("__len__", &PayoffMatrix::profiles);
  m.def(
      "build_payoff_matrix",
      [](const Game& g, std::uint64_t max_profiles) {
        py::gil_scoped_release release;
        return build_payoff_matrix(g, max_profiles);
      },
      py::arg("game"), py::arg("max_profiles") = 1'000'000);
  m.def("find_pure_ne", &find_pure_ne, py::arg("matrix"));
  m.def(
      "certify_pure_ne",
      [](const Game& g, const Profile& p) {
        ProfileCache cache(g);
        return certify_pure_ne(g, p, cache);
      },
      py::arg("game"), py::arg("profile"));

  py::class_<BrdResult>(m, "BrdResult")
      .def_readonly("terminal", &BrdResult::terminal)
      .def_property_readonly("steps", [](const BrdResult& r) { return r.trace.size(); });
  m.def("best_response_dynamics", &best_response_dynamics, py::arg("matrix"), py::arg("start"),
        py::arg("max_steps") = 100'000);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("spc", &Scenario::spc)
      .def_readonly("srcs", &Scenario::srcs)
      .def_readonly("learning", &Scenario::learning)
      .def_readonly("seeds", &Scenario::seeds)
      .def_property_readonly("bounds", &scenario_bounds)
      .def("game", [](const Scenario& s) { return make_game(s); })
      .def("to_toml", &write_scenario)
      .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; });
  m.def(
      "load_scenario",
      [](const std::filesystem::path& path, bool allow_large_n) {
        return load_scenario(path, LoadOptions{allow_large_n});
      },
      py::arg("path"), py::arg("allow_large_n") = false);
  m.def(
      "parse_scenario",
      [](const std::string& text, bool allow_large_n) {
        return parse_scenario(text, "<string>", LoadOptions{allow_large_n});
      },
      py::arg("text"), py::arg("allow_large_n") = false);
}
