#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "meshrl/config.hpp"
#include "meshrl/csv.hpp"
#include "meshrl/evalharness.hpp"
#include "meshrl/ground_truth.hpp"
#include "meshrl/loadgen.hpp"
#include "meshrl/oracle.hpp"
#include "meshrl/pipeline.hpp"
#include "meshrl/rewards.hpp"
#include "meshrl/sysmodel.hpp"
#include "meshrl/trace.hpp"

namespace py = pybind11;
using namespace meshrl;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Service-mesh routing/admission control with a learned delay surrogate.";

  py::class_<Action>(m, "Action")
      .def(py::init<>())
      .def(py::init([](double p11, double p21, double b1, double b2) {
             Action a{p11, p21, b1, b2};
             a.validate();
             return a;
           }),
           py::arg("p11"), py::arg("p21"), py::arg("b1"), py::arg("b2"))
      .def_readwrite("p11", &Action::p11)
      .def_readwrite("p21", &Action::p21)
      .def_readwrite("b1", &Action::b1)
      .def_readwrite("b2", &Action::b2)
      .def("__eq__", [](const Action& a, const Action& b) { return a == b; })
      .def("__repr__", [](const Action& a) {
        std::ostringstream s;
        s << "Action(p11=" << a.p11 << ", p21=" << a.p21 << ", b1=" << a.b1 << ", b2=" << a.b2
          << ")";
        return s.str();
      });

  py::class_<ActionGrid>(m, "ActionGrid")
      .def(py::init<int>(), py::arg("levels") = 6)
      .def("__len__", &ActionGrid::size)
      .def("__getitem__", [](const ActionGrid& g, std::size_t i) { return g.at(i); })
      .def("index_of", [](const ActionGrid& g, std::array<int, 4> idx) { return g.index_of(idx); })
      .def_property_readonly("levels", &ActionGrid::levels);

  py::enum_<ObjectiveKind>(m, "ObjectiveKind")
      .value("MO1", ObjectiveKind::MO1)
      .value("MO2", ObjectiveKind::MO2)
      .value("MO3", ObjectiveKind::MO3);

  py::class_<ManagementObjective>(m, "ManagementObjective")
      .def(py::init(&ManagementObjective::defaults), py::arg("kind"))
      .def_readwrite("kind", &ManagementObjective::kind)
      .def_readwrite("delay_bounds", &ManagementObjective::delay_bounds)
      .def_readwrite("utility_weights", &ManagementObjective::utility_weights)
      .def_readwrite("starvation_threshold", &ManagementObjective::starvation_threshold)
      .def_readwrite("delay_steepness", &ManagementObjective::delay_steepness)
      .def_readwrite("load_steepness", &ManagementObjective::load_steepness);

  py::class_<GroundTruthParams>(m, "GroundTruthParams")
      .def(py::init<>())
      .def_readwrite("capacity", &GroundTruthParams::capacity)
      .def_readwrite("work_cost", &GroundTruthParams::work_cost)
      .def_readwrite("base_delay", &GroundTruthParams::base_delay)
      .def_readwrite("front_delay", &GroundTruthParams::front_delay)
      .def_readwrite("max_delay", &GroundTruthParams::max_delay)
      .def_readwrite("noise_rel", &GroundTruthParams::noise_rel)
      .def_readwrite("seed", &GroundTruthParams::seed);

  py::class_<StepOutcome>(m, "StepOutcome")
      .def_readonly("d1", &StepOutcome::d1)
      .def_readonly("d2", &StepOutcome::d2)
      .def_readonly("lc1", &StepOutcome::lc1)
      .def_readonly("lc2", &StepOutcome::lc2);

  m.def("expected_step", &expected_step, py::arg("params"), py::arg("l1"), py::arg("l2"),
        py::arg("action"));
  m.def("ground_truth_step", &step, py::arg("params"), py::arg("l1"), py::arg("l2"),
        py::arg("action"), py::arg("step"));
  m.def("carried_load", &carried_load, py::arg("load"), py::arg("blocking"));
  m.def("reward",
        py::overload_cast<const ManagementObjective&, double, double, const Action&, double,
                          double>(&reward),
        py::arg("objective"), py::arg("l1"), py::arg("l2"), py::arg("action"), py::arg("d1"),
        py::arg("d2"));

  py::class_<LoadPattern>(m, "LoadPattern")
      .def_static("random", &LoadPattern::random, py::arg("seed"))
      .def_static("sinusoidal", &LoadPattern::sinusoidal, py::arg("period") = 100.0,
                  py::arg("phase") = std::array<double, 2>{0.0, std::numbers::pi / 2.0})
      .def("loads", [](const LoadPattern& p, std::size_t t) {
        const LoadPair l = offered_loads(p, t);
        return std::make_pair(l.l1, l.l2);
      });

  py::class_<Trace>(m, "Trace")
      .def("__len__", &Trace::size)
      .def("to_csv", [](const Trace& t) { return trace_csv(t); })
      .def("split", &split_train_test);
  m.def("collect_trace_random", &collect_trace_random, py::arg("env"), py::arg("steps"),
        py::arg("seed"), py::arg("grid") = ActionGrid(6),
        py::arg("load_levels") = std::vector<double>{5, 10, 15, 20});
  m.def("collect_trace_grid", &collect_trace_grid, py::arg("env"), py::arg("repetitions"),
        py::arg("seed"), py::arg("grid") = ActionGrid(6),
        py::arg("load_levels") = std::vector<double>{5, 10, 15, 20});

  py::class_<ModelAccuracy>(m, "ModelAccuracy")
      .def_readonly("nmae_d1", &ModelAccuracy::nmae_d1)
      .def_readonly("nmae_d2", &ModelAccuracy::nmae_d2)
      .def_readonly("r2_d1", &ModelAccuracy::r2_d1)
      .def_readonly("r2_d2", &ModelAccuracy::r2_d2)
      .def_readonly("naive_nmae_d1", &ModelAccuracy::naive_nmae_d1)
      .def_readonly("naive_nmae_d2", &ModelAccuracy::naive_nmae_d2)
      .def_readonly("samples", &ModelAccuracy::samples);

  py::class_<SystemModel>(m, "SystemModel")
      .def("predict",
           [](const SystemModel& s, double l1, double l2, double p11, double p21, double b1,
              double b2) {
             const Delays d = s.predict(l1, l2, p11, p21, b1, b2);
             return std::make_pair(d.d1, d.d2);
           },
           py::arg("l1"), py::arg("l2"), py::arg("p11"), py::arg("p21"), py::arg("b1"),
           py::arg("b2"))
      .def("save", &SystemModel::save)
      .def_static("load", &SystemModel::load);
  m.def(
      "fit_system_model",
      [](const Trace& trace, std::size_t num_trees, std::size_t max_depth, std::size_t min_leaf,
         std::uint64_t seed) {
        SurrogateOptions o;
        o.num_trees = num_trees;
        o.max_depth = max_depth;
        o.min_leaf = min_leaf;
        o.seed = seed;
        return fit_system_model(trace, o);
      },
      py::arg("trace"), py::arg("num_trees") = 100, py::arg("max_depth") = 20,
      py::arg("min_leaf") = 1, py::arg("seed") = 0);
  m.def("evaluate_model", &evaluate_model, py::arg("model"), py::arg("test"));

  py::class_<OracleResult>(m, "OracleResult")
      .def_readonly("best_index", &OracleResult::best_index)
      .def_readonly("best_action", &OracleResult::best_action)
      .def_readonly("best_reward", &OracleResult::best_reward);
  m.def(
      "optimal_ground_truth",
      [](const GroundTruthParams& gt, const ManagementObjective& mo, double l1, double l2,
         const ActionGrid& grid) { return optimal(ground_truth_delays(gt), mo, {l1, l2}, grid); },
      py::arg("params"), py::arg("objective"), py::arg("l1"), py::arg("l2"),
      py::arg("grid") = ActionGrid(6));
  m.def(
      "optimal_surrogate",
      [](const SystemModel& s, const ManagementObjective& mo, double l1, double l2,
         const ActionGrid& grid) { return optimal(surrogate_delays(s), mo, {l1, l2}, grid); },
      py::arg("model"), py::arg("objective"), py::arg("l1"), py::arg("l2"),
      py::arg("grid") = ActionGrid(6));

  m.def(
      "normalized_reward",
      [](double obtained, double optimum) {
        const NormalizedReward nr = normalized_reward(obtained, optimum);
        return std::make_pair(nr.value, nr.flagged);
      },
      py::arg("obtained"), py::arg("optimal"));

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_static("from_json", &parse_config, py::arg("text"))
      .def_static("load", &load_config, py::arg("path"))
      .def("to_json", &dump_config)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("output_dir", &ScenarioConfig::output_dir);

  m.def(
      "run_pipeline",
      [](const ScenarioConfig& config, bool force) {
        std::vector<std::tuple<int, std::string, std::string, std::size_t, double>> rows;
        {
          py::gil_scoped_release release;
          Pipeline p(config, {force, nullptr});
          for (const auto& r : p.run())
            rows.emplace_back(r.scenario, r.environment, r.load_pattern, r.steps, r.anr);
        }
        return rows;
      },
      py::arg("config"), py::arg("force") = false,
      "Runs every stage and returns (scenario, environment, load_pattern, steps, anr) rows.");
}
