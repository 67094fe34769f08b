#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "secgame/errors.hpp"
#include "secgame/game.hpp"
#include "secgame/lincontrol.hpp"
#include "secgame/lossmap.hpp"
#include "secgame/modelio.hpp"
#include "secgame/robust.hpp"

namespace py = pybind11;
using namespace secgame;

PYBIND11_MODULE(_secgame, m) {
    m.doc() = "Cost-based Stackelberg security games over network control "
              "systems";

    py::register_exception<Error>(m, "SecgameError");

    py::class_<NodeBlock>(m, "NodeBlock")
        .def(py::init([](int states, int inputs) {
                 return NodeBlock{states, inputs};
             }),
             py::arg("num_states"), py::arg("num_inputs"))
        .def_readwrite("num_states", &NodeBlock::num_states)
        .def_readwrite("num_inputs", &NodeBlock::num_inputs);

    py::class_<StateSpaceModel>(m, "StateSpaceModel")
        .def(py::init<>())
        .def_readwrite("name", &StateSpaceModel::name)
        .def_readwrite("A", &StateSpaceModel::A)
        .def_readwrite("B", &StateSpaceModel::B)
        .def_readwrite("D", &StateSpaceModel::D)
        .def_readwrite("Q", &StateSpaceModel::Q)
        .def_readwrite("R", &StateSpaceModel::R)
        .def_readwrite("partition", &StateSpaceModel::partition)
        .def_property_readonly("num_states", &StateSpaceModel::num_states)
        .def_property_readonly("num_nodes", &StateSpaceModel::num_nodes);

    py::enum_<MaskMode>(m, "MaskMode")
        .value("FULL_NODE", MaskMode::FullNode)
        .value("INTER_NODE_ONLY", MaskMode::InterNodeOnly);

    py::class_<SynthOptions>(m, "SynthOptions")
        .def(py::init<>())
        .def_readwrite("grad_tol", &SynthOptions::grad_tol)
        .def_readwrite("max_iter", &SynthOptions::max_iter);

    py::class_<SynthesisReport>(m, "SynthesisReport")
        .def_readonly("K", &SynthesisReport::K)
        .def_readonly("J", &SynthesisReport::J)
        .def_readonly("iterations", &SynthesisReport::iterations)
        .def_readonly("converged", &SynthesisReport::converged);

    py::class_<LossEntry>(m, "LossEntry")
        .def_readonly("J", &LossEntry::J)
        .def_readonly("delta", &LossEntry::delta)
        .def_readonly("converged", &LossEntry::converged);

    py::class_<LossTable>(m, "LossTable")
        .def_readonly("model_hash", &LossTable::model_hash)
        .def_readonly("n", &LossTable::n)
        .def_readonly("J_opt", &LossTable::J_opt)
        .def_readonly("entries", &LossTable::entries)
        .def("delta", &LossTable::delta, py::arg("pattern_index"))
        .def("any_nonconverged", &LossTable::any_nonconverged);

    py::class_<Action>(m, "Action")
        .def(py::init([](std::vector<double> levels, double cost) {
                 return Action{std::move(levels), cost};
             }),
             py::arg("levels"), py::arg("cost") = 0.0)
        .def_readwrite("levels", &Action::levels)
        .def_readwrite("cost", &Action::cost);

    py::class_<GameConfig>(m, "GameConfig")
        .def(py::init<>())
        .def_readwrite("n", &GameConfig::n)
        .def_readwrite("level_count_attacker", &GameConfig::level_count_attacker)
        .def_readwrite("level_count_defender", &GameConfig::level_count_defender)
        .def_readwrite("gamma_a", &GameConfig::gamma_a)
        .def_readwrite("gamma_d", &GameConfig::gamma_d)
        .def_readwrite("jobs", &GameConfig::jobs);

    py::class_<CbseResult>(m, "CbseResult")
        .def_readonly("attacker_strategy", &CbseResult::attacker_strategy)
        .def_readonly("defender_strategy", &CbseResult::defender_strategy)
        .def_readonly("attacker_payoff", &CbseResult::attacker_payoff)
        .def_readonly("defender_payoff", &CbseResult::defender_payoff)
        .def_readonly("attacker_cost", &CbseResult::attacker_cost)
        .def_readonly("defender_cost", &CbseResult::defender_cost)
        .def_readonly("used_nonconverged_losses",
                      &CbseResult::used_nonconverged_losses);

    py::class_<ModelSet>(m, "ModelSet")
        .def(py::init<>())
        .def_readwrite("models", &ModelSet::models)
        .def_readwrite("phi", &ModelSet::phi)
        .def_readwrite("nominal_index", &ModelSet::nominal_index)
        .def_property_readonly("size", &ModelSet::size);

    py::class_<ModelSetTables>(m, "ModelSetTables")
        .def_readonly("per_model", &ModelSetTables::per_model)
        .def_readonly("expected", &ModelSetTables::expected);

    py::class_<MismatchStats>(m, "MismatchStats")
        .def_readonly("values", &MismatchStats::values)
        .def_readonly("degenerate_count", &MismatchStats::degenerate_count)
        .def_readonly("min", &MismatchStats::min)
        .def_readonly("max", &MismatchStats::max)
        .def_readonly("mean", &MismatchStats::mean)
        .def_readonly("median", &MismatchStats::median)
        .def_readonly("q1", &MismatchStats::q1)
        .def_readonly("q3", &MismatchStats::q3);

    py::class_<MismatchReport>(m, "MismatchReport")
        .def_readonly("nominal", &MismatchReport::nominal)
        .def_readonly("average", &MismatchReport::average);

    m.def(
        "load_model",
        [](const std::filesystem::path& path, bool allow_marginal) {
            return load_model(path, LoadOptions{allow_marginal});
        },
        py::arg("path"), py::arg("allow_marginal") = false);
    m.def(
        "load_model_set",
        [](const std::filesystem::path& path, bool allow_marginal) {
            return load_model_set(path, LoadOptions{allow_marginal});
        },
        py::arg("path"), py::arg("allow_marginal") = false);
    m.def("validate_model",
          [](const StateSpaceModel& model) { validate_model(model); },
          py::arg("model"));

    m.def("h2_cost", &h2_cost, py::arg("model"), py::arg("K"));
    m.def("h2_gradient", &h2_gradient, py::arg("model"), py::arg("K"));
    m.def(
        "synth_unstructured",
        [](const StateSpaceModel& model, const SynthOptions& opts) {
            return synth_unstructured(model, opts);
        },
        py::arg("model"), py::arg("options") = SynthOptions{});

    m.def(
        "build_loss_table",
        [](const StateSpaceModel& model, MaskMode mode, int jobs,
           const SynthOptions& opts) {
            return build_loss_table(model, mode, opts, jobs);
        },
        py::arg("model"), py::arg("mode") = MaskMode::FullNode,
        py::arg("jobs") = 1, py::arg("options") = SynthOptions{},
        py::call_guard<py::gil_scoped_release>());
    m.def("importance_ranking", &importance_ranking, py::arg("table"));

    m.def("payoff_attacker", &payoff_attacker, py::arg("attack"),
          py::arg("defense"), py::arg("table"));
    m.def("solve_cbbi", &solve_cbbi, py::arg("config"), py::arg("table"),
          py::call_guard<py::gil_scoped_release>());

    m.def(
        "build_model_set_tables",
        [](const ModelSet& set, MaskMode mode, int jobs,
           const SynthOptions& opts) {
            return build_model_set_tables(set, mode, opts, jobs);
        },
        py::arg("model_set"), py::arg("mode") = MaskMode::FullNode,
        py::arg("jobs") = 1, py::arg("options") = SynthOptions{},
        py::call_guard<py::gil_scoped_release>());
    m.def("solve_average_game", &solve_average_game, py::arg("tables"),
          py::arg("config"), py::call_guard<py::gil_scoped_release>());
    m.def("nominal_mismatch", &nominal_mismatch, py::arg("tables"),
          py::arg("config"), py::arg("model_index"), py::arg("nominal_index"));
    m.def("average_mismatch", &average_mismatch, py::arg("tables"),
          py::arg("config"), py::arg("model_index"));
    m.def("mismatch_statistics", &mismatch_statistics, py::arg("tables"),
          py::arg("cost_grid"), py::arg("config"), py::arg("nominal_index"));
    m.def("controller_mismatch",
          [](const ModelSet& set, int model_index) {
              return controller_mismatch(set, model_index);
          },
          py::arg("model_set"), py::arg("model_index"));
}
