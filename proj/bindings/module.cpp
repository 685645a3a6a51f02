// Copyright 2026 The parkplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "parkplan/artifact.hpp"
#include "parkplan/discretization.hpp"
#include "parkplan/reeds_shepp.hpp"
#include "parkplan/scenario.hpp"
#include "parkplan/scvx.hpp"
#include "parkplan/stc.hpp"
#include "parkplan/vehicle_model.hpp"

namespace py = pybind11;
using namespace parkplan;

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Nonholonomic parking maneuver planning by successive convexification";

  py::class_<CarState>(m, "CarState")
    .def(py::init<>())
    .def(py::init([](double x, double y, double theta) {
           return CarState{x, y, theta};
         }),
         py::arg("x_w"), py::arg("y_w"), py::arg("theta"))
    .def_readwrite("x_w", &CarState::x_w)
    .def_readwrite("y_w", &CarState::y_w)
    .def_readwrite("theta", &CarState::theta)
    .def("__repr__", [](const CarState & s) {
      return "CarState(" + std::to_string(s.x_w) + ", " + std::to_string(s.y_w) + ", " +
             std::to_string(s.theta) + ")";
    });

  py::class_<CarControl>(m, "CarControl")
    .def(py::init<>())
    .def(py::init([](double u1, double u2) {
           return CarControl{u1, u2};
         }),
         py::arg("u1"), py::arg("u2"))
    .def_readwrite("u1", &CarControl::u1)
    .def_readwrite("u2", &CarControl::u2);

  py::class_<ModelParams>(m, "ModelParams")
    .def(py::init<>())
    .def_readwrite("kappa_max", &ModelParams::kappa_max);

  m.def(
    "dynamics",
    [](const CarState & x, const CarControl & u, double sigma, const ModelParams & p) {
      return dynamics(x, u, sigma, p);
    },
    py::arg("x"), py::arg("u"), py::arg("sigma"), py::arg("params") = ModelParams{});

  m.def(
    "jacobians",
    [](double sigma, const CarState & x, const CarControl & u, const ModelParams & p) {
      const LinearizedDynamics lin = jacobians({sigma, x, u}, p);
      return py::make_tuple(lin.A, lin.B, lin.S, lin.w);
    },
    py::arg("sigma"), py::arg("x"), py::arg("u"), py::arg("params") = ModelParams{});

  m.def("foh_coefficients", &foh_coefficients, py::arg("tau"), py::arg("tau_k"),
        py::arg("tau_k1"));
  m.def("eta_star", &eta_star, py::arg("g_value"));

  py::class_<RsPath>(m, "RsPath")
    .def_readonly("total_length", &RsPath::total_length)
    .def("word", &RsPath::word_string);

  m.def("rs_shortest_path", &shortest_path, py::arg("q0"), py::arg("q1"), py::arg("radius"));
  m.def(
    "rs_sample",
    [](const RsPath & path, const CarState & q0, double radius, double ds) {
      std::vector<std::tuple<double, double, double>> out;
      for (const CarState & p : sample(path, q0, radius, ds)) {
        out.emplace_back(p.x_w, p.y_w, p.theta);
      }
      return out;
    },
    py::arg("path"), py::arg("q0"), py::arg("radius"), py::arg("ds"));

  py::class_<CostWeights>(m, "CostWeights")
    .def(py::init<>())
    .def_readwrite("sigma", &CostWeights::sigma)
    .def_readwrite("nu", &CostWeights::nu)
    .def_readwrite("jerk", &CostWeights::jerk)
    .def_readwrite("length", &CostWeights::length);

  py::class_<ScvxParams>(m, "ScvxParams")
    .def(py::init<>())
    .def_readwrite("K", &ScvxParams::K)
    .def_readwrite("max_iters", &ScvxParams::max_iters)
    .def_readwrite("weights", &ScvxParams::weights)
    .def_readwrite("eps_step", &ScvxParams::eps_step)
    .def_readwrite("eps_nu", &ScvxParams::eps_nu)
    .def_readwrite("sigma_min", &ScvxParams::sigma_min)
    .def_readwrite("sigma_max", &ScvxParams::sigma_max)
    .def_readwrite("steering_joint_continuity", &ScvxParams::steering_joint_continuity);

  py::class_<SegmentTrajectory>(m, "SegmentTrajectory")
    .def_readonly("K", &SegmentTrajectory::K)
    .def_readonly("sigma", &SegmentTrajectory::sigma)
    .def_property_readonly(
      "states",
      [](const SegmentTrajectory & seg) {
        Eigen::MatrixXd out(seg.states.size(), 3);
        for (size_t i = 0; i < seg.states.size(); ++i) {
          out.row(i) = seg.states[i].as_vector().transpose();
        }
        return out;
      })
    .def_property_readonly("controls", [](const SegmentTrajectory & seg) {
      Eigen::MatrixXd out(seg.controls.size(), 2);
      for (size_t i = 0; i < seg.controls.size(); ++i) {
        out.row(i) = seg.controls[i].as_vector().transpose();
      }
      return out;
    });

  py::class_<IterationRecord>(m, "IterationRecord")
    .def_readonly("iteration", &IterationRecord::iteration)
    .def_readonly("cost_total", &IterationRecord::cost_total)
    .def_readonly("nu_norm1", &IterationRecord::nu_norm1)
    .def_readonly("stc_slack_norm1", &IterationRecord::stc_slack_norm1)
    .def_readonly("trust_radius", &IterationRecord::trust_radius)
    .def_readonly("accepted", &IterationRecord::accepted)
    .def_readonly("step_norm", &IterationRecord::step_norm);

  py::class_<MultiSegmentSolution>(m, "MultiSegmentSolution")
    .def_readonly("segments", &MultiSegmentSolution::segments)
    .def_readonly("iterations", &MultiSegmentSolution::iterations)
    .def_readonly("converged", &MultiSegmentSolution::converged)
    .def_readonly("failure_reason", &MultiSegmentSolution::failure_reason)
    .def_readonly("history", &MultiSegmentSolution::history)
    .def_readonly("goal_used", &MultiSegmentSolution::goal_used);

  py::class_<ViolationReport>(m, "ViolationReport")
    .def_readonly("max_stc_residual", &ViolationReport::max_stc_residual)
    .def_readonly("max_bound_violation", &ViolationReport::max_bound_violation)
    .def_readonly("boundary_position_error", &ViolationReport::boundary_position_error)
    .def_readonly("boundary_heading_error", &ViolationReport::boundary_heading_error)
    .def_readonly("continuity_gap", &ViolationReport::continuity_gap)
    .def_readonly("control_box_violation", &ViolationReport::control_box_violation)
    .def_readonly("dynamics_error", &ViolationReport::dynamics_error)
    .def_readonly("path_length", &ViolationReport::path_length)
    .def_readonly("duration", &ViolationReport::duration)
    .def_readonly("cusp_count", &ViolationReport::cusp_count)
    .def("clean", &ViolationReport::clean, py::arg("tol"));

  py::class_<Scenario>(m, "Scenario")
    .def(py::init<>())
    .def_readwrite("name", &Scenario::name)
    .def_readwrite("p0", &Scenario::p0)
    .def_readwrite("p1", &Scenario::p1)
    .def_readwrite("model", &Scenario::model)
    .def_readwrite("scvx", &Scenario::scvx)
    .def("to_json", [](const Scenario & s) { return scenario_to_json(s).dump(2); });

  m.def("reverse_parking", &reverse_parking);
  m.def("parallel_parking", &parallel_parking);
  m.def("scenario_from_json", [](const std::string & text) {
    return scenario_from_json(nlohmann::json::parse(text));
  });
  m.def("sample_start", &sample_start, py::arg("scenario"), py::arg("seed"));
  m.def(
    "scvx_run",
    [](const Scenario & scenario, std::optional<ScvxParams> params) {
      return scvx_run(scenario, params.value_or(scenario.scvx));
    },
    py::arg("scenario"), py::arg("params") = std::nullopt);
  m.def("validate_trajectory", &validate_trajectory, py::arg("solution"), py::arg("scenario"),
        py::arg("n_dense") = 20);
}
