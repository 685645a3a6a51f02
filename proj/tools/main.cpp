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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "parkplan/artifact.hpp"
#include "parkplan/reeds_shepp.hpp"
#include "parkplan/scenario.hpp"
#include "parkplan/scvx.hpp"

namespace
{

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kValidationTol = 1e-3;

void fail(const std::string & reason, const std::string & detail = "")
{
  json j{{"error", reason}};
  if (!detail.empty()) {
    j["detail"] = detail;
  }
  std::cerr << j.dump() << "\n";
}

void write_file(const fs::path & path, const std::string & content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << content;
}

parkplan::Scenario load_scenario(const std::string & name, const std::string & file)
{
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) {
      throw std::runtime_error("scenario not found: " + file);
    }
    json j;
    in >> j;
    return parkplan::scenario_from_json(j);
  }
  if (name == "reverse") {
    return parkplan::reverse_parking();
  }
  if (name == "parallel") {
    return parkplan::parallel_parking();
  }
  throw std::runtime_error("scenario not found: " + name);
}

parkplan::RunArtifact run_instance(
  const parkplan::Scenario & instance, uint64_t seed)
{
  using namespace parkplan;
  RunArtifact artifact;
  artifact.seed = seed;
  artifact.scenario = scenario_to_json(instance);

  const MultiSegmentSolution solution = scvx_run(instance, instance.scvx);
  artifact.goal_used = solution.goal_used;
  artifact.converged = solution.converged;
  artifact.iterations = solution.iterations;
  artifact.failure_reason = solution.failure_reason;
  artifact.segments = solution.segments;
  artifact.history = solution.history;
  artifact.dense = dense_trajectory(solution, instance.model, 20);
  artifact.report = validate_trajectory(solution, instance, 20);
  artifact.scvx_length = artifact.report.path_length;

  const double radius = 1.0 / instance.model.kappa_max;
  const RsPath rs = shortest_path(instance.p0, solution.goal_used, radius);
  artifact.rs_length = rs.total_length * radius;
  artifact.rs_samples = sample(rs, instance.p0, radius, 0.05);
  return artifact;
}

void write_outputs(
  const parkplan::RunArtifact & artifact, const fs::path & dir, const std::string & base,
  const std::vector<std::string> & formats)
{
  fs::create_directories(dir);
  auto wants = [&](const std::string & f) {
    return std::find(formats.begin(), formats.end(), f) != formats.end();
  };
  if (wants("json")) {
    write_file(dir / (base + ".json"), parkplan::artifact_to_json(artifact).dump(2) + "\n");
    std::ostringstream hist;
    parkplan::write_history_jsonl(hist, artifact.history);
    write_file(dir / (base + "_history.jsonl"), hist.str());
  }
  if (wants("csv")) {
    std::ostringstream csv;
    parkplan::write_knots_csv(csv, artifact.segments);
    write_file(dir / (base + ".csv"), csv.str());
  }
  if (wants("svg")) {
    write_file(dir / (base + ".svg"), parkplan::plot_trajectory_svg(artifact));
  }
}

int cmd_plan(
  const std::string & name, const std::string & file, std::optional<uint64_t> seed,
  std::optional<int> knots, const std::string & out_dir,
  const std::vector<std::string> & formats)
{
  parkplan::Scenario scenario;
  try {
    scenario = load_scenario(name, file);
  } catch (const std::exception & e) {
    fail("scenario not found", e.what());
    return 2;
  }

  uint64_t used_seed = seed.value_or(0);
  if (seed.has_value() && scenario.start_region.has_value()) {
    scenario.p0 = parkplan::sample_start(scenario, *seed);
  }
  if (knots.has_value()) {
    scenario.scvx.K = *knots;
  }

  parkplan::RunArtifact artifact;
  try {
    artifact = run_instance(scenario, used_seed);
  } catch (const std::exception & e) {
    fail("solver error", e.what());
    return 3;
  }

  const std::string base = scenario.name + "_seed" + std::to_string(used_seed);
  try {
    write_outputs(artifact, out_dir, base, formats);
  } catch (const std::exception & e) {
    fail("io error", e.what());
    return 4;
  }

  if (!artifact.converged) {
    fail("not converged", artifact.failure_reason);
    return 5;
  }
  if (!artifact.report.clean(kValidationTol)) {
    fail("validation failed", parkplan::artifact_to_json(artifact)["report"].dump());
    return 6;
  }
  std::cout << "converged in " << artifact.iterations << " iterations, path length "
            << artifact.report.path_length << " m, duration " << artifact.report.duration
            << " s, cusps " << artifact.report.cusp_count << "\n";
  return 0;
}

int cmd_rs_compare(
  const std::vector<double> & q0, const std::vector<double> & q1, double radius,
  const std::string & out_dir)
{
  using namespace parkplan;
  Scenario scenario;
  scenario.name = "rs_compare";
  scenario.p0 = {q0[0], q0[1], q0[2]};
  scenario.p1 = {q1[0], q1[1], q1[2]};
  scenario.model.kappa_max = 1.0 / radius;
  const double y_lo = std::min(q0[1], q1[1]);
  const double y_hi = std::max(q0[1], q1[1]);
  const double pad = 6.0 * radius + 2.0;
  scenario.y_bounds = {y_lo - pad, y_hi + pad};
  // Length-dominant weighting for the baseline comparison.
  scenario.scvx.weights.sigma = 0.05;
  scenario.scvx.weights.jerk = 0.01;
  scenario.scvx.weights.length = 1.0;

  RunArtifact artifact;
  try {
    artifact = run_instance(scenario, 0);
  } catch (const std::exception & e) {
    fail("solver error", e.what());
    return 3;
  }

  json out{
    {"rs_length", artifact.rs_length},
    {"scvx_length", artifact.scvx_length},
    {"ratio", artifact.rs_length > 0.0 ? artifact.scvx_length / artifact.rs_length : 1.0},
    {"converged", artifact.converged}};
  std::cout << out.dump() << "\n";

  try {
    write_outputs(artifact, out_dir, "rs_compare", {"json", "svg"});
  } catch (const std::exception & e) {
    fail("io error", e.what());
    return 4;
  }
  if (!artifact.converged) {
    fail("not converged", artifact.failure_reason);
    return 5;
  }
  if (!artifact.report.clean(kValidationTol)) {
    fail("validation failed");
    return 6;
  }
  return 0;
}

int cmd_history(const std::string & in_file, std::string out_file)
{
  json j;
  {
    std::ifstream in(in_file);
    if (!in) {
      fail("artifact not found", in_file);
      return 2;
    }
    try {
      in >> j;
    } catch (const std::exception & e) {
      fail("corrupt artifact", e.what());
      return 2;
    }
  }
  parkplan::RunArtifact artifact;
  try {
    artifact = parkplan::artifact_from_json(j);
  } catch (const std::exception & e) {
    fail("corrupt artifact", e.what());
    return 2;
  }
  if (out_file.empty()) {
    out_file = fs::path(in_file).replace_extension().string() + "_history.svg";
  }
  try {
    write_file(out_file, parkplan::plot_history_svg(artifact.history));
  } catch (const std::exception & e) {
    fail("io error", e.what());
    return 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Parking maneuver planning by successive convexification"};
  app.require_subcommand(1);

  // plan
  std::string scenario_name;
  std::string scenario_file;
  std::optional<uint64_t> seed;
  std::optional<int> knots;
  std::string out_dir = "out";
  std::vector<std::string> formats = {"json", "csv", "svg"};
  CLI::App * plan = app.add_subcommand("plan", "Solve a parking scenario");
  plan->add_option("scenario", scenario_name, "Built-in scenario name (reverse, parallel)");
  plan->add_option("--file", scenario_file, "Scenario JSON file");
  plan->add_option("--seed", seed, "Start-pose sampling seed");
  plan->add_option("--knots", knots, "Knot count per segment");
  plan->add_option("--out", out_dir, "Output directory");
  plan->add_option("--format", formats, "Outputs to write (json, csv, svg)");

  // rs-compare
  std::vector<double> q0{0.0, 0.0, 0.0};
  std::vector<double> q1{0.0, 0.0, 0.0};
  double radius = 1.0;
  std::string rs_out_dir = "out";
  CLI::App * rsc = app.add_subcommand(
    "rs-compare", "Compare the optimized free-space curve against the shortest-path baseline");
  rsc->add_option("--q0", q0, "Start pose: x y theta")->expected(3);
  rsc->add_option("--q1", q1, "Goal pose: x y theta")->expected(3);
  rsc->add_option("--radius", radius, "Turning radius [m]");
  rsc->add_option("--out", rs_out_dir, "Output directory");

  // history
  std::string in_file;
  std::string hist_out;
  CLI::App * hist = app.add_subcommand("history", "Render the convergence plot of an artifact");
  hist->add_option("--in", in_file, "Artifact JSON file")->required();
  hist->add_option("--out", hist_out, "Output SVG file");

  CLI11_PARSE(app, argc, argv);

  if (plan->parsed()) {
    if (scenario_name.empty() && scenario_file.empty()) {
      fail("usage error", "plan needs a scenario name or --file");
      return 2;
    }
    return cmd_plan(scenario_name, scenario_file, seed, knots, out_dir, formats);
  }
  if (rsc->parsed()) {
    if (!(radius > 0.0)) {
      fail("usage error", "radius must be positive");
      return 2;
    }
    return cmd_rs_compare(q0, q1, radius, rs_out_dir);
  }
  if (hist->parsed()) {
    return cmd_history(in_file, hist_out);
  }
  return 2;
}
