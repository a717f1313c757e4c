// Copyright 2026 The dnti Authors
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


// dnti: simulate measurements, identify topologies, export MILP models and
// run Monte-Carlo accuracy studies on a radial distribution network.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dnti/error.hpp"
#include "dnti/evalharness.hpp"
#include "dnti/identify.hpp"
#include "dnti/io.hpp"
#include "dnti/milp/mps.hpp"
#include "dnti/textio.hpp"

#ifndef DNTI_DEFAULT_DATA_DIR
#define DNTI_DEFAULT_DATA_DIR "data"
#endif

namespace {

using namespace dnti;

enum ExitCode {
  kExitOk = 0,
  kExitUsage = 2,
  kExitDomain = 3,
  kExitLimit = 4,
  kExitInfeasible = 5,
};

struct CliConfig {
  std::string network;
  std::string scenario;
  std::string measurements;
  std::string scheme = "proposed";
  std::string preset;
  std::string experiment;
  std::string out;
  std::optional<int> iterations;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold_fraction;
  std::optional<double> big_m;
  std::optional<double> time_limit;
};

std::string data_path(const std::string& file) {
  const char* dir = std::getenv("DNTI_DATA_DIR");
  return std::string(dir != nullptr ? dir : DNTI_DEFAULT_DATA_DIR) + "/" + file;
}

std::string network_path(const CliConfig& cfg) {
  return cfg.network.empty() ? data_path("ieee33.json") : cfg.network;
}

std::string scenario_path(const CliConfig& cfg) {
  return cfg.scenario.empty() ? data_path("ieee33_scenario.json") : cfg.scenario;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

TiParameters parameters(const CliConfig& cfg) {
  TiParameters p;
  if (cfg.threshold_fraction) p.threshold_fraction = *cfg.threshold_fraction;
  if (cfg.big_m) p.big_m = *cfg.big_m;
  p.validate();
  return p;
}

milp::SolveOptions solve_options(const CliConfig& cfg) {
  milp::SolveOptions o;
  if (cfg.time_limit) {
    if (!(*cfg.time_limit > 0.0)) throw DomainError("--time-limit must be positive");
    o.time_limit_seconds = *cfg.time_limit;
  }
  return o;
}

int cmd_simulate(const CliConfig& cfg) {
  const Network net = load_network_file(network_path(cfg));
  ScenarioConfig sc = load_scenario_file(net, scenario_path(cfg));
  if (cfg.seed) sc.seed = *cfg.seed;
  validate_scenario(net, sc);
  const GroundTruth truth = simulate_truth(net, sc);
  MeasurementDocument doc;
  doc.measurements = make_measurements(net, sc, truth);
  doc.noise = sc.noise;
  doc.truth = sc.topology;
  emit(cfg.out, dump_measurements(doc));
  return kExitOk;
}

int cmd_identify(const CliConfig& cfg) {
  if (cfg.measurements.empty()) throw ParseError("identify needs --measurements");
  const Scheme scheme = parse_scheme(cfg.scheme);
  const Network net = load_network_file(network_path(cfg));
  const MeasurementDocument doc = load_measurements_file(net, cfg.measurements);
  TiParameters params = parameters(cfg);
  if (doc.noise && doc.noise->pmu_harmonic_tve_pct > 0.0) {
    params.sign_hint_tve_pct = doc.noise->pmu_harmonic_tve_pct;
  }
  const TopologyEstimate est =
      identify(scheme, net, doc.measurements, params, solve_options(cfg));
  if (!cfg.out.empty()) write_text_file(cfg.out, dump_estimate(est));
  std::cout << "status: " << milp::to_string(est.solver_status) << "\n";
  if (est.has_solution()) {
    std::cout << "open:";
    for (int id : est.open_branches()) std::cout << ' ' << id;
    std::cout << "\n";
  }
  if (est.solved()) return kExitOk;
  if (est.solver_status == milp::SolveStatus::kNodeLimit ||
      est.solver_status == milp::SolveStatus::kTimeLimit) {
    return kExitLimit;
  }
  return kExitInfeasible;
}

int cmd_evaluate(const CliConfig& cfg) {
  if (cfg.preset.empty() == cfg.experiment.empty()) {
    throw ParseError("evaluate needs exactly one of --preset and --experiment");
  }
  const Network net = load_network_file(network_path(cfg));
  const ScenarioConfig base = load_scenario_file(net, scenario_path(cfg));
  Experiment exp = cfg.preset.empty()
                       ? load_experiment_file(net, cfg.experiment, base)
                       : preset(cfg.preset, base);
  if (cfg.iterations) exp.iterations = *cfg.iterations;
  if (cfg.seed) exp.seed = *cfg.seed;
  if (cfg.threshold_fraction) exp.params.threshold_fraction = *cfg.threshold_fraction;
  if (cfg.big_m) exp.params.big_m = *cfg.big_m;
  if (cfg.time_limit) exp.solve = solve_options(cfg);
  const EvalReport report = run_experiment(exp, net);
  emit(cfg.out, emit_csv(report));
  if (!cfg.out.empty() && cfg.out != "-") {
    write_text_file(cfg.out + ".detail.csv", emit_detail_csv(report));
    write_text_file(cfg.out + ".timing.csv", emit_timing_csv(report));
    write_text_file(cfg.out + ".meta.json", experiment_to_json(exp).dump(2) + "\n");
  }
  for (const ImplicationViolation& v : report.implication_violations) {
    std::cerr << "warning: proposed missed sweep " << v.sweep_index
              << " iteration " << v.iteration
              << " although harmonic_only and traditional were correct\n";
  }
  return kExitOk;
}

int cmd_export(const CliConfig& cfg) {
  if (cfg.measurements.empty()) throw ParseError("export needs --measurements");
  const Scheme scheme = parse_scheme(cfg.scheme);
  const Network net = load_network_file(network_path(cfg));
  const MeasurementDocument doc = load_measurements_file(net, cfg.measurements);
  const Formulation f = build_model(scheme, net, doc.measurements,
                                    enumerate_loops(net), parameters(cfg));
  emit(cfg.out, milp::export_mps(f.model));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distribution network topology identification"};
  app.require_subcommand(1);
  CliConfig cfg;

  auto add_network = [&](CLI::App* sub) {
    sub->add_option("--network", cfg.network, "Network JSON (default: bundled IEEE 33-bus)");
  };
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "Output path (default: stdout)");
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--threshold-fraction", cfg.threshold_fraction,
                    "Path threshold c as a fraction of z (default 0.25)");
    sub->add_option("--big-m", cfg.big_m, "Big-M override in amperes");
    sub->add_option("--time-limit", cfg.time_limit, "Solver time limit in seconds");
  };
  auto add_scheme = [&](CLI::App* sub) {
    sub->add_option("--scheme", cfg.scheme, "proposed, harmonic or traditional");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Simulate a scenario into measurements");
  add_network(simulate);
  simulate->add_option("--scenario", cfg.scenario, "Scenario JSON (default: bundled)");
  simulate->add_option("--seed", cfg.seed, "Noise seed override");
  add_out(simulate);

  CLI::App* ident = app.add_subcommand("identify", "Identify the topology from measurements");
  add_network(ident);
  ident->add_option("--measurements", cfg.measurements, "Measurement JSON")->required();
  add_scheme(ident);
  add_solver(ident);
  add_out(ident);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Run a Monte-Carlo accuracy study");
  add_network(evaluate);
  evaluate->add_option("--scenario", cfg.scenario, "Base scenario JSON (default: bundled)");
  evaluate->add_option("--preset", cfg.preset,
                       "fig6, fig7, fig_fund_tve, fig8a, fig8b, fig9 or fig10");
  evaluate->add_option("--experiment", cfg.experiment, "Experiment JSON");
  evaluate->add_option("--iterations", cfg.iterations, "Iterations per sweep value");
  evaluate->add_option("--seed", cfg.seed, "Experiment seed");
  add_solver(evaluate);
  add_out(evaluate);

  CLI::App* exp = app.add_subcommand("export", "Write the MILP of a scheme as MPS");
  add_network(exp);
  exp->add_option("--measurements", cfg.measurements, "Measurement JSON")->required();
  add_scheme(exp);
  add_solver(exp);
  add_out(exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (ident->parsed()) return cmd_identify(cfg);
    if (evaluate->parsed()) return cmd_evaluate(cfg);
    return cmd_export(cfg);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}
