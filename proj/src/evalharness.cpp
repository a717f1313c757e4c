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


#include "dnti/evalharness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <thread>

#include "dnti/error.hpp"
#include "dnti/identify.hpp"
#include "dnti/io.hpp"
#include "dnti/textio.hpp"

namespace dnti {
namespace {

constexpr std::uint64_t kTopologyStream = 0x70;

bool limit_status(milp::SolveStatus status) {
  return status == milp::SolveStatus::kNodeLimit ||
         status == milp::SolveStatus::kTimeLimit;
}

std::string csv_field(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

std::vector<double> range(double first, double last, double step) {
  std::vector<double> out;
  for (double v = first; v <= last + 1e-9; v += step) out.push_back(v);
  return out;
}

struct TrialResult {
  std::vector<EvalDetail> details;  // one per scheme, experiment order
};

TrialResult run_trial(const Experiment& exp, const Network& net,
                      const std::vector<Loop>& loops, std::size_t sweep_index,
                      int iteration) {
  TrialResult result;
  const double value = exp.values[sweep_index];
  std::uint64_t seed = 0;
  std::vector<EvalDetail> details;
  try {
    const TrialSetup setup = make_trial(exp, net, sweep_index, iteration);
    seed = setup.scenario.seed;
    const GroundTruth truth = simulate_truth(net, setup.scenario);
    const MeasurementSet meas = make_measurements(net, setup.scenario, truth);
    const std::map<int, bool> paths = harmonic_path_flags(
        net, setup.scenario.topology, setup.scenario.harmonic_sources);
    for (Scheme scheme : exp.schemes) {
      EvalDetail d;
      d.scheme = scheme;
      d.sweep_index = sweep_index;
      d.sweep_value = value;
      d.iteration = iteration;
      d.seed = seed;
      try {
        const TopologyEstimate est =
            identify(scheme, net, loops, meas, setup.params, exp.solve);
        d.status = est.solver_status;
        d.limit_hit = limit_status(est.solver_status);
        d.objective = est.has_solution() ? est.objective : 0.0;
        d.nodes = est.nodes_explored;
        d.wall_seconds = est.wall_seconds;
        if (est.solved()) {
          d.correct = scheme == Scheme::kHarmonicOnly
                          ? est.on_harmonic_path == paths
                          : est.statuses == setup.scenario.topology.closed;
        }
      } catch (const std::exception& e) {
        d.error = e.what();
      }
      details.push_back(d);
    }
  } catch (const std::exception& e) {
    for (Scheme scheme : exp.schemes) {
      EvalDetail d;
      d.scheme = scheme;
      d.sweep_index = sweep_index;
      d.sweep_value = value;
      d.iteration = iteration;
      d.seed = seed;
      d.error = e.what();
      details.push_back(d);
    }
  }
  result.details = std::move(details);
  return result;
}

nlohmann::json solve_to_json(const milp::SolveOptions& o) {
  return {{"time_limit", o.time_limit_seconds},
          {"node_limit", o.node_limit},
          {"relative_gap", o.relative_gap}};
}

}  // namespace

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kPseudoErrorPct: return "pseudo_error_pct";
    case SweepAxis::kPmuTvePct: return "pmu_tve_pct";
    case SweepAxis::kHarmonicTvePct: return "harmonic_tve_pct";
    case SweepAxis::kSourceTvePct: return "source_tve_pct";
    case SweepAxis::kThresholdFraction: return "threshold_fraction";
    case SweepAxis::kNSources: return "n_sources";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(const std::string& text) {
  for (SweepAxis a : {SweepAxis::kPseudoErrorPct, SweepAxis::kPmuTvePct,
                      SweepAxis::kHarmonicTvePct, SweepAxis::kSourceTvePct,
                      SweepAxis::kThresholdFraction, SweepAxis::kNSources}) {
    if (text == to_string(a)) return a;
  }
  throw ParseError("unknown sweep axis '" + text + "'");
}

void Experiment::validate(const Network& net) const {
  if (iterations < 1) throw DomainError("iterations must be at least 1");
  if (schemes.empty()) throw DomainError("experiment needs at least one scheme");
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("sweep value is not finite");
    if (axis == SweepAxis::kThresholdFraction) {
      if (!(v > 0.0 && v < 100.0)) {
        throw DomainError("threshold sweep values must lie in (0, 100)");
      }
    } else if (axis == SweepAxis::kNSources) {
      if (v != std::floor(v) || v < 1 || v > net.node_count() - 1) {
        throw DomainError("n_sources sweep values must be integers in [1, " +
                          std::to_string(net.node_count() - 1) + "]");
      }
    } else if (!(v >= 0.0 && v <= 100.0)) {
      throw DomainError(std::string(to_string(axis)) +
                        " sweep values must lie in [0, 100]");
    }
  }
  if (axis == SweepAxis::kNSources) {
    const bool has_ref = std::any_of(
        base.harmonic_sources.begin(), base.harmonic_sources.end(),
        [&](const HarmonicSource& s) { return s.node == reference_node; });
    if (!has_ref) {
      throw DomainError("base scenario has no source at reference node " +
                        std::to_string(reference_node));
    }
  }
  params.validate();
  validate_scenario(net, base);
}

const EvalCell* EvalReport::cell(Scheme scheme, double sweep_value) const {
  for (const EvalCell& c : cells) {
    if (c.scheme == scheme && c.sweep_value == sweep_value) return &c;
  }
  return nullptr;
}

int worker_threads() {
  if (const char* env = std::getenv("DNTI_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

TrialSetup make_trial(const Experiment& exp, const Network& net,
                      std::size_t sweep_index, int iteration) {
  TrialSetup t;
  t.scenario = exp.base;
  t.params = exp.params;
  const double v = exp.values.at(sweep_index);
  t.scenario.seed = derive_seed(
      exp.seed, exp.common_random_numbers ? 0 : sweep_index + 1,
      static_cast<std::uint64_t>(iteration));
  NoiseSpec& noise = t.scenario.noise;
  switch (exp.axis) {
    case SweepAxis::kPseudoErrorPct: noise.pseudo_error_pct = v; break;
    case SweepAxis::kPmuTvePct: noise.pmu_fundamental_tve_pct = v; break;
    case SweepAxis::kHarmonicTvePct: noise.pmu_harmonic_tve_pct = v; break;
    case SweepAxis::kSourceTvePct: noise.source_meter_tve_pct = v; break;
    case SweepAxis::kThresholdFraction: t.params.threshold_fraction = v / 100.0; break;
    case SweepAxis::kNSources: {
      HarmonicSource ref;
      for (const HarmonicSource& s : exp.base.harmonic_sources) {
        if (s.node == exp.reference_node) ref = s;
      }
      if (ref.node == 0) {
        throw DomainError("base scenario has no source at reference node " +
                          std::to_string(exp.reference_node));
      }
      t.scenario.harmonic_sources.clear();
      const int n = static_cast<int>(v);
      for (int node = 2; node <= n + 1; ++node) {
        t.scenario.harmonic_sources.push_back({node, ref.order, ref.current});
      }
      // Equal phasors: the smallest subset sum is a single source.
      if (!t.params.z) t.params.z = std::abs(ref.current);
      break;
    }
  }
  if (exp.randomize_topology) {
    Rng rng(derive_seed(t.scenario.seed, kTopologyStream));
    t.scenario.topology = random_radial_topology(net, rng);
  }
  if (exp.sign_hints && noise.pmu_harmonic_tve_pct > 0.0 &&
      !t.params.sign_hint_tve_pct) {
    t.params.sign_hint_tve_pct = noise.pmu_harmonic_tve_pct;
  }
  return t;
}

EvalReport run_experiment(const Experiment& exp, const Network& net,
                          int threads) {
  exp.validate(net);
  const std::vector<Loop> loops = enumerate_loops(net);
  const std::size_t sweeps = exp.values.size();
  const std::size_t tasks = sweeps * static_cast<std::size_t>(exp.iterations);
  std::vector<TrialResult> results(tasks);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t s = t / exp.iterations;
      const int it = static_cast<int>(t % exp.iterations);
      results[t] = run_trial(exp, net, loops, s, it);
    }
  };
  if (threads <= 0) threads = worker_threads();
  const int pool = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(tasks, 1)));
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> workers;
    for (int i = 0; i < pool; ++i) workers.emplace_back(worker);
    for (std::thread& w : workers) w.join();
  }

  EvalReport report;
  report.name = exp.name;
  report.axis = exp.axis;
  for (const TrialResult& r : results) {
    report.details.insert(report.details.end(), r.details.begin(), r.details.end());
  }
  for (Scheme scheme : exp.schemes) {
    for (std::size_t s = 0; s < sweeps; ++s) {
      EvalCell c;
      c.scheme = scheme;
      c.sweep_value = exp.values[s];
      for (const EvalDetail& d : report.details) {
        if (d.scheme != scheme || d.sweep_index != s) continue;
        ++c.n_total;
        if (d.correct) ++c.n_correct;
      }
      c.accuracy_pct = c.n_total == 0 ? 0.0 : 100.0 * c.n_correct / c.n_total;
      report.cells.push_back(c);
    }
  }
  const auto has = [&](Scheme s) {
    return std::find(exp.schemes.begin(), exp.schemes.end(), s) != exp.schemes.end();
  };
  if (has(Scheme::kProposed) && has(Scheme::kHarmonicOnly) &&
      has(Scheme::kTraditional)) {
    for (const TrialResult& r : results) {
      bool prop = false;
      bool harm = false;
      bool trad = false;
      for (const EvalDetail& d : r.details) {
        if (d.scheme == Scheme::kProposed) prop = d.correct;
        if (d.scheme == Scheme::kHarmonicOnly) harm = d.correct;
        if (d.scheme == Scheme::kTraditional) trad = d.correct;
      }
      if (harm && trad && !prop) {
        report.implication_violations.push_back(
            {r.details.front().sweep_index, r.details.front().iteration});
      }
    }
  }
  return report;
}

std::vector<std::string> preset_names() {
  return {"fig6", "fig7", "fig_fund_tve", "fig8a", "fig8b", "fig9", "fig10"};
}

Experiment preset(const std::string& name, const ScenarioConfig& base) {
  Experiment e;
  e.name = name;
  e.base = base;
  e.base.noise = NoiseSpec{};
  e.iterations = 100;
  e.seed = 2026;
  NoiseSpec& n = e.base.noise;
  if (name == "fig6") {
    e.axis = SweepAxis::kPseudoErrorPct;
    e.values = range(10, 90, 10);
    e.schemes = {Scheme::kProposed, Scheme::kTraditional};
    e.notes = "errorless PMU and source meters; pseudo error swept";
  } else if (name == "fig7" || name == "fig_fund_tve") {
    e.name = "fig_fund_tve";
    e.axis = SweepAxis::kPseudoErrorPct;
    e.values = range(10, 90, 10);
    e.schemes = {Scheme::kProposed, Scheme::kTraditional};
    n.pmu_fundamental_tve_pct = 3.0;
    e.notes = "fundamental PMU channel at TVE bound 3% (truncated Gaussian, so "
              "per-reading TVE spans 0-3%); pseudo error swept";
  } else if (name == "fig8a") {
    e.axis = SweepAxis::kHarmonicTvePct;
    e.values = range(0, 5, 1);
    e.schemes = {Scheme::kProposed, Scheme::kHarmonicOnly, Scheme::kTraditional};
    n.pseudo_error_pct = 90.0;
    n.pmu_fundamental_tve_pct = 3.0;
    e.notes = "harmonic PMU TVE swept to 5%; pseudo 90%; fundamental 3%; "
              "source meters errorless";
  } else if (name == "fig8b") {
    e.axis = SweepAxis::kSourceTvePct;
    e.values = range(0, 10, 2);
    e.schemes = {Scheme::kProposed, Scheme::kTraditional};
    n.pseudo_error_pct = 90.0;
    n.pmu_fundamental_tve_pct = 3.0;
    e.notes = "source meter TVE swept to 10%; pseudo 90%; fundamental 3%; "
              "harmonic PMU channel errorless";
  } else if (name == "fig9") {
    e.axis = SweepAxis::kThresholdFraction;
    e.values = range(5, 25, 5);
    e.schemes = {Scheme::kProposed, Scheme::kTraditional};
    n.pmu_harmonic_tve_pct = 5.0;
    n.source_meter_tve_pct = 10.0;
    n.pseudo_error_pct = 90.0;
    n.pmu_fundamental_tve_pct = 3.0;
    e.notes = "threshold swept in percent of z; harmonic 5%, source 10%, "
              "pseudo 90%, fundamental 3%";
  } else if (name == "fig10") {
    e.axis = SweepAxis::kNSources;
    e.values = range(1, 32, 1);
    e.schemes = {Scheme::kProposed, Scheme::kTraditional};
    e.params.threshold_fraction = 0.10;
    n.pseudo_error_pct = 90.0;
    e.notes = "n sources at nodes 2..n+1, each equal to the reference source; "
              "c = 10% of z; pseudo 90%; PMUs and source meters errorless";
  } else {
    throw ParseError("unknown preset '" + name + "'");
  }
  return e;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string emit_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "scheme,sweep_value,n_total,n_correct,accuracy_pct\n";
  for (const EvalCell& c : report.cells) {
    out << to_string(c.scheme) << ',' << format_number(c.sweep_value) << ','
        << c.n_total << ',' << c.n_correct << ','
        << format_number(c.accuracy_pct) << '\n';
  }
  return out.str();
}

std::string emit_detail_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "scheme,sweep_index,sweep_value,iteration,seed,correct,limit_hit,"
         "status,objective,nodes,error\n";
  for (const EvalDetail& d : report.details) {
    out << to_string(d.scheme) << ',' << d.sweep_index << ','
        << format_number(d.sweep_value) << ',' << d.iteration << ',' << d.seed
        << ',' << (d.correct ? 1 : 0) << ',' << (d.limit_hit ? 1 : 0) << ','
        << (d.error.empty() ? milp::to_string(d.status) : "error") << ','
        << format_number(d.objective) << ',' << d.nodes << ','
        << csv_field(d.error) << '\n';
  }
  return out.str();
}

std::string emit_timing_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "scheme,sweep_value,iteration,wall_seconds,nodes\n";
  for (const EvalDetail& d : report.details) {
    out << to_string(d.scheme) << ',' << format_number(d.sweep_value) << ','
        << d.iteration << ',' << format_number(d.wall_seconds) << ',' << d.nodes
        << '\n';
  }
  return out.str();
}

nlohmann::json experiment_to_json(const Experiment& exp) {
  nlohmann::json j;
  j["name"] = exp.name;
  j["axis"] = to_string(exp.axis);
  j["values"] = exp.values;
  std::vector<std::string> schemes;
  for (Scheme s : exp.schemes) schemes.push_back(to_string(s));
  j["schemes"] = schemes;
  j["iterations"] = exp.iterations;
  j["seed"] = exp.seed;
  j["threshold_fraction"] = exp.params.threshold_fraction;
  if (exp.params.big_m) j["big_m"] = *exp.params.big_m;
  if (exp.params.z) j["z"] = *exp.params.z;
  j["solve"] = solve_to_json(exp.solve);
  j["common_random_numbers"] = exp.common_random_numbers;
  j["randomize_topology"] = exp.randomize_topology;
  j["sign_hints"] = exp.sign_hints;
  j["reference_node"] = exp.reference_node;
  j["notes"] = exp.notes;
  j["scenario"] = nlohmann::json::parse(dump_scenario(exp.base));
  return j;
}

Experiment experiment_from_json(const Network& net, const nlohmann::json& j,
                                const ScenarioConfig& default_base) {
  if (!j.is_object()) throw ParseError("experiment document must be an object");
  try {
    ScenarioConfig base = default_base;
    if (j.contains("scenario")) base = load_scenario(net, j.at("scenario").dump());
    Experiment e;
    if (j.contains("preset")) {
      e = preset(j.at("preset").get<std::string>(), base);
    } else {
      e.base = base;
      e.schemes = {Scheme::kProposed, Scheme::kTraditional};
    }
    if (j.contains("scenario") && j.contains("preset")) {
      // The preset keeps its noise levels; use `noise` to override them.
      const NoiseSpec noise = e.base.noise;
      e.base = base;
      e.base.noise = noise;
    }
    if (j.contains("noise")) e.base.noise = noise_from_json(j.at("noise"), "experiment noise");
    if (j.contains("name")) e.name = j.at("name").get<std::string>();
    if (j.contains("axis")) e.axis = parse_sweep_axis(j.at("axis").get<std::string>());
    if (j.contains("values")) e.values = j.at("values").get<std::vector<double>>();
    if (j.contains("schemes")) {
      e.schemes.clear();
      for (const auto& s : j.at("schemes")) e.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
    if (j.contains("iterations")) e.iterations = j.at("iterations").get<int>();
    if (j.contains("seed")) e.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threshold_fraction")) {
      e.params.threshold_fraction = j.at("threshold_fraction").get<double>();
    }
    if (j.contains("big_m")) e.params.big_m = j.at("big_m").get<double>();
    if (j.contains("z")) e.params.z = j.at("z").get<double>();
    if (j.contains("solve")) {
      const auto& s = j.at("solve");
      if (s.contains("time_limit")) e.solve.time_limit_seconds = s.at("time_limit").get<double>();
      if (s.contains("node_limit")) e.solve.node_limit = s.at("node_limit").get<std::int64_t>();
      if (s.contains("relative_gap")) e.solve.relative_gap = s.at("relative_gap").get<double>();
    }
    if (j.contains("common_random_numbers")) {
      e.common_random_numbers = j.at("common_random_numbers").get<bool>();
    }
    if (j.contains("randomize_topology")) {
      e.randomize_topology = j.at("randomize_topology").get<bool>();
    }
    if (j.contains("sign_hints")) e.sign_hints = j.at("sign_hints").get<bool>();
    if (j.contains("reference_node")) e.reference_node = j.at("reference_node").get<int>();
    if (j.contains("notes")) e.notes = j.at("notes").get<std::string>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("experiment document: ") + ex.what());
  }
}

Experiment load_experiment_file(const Network& net, const std::string& path,
                                const ScenarioConfig& default_base) {
  return experiment_from_json(
      net, parse_json_text(read_text_file(path), "experiment"), default_base);
}

}  // namespace dnti
