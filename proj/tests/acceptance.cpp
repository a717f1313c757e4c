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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Criterion numbers given on the
// command line restrict the run to those criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dnti/evalharness.hpp"
#include "dnti/identify.hpp"
#include "dnti/io.hpp"
#include "dnti/milp/mps.hpp"
#include "dnti/textio.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

namespace dnti {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

ScenarioConfig base_scenario(const Network& net) {
  return load_scenario_file(net, test::data_dir() + "/ieee33_scenario.json");
}

std::string accuracy_row(const EvalReport& r, Scheme scheme) {
  std::ostringstream out;
  out << to_string(scheme) << " [";
  bool first = true;
  for (const EvalCell& c : r.cells) {
    if (c.scheme != scheme) continue;
    out << (first ? "" : " ") << format_number(c.sweep_value) << ":"
        << format_number(c.accuracy_pct);
    first = false;
  }
  out << "]";
  return out.str();
}

int limit_hits(const EvalReport& r) {
  int n = 0;
  for (const EvalDetail& d : r.details) n += d.limit_hit || !d.error.empty();
  return n;
}

Outcome exact_recovery() {
  const Network net = test::ieee33();
  const std::vector<Loop> loops = enumerate_loops(net);
  const ScenarioConfig base = base_scenario(net);
  Phasor ref;
  for (const HarmonicSource& s : base.harmonic_sources) {
    if (s.node == 11) ref = s.current;
  }
  int exact = 0;
  int runs = 0;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    ScenarioConfig sc = base;
    sc.noise = NoiseSpec{};
    sc.seed = derive_seed(1001, i);
    Rng rng(derive_seed(1002, i));
    sc.topology = random_radial_topology(net, rng);
    sc.harmonic_sources.clear();
    for (int node = 2; node <= net.node_count(); ++node) {
      sc.harmonic_sources.push_back({node, 3, ref});
    }
    const MeasurementSet meas = make_measurements(net, sc);
    TiParameters params;
    params.z = std::abs(ref);
    milp::SolveOptions opts;
    opts.time_limit_seconds = 120.0;
    for (Scheme scheme : {Scheme::kProposed, Scheme::kHarmonicOnly}) {
      const TopologyEstimate est = identify(scheme, net, loops, meas, params, opts);
      ++runs;
      worst = std::max(worst, est.wall_seconds);
      if (est.solver_status == milp::SolveStatus::kOptimal &&
          est.statuses == sc.topology.closed && est.wall_seconds <= 120.0) {
        ++exact;
      }
    }
  }
  std::ostringstream d;
  d << exact << "/" << runs << " exact (proposed and harmonic_only, 20 topologies), "
    << "slowest solve " << format_number(worst) << " s";
  return {exact == runs, d.str()};
}

Outcome fig6_trend() {
  const Network net = test::ieee33();
  const Experiment e = preset("fig6", base_scenario(net));
  const EvalReport r = run_experiment(e, net);
  bool dominates = true;
  double gap90 = -100.0;
  for (double v : e.values) {
    const double p = r.cell(Scheme::kProposed, v)->accuracy_pct;
    const double t = r.cell(Scheme::kTraditional, v)->accuracy_pct;
    dominates = dominates && p >= t;
    if (v == 90.0) gap90 = p - t;
  }
  std::ostringstream d;
  d << accuracy_row(r, Scheme::kProposed) << " " << accuracy_row(r, Scheme::kTraditional)
    << ", gap at 90% = " << format_number(gap90) << " points, limit hits "
    << limit_hits(r);
  return {dominates && gap90 >= 5.0, d.str()};
}

Outcome path_robustness() {
  const Network net = test::ieee33();
  Experiment e = preset("fig8a", base_scenario(net));
  e.values = {5.0};
  e.schemes = {Scheme::kHarmonicOnly};
  const EvalReport r = run_experiment(e, net);
  const EvalCell* c = r.cell(Scheme::kHarmonicOnly, 5.0);
  std::ostringstream d;
  d << "harmonic path set correct in " << c->n_correct << "/" << c->n_total
    << " (harmonic TVE 5%, pseudo 90%, fundamental 3%)";
  return {c->n_correct >= 95, d.str()};
}

Outcome threshold_robustness() {
  const Network net = test::ieee33();
  Experiment e = preset("fig9", base_scenario(net));
  e.schemes = {Scheme::kProposed};
  const EvalReport r = run_experiment(e, net);
  double lo = 100.0;
  double hi = 0.0;
  for (const EvalCell& c : r.cells) {
    lo = std::min(lo, c.accuracy_pct);
    hi = std::max(hi, c.accuracy_pct);
  }
  std::ostringstream d;
  d << accuracy_row(r, Scheme::kProposed) << ", spread " << format_number(hi - lo)
    << " points, limit hits " << limit_hits(r);
  return {hi - lo <= 5.0, d.str()};
}

Outcome source_count_monotonicity() {
  const Network net = test::ieee33();
  Experiment e = preset("fig10", base_scenario(net));
  e.schemes = {Scheme::kProposed};
  const EvalReport r = run_experiment(e, net);
  bool monotone = true;
  double worst_drop = 0.0;
  for (std::size_t k = 1; k < e.values.size(); ++k) {
    const double drop = r.cell(Scheme::kProposed, e.values[k - 1])->accuracy_pct -
                        r.cell(Scheme::kProposed, e.values[k])->accuracy_pct;
    worst_drop = std::max(worst_drop, drop);
    monotone = monotone && drop <= 5.0;
  }
  const double last = r.cell(Scheme::kProposed, 32.0)->accuracy_pct;
  std::ostringstream d;
  d << accuracy_row(r, Scheme::kProposed) << ", largest drop "
    << format_number(worst_drop) << " points, limit hits " << limit_hits(r);
  return {monotone && last == 100.0, d.str()};
}

Outcome milp_oracle_equivalence() {
  int matched = 0;
  double worst = 0.0;
  std::string first_failure;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const test::ToyInstance toy = test::random_toy_instance(7000 + i);
    const milp::MilpModel& m = toy.f.model;
    const test::EnumerationResult oracle = test::enumerate_binaries(m);
    const auto start = std::chrono::steady_clock::now();
    const milp::MilpSolution sol = milp::solve(m);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    worst = std::max(worst, secs);
    std::vector<int> s_vars;
    for (const auto& [id, v] : toy.f.vars.branch) s_vars.push_back(v.s);
    std::vector<int> s_pos;  // positions of s among the binaries
    for (int var : s_vars) {
      int pos = 0;
      for (int j = 0; j < var; ++j) pos += m.variable(j).kind == milp::VarKind::kBinary;
      s_pos.push_back(pos);
    }
    std::set<std::vector<double>> optimal_s;
    for (const auto& a : oracle.optimal_assignments) {
      std::vector<double> s;
      for (int p : s_pos) s.push_back(a[p]);
      optimal_s.insert(s);
    }
    bool ok = oracle.feasible && sol.status == milp::SolveStatus::kOptimal && secs <= 1.0;
    if (ok) {
      ok = std::abs(sol.objective - oracle.best) <= 1e-6 * std::max(1.0, std::abs(oracle.best));
      std::vector<double> s;
      for (int var : s_vars) s.push_back(std::round(sol.values[var]));
      ok = ok && optimal_s.count(s) == 1;
    }
    if (ok) {
      ++matched;
    } else if (first_failure.empty()) {
      first_failure = " first failure: instance " + std::to_string(i);
    }
  }
  std::ostringstream d;
  d << matched << "/50 match enumeration in objective and s-vector, slowest solve "
    << format_number(worst) << " s" << first_failure;
  return {matched == 50, d.str()};
}

Outcome linearization_equivalence() {
  std::mt19937_64 rng(8080);
  int ok = 0;
  std::string first_failure;
  for (int i = 0; i < 1000; ++i) {
    const auto [phasor, c] = test::random_linearization_case(rng);
    const test::LinearizationCheck check = test::check_linearization(phasor, c);
    if (check.ok) {
      ++ok;
    } else if (first_failure.empty()) {
      first_failure = ", first failure: " + check.failure;
    }
  }
  std::ostringstream d;
  d << ok << "/1000 phasors pin X = |Re|, |Im| and b = [|Re|+|Im| >= c] over all (q, b)"
    << first_failure;
  return {ok == 1000, d.str()};
}

Outcome simulator_conservation() {
  std::mt19937_64 rng(9090);
  Rng topo_rng(9091);
  const Network feeder = test::ieee33();
  int passed = 0;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Network net = trial % 2 == 0
                            ? feeder
                            : test::random_feeder(rng, 2 + static_cast<int>(rng() % 30),
                                                  static_cast<int>(rng() % 6));
    const Topology topo = random_radial_topology(net, topo_rng);
    const std::map<int, Phasor> inj = test::random_loads(rng, net.node_count());
    const std::map<int, Phasor> cur = simulate_fundamental(net, topo, inj);
    double scale = 0.0;
    for (const auto& [node, v] : inj) scale += std::abs(v);
    bool ok = true;
    for (int node = 1; node <= net.node_count(); ++node) {
      Phasor out{};
      for (int id : net.incident(node)) out += test::walk_sign(net, id, node) * cur.at(id);
      Phasor expected{};
      if (node == kSubstation) {
        for (const auto& [n, v] : inj) expected -= v;
      } else {
        expected = inj.at(node);
      }
      const double rel = std::abs(out - expected) / scale;
      worst_rel = std::max(worst_rel, rel);
      ok = ok && rel <= 1e-9;
    }
    std::vector<HarmonicSource> sources;
    const int count = 1 + static_cast<int>(rng() % std::max(1, net.node_count() - 1));
    for (int k = 0; k < count && net.node_count() > 1; ++k) {
      sources.push_back({2 + static_cast<int>(rng() % (net.node_count() - 1)), 3,
                         test::random_phasor(rng, 0.1, 2.0)});
    }
    const auto harmonic = simulate_harmonic(net, topo, sources);
    std::map<int, Phasor> oracle;
    for (const Branch& br : net.branches()) oracle[br.id] = Phasor{};
    for (const HarmonicSource& s : sources) {
      int node = s.node;
      for (int id : path_to_substation(net, topo, s.node)) {
        oracle[id] += test::walk_sign(net, id, node) * s.current;
        node = net.opposite(id, node);
      }
    }
    for (const Branch& br : net.branches()) {
      if (sources.empty()) break;
      ok = ok && harmonic.at({br.id, 3}) == oracle.at(br.id);
    }
    passed += ok;
  }
  std::ostringstream d;
  d << passed << "/1000 topologies conserve current (worst KCL residual "
    << format_number(worst_rel) << " relative) with exact harmonic path sums";
  return {passed == 1000, d.str()};
}

Outcome determinism_and_formats() {
  const Network net = test::ieee33();
  const ScenarioConfig base = base_scenario(net);
  std::vector<std::string> failures;

  Experiment e = preset("fig8a", base);
  e.values = {5.0};
  e.iterations = 2;
  const EvalReport a = run_experiment(e, net, 1);
  const EvalReport b = run_experiment(e, net, 2);
  if (emit_csv(a) != emit_csv(b) || emit_detail_csv(a) != emit_detail_csv(b)) {
    failures.push_back("evaluation CSV differs between reruns");
  }
  if (experiment_to_json(e).dump() != experiment_to_json(e).dump()) {
    failures.push_back("experiment JSON unstable");
  }

  ScenarioConfig sc = base;
  sc.noise = {3.0, 5.0, 10.0, 90.0};
  sc.seed = 42;
  MeasurementDocument doc;
  doc.measurements = make_measurements(net, sc);
  const std::string m1 = dump_measurements(doc);
  doc.measurements = make_measurements(net, sc);
  if (dump_measurements(doc) != m1) failures.push_back("measurement JSON differs");
  const TopologyEstimate est1 = identify(Scheme::kProposed, net, doc.measurements, TiParameters{});
  const TopologyEstimate est2 = identify(Scheme::kProposed, net, doc.measurements, TiParameters{});
  if (dump_estimate(est1) != dump_estimate(est2)) failures.push_back("estimate JSON differs");

  for (Scheme scheme : {Scheme::kProposed, Scheme::kHarmonicOnly, Scheme::kTraditional}) {
    const Formulation f =
        build_model(scheme, net, doc.measurements, enumerate_loops(net), TiParameters{});
    const std::string text = milp::export_mps(f.model);
    const milp::MilpModel back = milp::import_mps(text);
    if (!milp::structurally_equal(f.model, back) || milp::export_mps(back) != text) {
      failures.push_back(std::string("MPS round trip fails for ") + to_string(scheme));
    }
  }

  const Network toy = load_network_file(test::fixture_dir() + "/toy2_network.json");
  const ScenarioConfig toy_sc =
      load_scenario_file(toy, test::fixture_dir() + "/toy2_scenario.json");
  const MeasurementSet toy_meas = make_measurements(toy, toy_sc);
  for (Scheme scheme : {Scheme::kProposed, Scheme::kTraditional}) {
    const Formulation f =
        build_model(scheme, toy, toy_meas, enumerate_loops(toy), TiParameters{});
    const std::string golden =
        read_text_file(test::fixture_dir() + "/toy2_" + to_string(scheme) + ".mps");
    if (milp::export_mps(f.model) != golden) {
      failures.push_back(std::string("golden MPS mismatch for ") + to_string(scheme));
    }
  }
  std::string detail = "rerun CSV/JSON byte-equal, MPS round trip for 3 schemes, 2 golden fixtures";
  if (!failures.empty()) {
    detail = failures.front();
    for (std::size_t i = 1; i < failures.size(); ++i) detail += "; " + failures[i];
  }
  return {failures.empty(), detail};
}

struct Criterion {
  int number;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace dnti

int main(int argc, char** argv) {
  using namespace dnti;
  const std::vector<Criterion> criteria{
      {1, "exact recovery", exact_recovery},
      {2, "fig6 trend", fig6_trend},
      {3, "path robustness", path_robustness},
      {4, "threshold robustness", threshold_robustness},
      {5, "source-count monotonicity", source_count_monotonicity},
      {6, "MILP oracle equivalence", milp_oracle_equivalence},
      {7, "linearization equivalence", linearization_equivalence},
      {8, "simulator conservation", simulator_conservation},
      {9, "determinism and formats", determinism_and_formats},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.count(c.number)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.number,
                c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
