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

#include "dnti/formulation.hpp"

#include <algorithm>
#include <cmath>

#include "dnti/error.hpp"

namespace dnti {
namespace {

using milp::Sense;
using milp::Term;

constexpr int kPriorityS = 3;
constexpr int kPriorityB = 2;
constexpr int kPriorityQ = 1;

std::string tag(const std::string& prefix, int id) {
  return prefix + "_" + std::to_string(id);
}

// +1 when the branch leaves `node` in its canonical direction.
double orientation(const Branch& br, int node) {
  return br.from == node ? 1.0 : -1.0;
}

Formulation build(Scheme scheme, const Network& net, const MeasurementSet& meas,
                  const std::vector<Loop>& loops, const TiParameters& params) {
  params.validate();
  const bool harmonic = scheme != Scheme::kTraditional;
  const bool fundamental = scheme != Scheme::kHarmonicOnly;
  const int h = params.harmonic_order;

  Formulation f;
  f.scheme = scheme;
  f.harmonic_order = h;

  for (int id : net.pmu_branches()) {
    if (fundamental && !meas.fundamental_branch.count(id)) {
      throw DomainError("missing fundamental PMU measurement on branch " +
                        std::to_string(id));
    }
    if (harmonic && !meas.harmonic_branch.count({id, h})) {
      throw DomainError("missing harmonic PMU measurement on branch " +
                        std::to_string(id));
    }
  }
  std::map<int, Phasor> source_injection;
  if (harmonic) {
    std::vector<HarmonicSource> sources;
    for (const HarmonicSource& src : meas.harmonic_source_meas) {
      if (src.order != h) continue;
      if (src.node <= kSubstation || src.node > net.node_count()) {
        throw DomainError("harmonic source at invalid node " +
                          std::to_string(src.node));
      }
      sources.push_back(src);
      source_injection[src.node] += src.current;
    }
    if (params.z) {
      f.z = *params.z;
    } else {
      if (sources.empty()) {
        throw DomainError("z is zero: no harmonic sources of order " +
                          std::to_string(h));
      }
      f.z = compute_z(sources);
    }
    if (!(f.z > 0.0)) throw DomainError("z is zero");
    f.c = params.threshold_fraction * f.z;
  }
  if (fundamental) {
    for (int node = 2; node <= net.node_count(); ++node) {
      if (!meas.pseudo_injections.count(node)) {
        throw DomainError("missing pseudo injection at node " +
                          std::to_string(node));
      }
    }
  }
  f.big_m = params.big_m ? *params.big_m : compute_big_m(net, meas);
  const double big_m = f.big_m;
  if (harmonic) {
    f.harmonic_big_m = params.harmonic_big_m
                           ? *params.harmonic_big_m
                           : compute_harmonic_big_m(meas, h, f.z);
  }
  const double hm = f.harmonic_big_m;
  milp::MilpModel& m = f.model;

  for (const Branch& br : net.branches()) {
    BranchVars v;
    const int id = br.id;
    if (fundamental) {
      v.i_re = m.add_continuous(tag("ir", id), -milp::kInf, milp::kInf);
      v.i_im = m.add_continuous(tag("ii", id), -milp::kInf, milp::kInf);
    }
    if (harmonic) {
      v.h_re = m.add_continuous(tag("hr", id), -milp::kInf, milp::kInf);
      v.h_im = m.add_continuous(tag("hi", id), -milp::kInf, milp::kInf);
      v.x_r = m.add_continuous(tag("xr", id), 0.0, milp::kInf);
      v.x_i = m.add_continuous(tag("xi", id), 0.0, milp::kInf);
      v.x_h = m.add_continuous(tag("xh", id), -milp::kInf, milp::kInf);
      v.w_r = m.add_continuous(tag("wr", id), -milp::kInf, milp::kInf);
      v.w_i = m.add_continuous(tag("wi", id), -milp::kInf, milp::kInf);
      v.q_r = m.add_binary(tag("qr", id));
      v.q_i = m.add_binary(tag("qi", id));
      v.b = m.add_binary(tag("b", id));
      m.set_priority(v.q_r, kPriorityQ);
      m.set_priority(v.q_i, kPriorityQ);
      m.set_priority(v.b, kPriorityB);
    }
    v.s = m.add_binary(tag("s", id));
    m.set_priority(v.s, kPriorityS);
    f.vars.branch[id] = v;
  }
  for (int id : net.pmu_branches()) {
    PmuVars g;
    if (harmonic) {
      g.g_hr = m.add_continuous(tag("ghr", id), 0.0, milp::kInf);
      g.g_hi = m.add_continuous(tag("ghi", id), 0.0, milp::kInf);
      m.set_objective(g.g_hr, params.harmonic_weight);
      m.set_objective(g.g_hi, params.harmonic_weight);
    }
    if (fundamental) {
      g.g_r = m.add_continuous(tag("gr", id), 0.0, milp::kInf);
      g.g_i = m.add_continuous(tag("gi", id), 0.0, milp::kInf);
      m.set_objective(g.g_r, params.fundamental_weight);
      m.set_objective(g.g_i, params.fundamental_weight);
    }
    f.vars.pmu[id] = g;
  }

  auto kcl = [&](const std::string& family, int node, bool real, Phasor rhs) {
    std::vector<Term> terms;
    for (int id : net.incident(node)) {
      const BranchVars& v = f.vars.branch.at(id);
      int var = 0;
      if (family == "hkcl") {
        var = real ? v.h_re : v.h_im;
      } else {
        var = real ? v.i_re : v.i_im;
      }
      terms.push_back({var, orientation(net.branch(id), node)});
    }
    m.add_constraint(family + (real ? "_re_" : "_im_") + std::to_string(node),
                     std::move(terms), Sense::kEqual,
                     real ? rhs.real() : rhs.imag());
  };

  if (harmonic) {
    for (int node = 2; node <= net.node_count(); ++node) {
      const auto it = source_injection.find(node);
      const Phasor inj = it == source_injection.end() ? Phasor{} : it->second;
      kcl("hkcl", node, true, inj);
      kcl("hkcl", node, false, inj);
    }
    for (const Branch& br : net.branches()) {
      const BranchVars& v = f.vars.branch.at(br.id);
      const int id = br.id;
      for (int part = 0; part < 2; ++part) {
        const char* p = part == 0 ? "re" : "im";
        const int cur = part == 0 ? v.h_re : v.h_im;
        const int x = part == 0 ? v.x_r : v.x_i;
        const int w = part == 0 ? v.w_r : v.w_i;
        const int q = part == 0 ? v.q_r : v.q_i;
        const std::string base = std::string("abs_") + p;
        m.add_constraint(tag(base + "_def", id), {{cur, 1.0}, {w, -2.0}, {x, 1.0}},
                         Sense::kEqual, 0.0);
        m.add_constraint(tag(base + "_wub", id), {{w, 1.0}, {q, -hm}},
                         Sense::kLessEqual, 0.0);
        m.add_constraint(tag(base + "_wlb", id), {{w, 1.0}, {q, hm}},
                         Sense::kGreaterEqual, 0.0);
        m.add_constraint(tag(base + "_dub", id), {{w, 1.0}, {x, -1.0}, {q, hm}},
                         Sense::kLessEqual, hm);
        m.add_constraint(tag(base + "_dlb", id), {{w, 1.0}, {x, -1.0}, {q, -hm}},
                         Sense::kGreaterEqual, -hm);
      }
      m.add_constraint(tag("path_cmp", id),
                       {{v.b, 2.0 * f.c}, {v.x_h, -2.0}, {v.x_r, 1.0}, {v.x_i, 1.0}},
                       Sense::kLessEqual, f.c);
      m.add_constraint(tag("path_xub", id), {{v.x_h, 1.0}, {v.b, -hm}},
                       Sense::kLessEqual, 0.0);
      m.add_constraint(tag("path_xlb", id), {{v.x_h, 1.0}, {v.b, hm}},
                       Sense::kGreaterEqual, 0.0);
      m.add_constraint(tag("path_dub", id),
                       {{v.x_h, 1.0}, {v.x_r, -1.0}, {v.x_i, -1.0}, {v.b, hm}},
                       Sense::kLessEqual, hm);
      m.add_constraint(tag("path_dlb", id),
                       {{v.x_h, 1.0}, {v.x_r, -1.0}, {v.x_i, -1.0}, {v.b, -hm}},
                       Sense::kGreaterEqual, -hm);
    }
  }

  if (fundamental) {
    for (int node = 2; node <= net.node_count(); ++node) {
      const Phasor inj = meas.pseudo_injections.at(node);
      kcl("fkcl", node, true, inj);
      kcl("fkcl", node, false, inj);
    }
    for (const Branch& br : net.branches()) {
      const BranchVars& v = f.vars.branch.at(br.id);
      for (int cur : {v.i_re, v.i_im}) {
        const std::string p = cur == v.i_re ? "re" : "im";
        m.add_constraint(tag("switch_" + p + "_ub", br.id), {{cur, 1.0}, {v.s, -big_m}},
                         Sense::kLessEqual, 0.0);
        m.add_constraint(tag("switch_" + p + "_lb", br.id), {{cur, 1.0}, {v.s, big_m}},
                         Sense::kGreaterEqual, 0.0);
      }
    }
  }

  if (harmonic) {
    for (const Branch& br : net.branches()) {
      const BranchVars& v = f.vars.branch.at(br.id);
      m.add_constraint(tag("couple", br.id), {{v.b, 1.0}, {v.s, -1.0}},
                       Sense::kLessEqual, 0.0);
    }
  }
  for (std::size_t l = 0; l < loops.size(); ++l) {
    std::vector<Term> terms;
    for (int id : loops[l].branches) terms.push_back({f.vars.branch.at(id).s, 1.0});
    m.add_constraint(tag("loop", static_cast<int>(l)), std::move(terms),
                     Sense::kLessEqual, loops[l].size() - 1.0);
  }
  {
    std::vector<Term> terms;
    for (const Branch& br : net.branches()) {
      terms.push_back({f.vars.branch.at(br.id).s, 1.0});
    }
    m.add_constraint("radial", std::move(terms), Sense::kEqual,
                     net.node_count() - 1.0);
  }

  auto envelope = [&](const std::string& name, int cur, int g, double measured) {
    const double den = std::max(std::abs(measured), params.denom_floor);
    m.add_constraint(name + "_ub", {{cur, 1.0}, {g, -den}}, Sense::kLessEqual,
                     measured);
    m.add_constraint(name + "_lb", {{cur, 1.0}, {g, den}}, Sense::kGreaterEqual,
                     measured);
  };
  for (int id : net.pmu_branches()) {
    const BranchVars& v = f.vars.branch.at(id);
    const PmuVars& g = f.vars.pmu.at(id);
    if (harmonic) {
      const Phasor mh = meas.harmonic_branch.at({id, h});
      envelope(tag("envelope_hr", id), v.h_re, g.g_hr, mh.real());
      envelope(tag("envelope_hi", id), v.h_im, g.g_hi, mh.imag());
    }
    if (fundamental) {
      const Phasor mf = meas.fundamental_branch.at(id);
      envelope(tag("envelope_fr", id), v.i_re, g.g_r, mf.real());
      envelope(tag("envelope_fi", id), v.i_im, g.g_i, mf.imag());
    }
  }

  if (harmonic && params.valid_inequalities) {
    for (const Branch& br : net.branches()) {
      const BranchVars& v = f.vars.branch.at(br.id);
      m.add_constraint(tag("valid_rp", br.id), {{v.x_r, 1.0}, {v.h_re, -1.0}},
                       Sense::kGreaterEqual, 0.0);
      m.add_constraint(tag("valid_rn", br.id), {{v.x_r, 1.0}, {v.h_re, 1.0}},
                       Sense::kGreaterEqual, 0.0);
      m.add_constraint(tag("valid_ip", br.id), {{v.x_i, 1.0}, {v.h_im, -1.0}},
                       Sense::kGreaterEqual, 0.0);
      m.add_constraint(tag("valid_in", br.id), {{v.x_i, 1.0}, {v.h_im, 1.0}},
                       Sense::kGreaterEqual, 0.0);
    }
  }

  if (harmonic && params.sign_hint_tve_pct) {
    const double tve = *params.sign_hint_tve_pct / 100.0;
    if (tve < 1.0) {
      for (int id : net.pmu_branches()) {
        const Phasor mh = meas.harmonic_branch.at({id, h});
        const double bound = tve * std::abs(mh) / (1.0 - tve);
        const BranchVars& v = f.vars.branch.at(id);
        if (std::abs(mh.real()) > 3.0 * bound && mh.real() != 0.0) {
          m.add_hint(v.q_r, mh.real() > 0 ? 1.0 : 0.0);
        }
        if (std::abs(mh.imag()) > 3.0 * bound && mh.imag() != 0.0) {
          m.add_hint(v.q_i, mh.imag() > 0 ? 1.0 : 0.0);
        }
      }
    }
  }
  return f;
}

}  // namespace

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kProposed:
      return "proposed";
    case Scheme::kHarmonicOnly:
      return "harmonic_only";
    case Scheme::kTraditional:
      return "traditional";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& text) {
  if (text == "proposed") return Scheme::kProposed;
  if (text == "harmonic_only" || text == "harmonic") return Scheme::kHarmonicOnly;
  if (text == "traditional") return Scheme::kTraditional;
  throw ParseError("unknown scheme '" + text + "'");
}

void TiParameters::validate() const {
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
    throw DomainError("threshold_fraction must lie in (0, 1)");
  }
  if (big_m && !(*big_m > 0.0)) throw DomainError("big_m must be positive");
  if (harmonic_big_m && !(*harmonic_big_m > 0.0)) {
    throw DomainError("harmonic_big_m must be positive");
  }
  if (z && !(*z > 0.0)) throw DomainError("z must be positive");
  if (!(denom_floor > 0.0)) throw DomainError("denom_floor must be positive");
  if (harmonic_order < 2) throw DomainError("harmonic_order must be at least 2");
  if (!(harmonic_weight >= 0.0) || !(fundamental_weight >= 0.0)) {
    throw DomainError("objective weights must be non-negative");
  }
  if (sign_hint_tve_pct && !(*sign_hint_tve_pct >= 0.0)) {
    throw DomainError("sign_hint_tve_pct must be non-negative");
  }
}

double compute_z(const std::vector<HarmonicSource>& sources) {
  if (sources.empty()) throw DomainError("compute_z needs at least one source");
  if (sources.size() > 20) {
    throw DomainError("compute_z enumerates at most 20 sources; supply z");
  }
  double largest = 0.0;
  for (const HarmonicSource& s : sources) {
    if (s.order != sources.front().order) {
      throw DomainError("compute_z needs sources of a single order");
    }
    largest = std::max(largest, std::abs(s.current));
  }
  const double cancel = 1e-9 * largest;
  const std::size_t n = sources.size();
  double best = milp::kInf;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Phasor sum{};
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (1u << k)) sum += sources[k].current;
    }
    const double mag = std::abs(sum);
    if (mag < cancel || mag == 0.0) continue;
    best = std::min(best, mag);
  }
  if (!std::isfinite(best)) throw DomainError("all source combinations cancel");
  return best;
}

double compute_harmonic_big_m(const MeasurementSet& meas, int order, double z) {
  double total = 0.0;
  for (const HarmonicSource& s : meas.harmonic_source_meas) {
    if (s.order == order) total += std::abs(s.current);
  }
  return 10.0 * std::max(total, z);
}

double compute_big_m(const Network& net, const MeasurementSet& meas) {
  (void)net;
  double total = 0.0;
  for (const auto& [node, inj] : meas.pseudo_injections) total += std::abs(inj);
  for (const HarmonicSource& s : meas.harmonic_source_meas) {
    total += std::abs(s.current);
  }
  return std::max(1.0, 10.0 * total);
}

Formulation build_proposed(const Network& net, const MeasurementSet& meas,
                           const std::vector<Loop>& loops,
                           const TiParameters& params) {
  return build(Scheme::kProposed, net, meas, loops, params);
}

Formulation build_harmonic_only(const Network& net, const MeasurementSet& meas,
                                const std::vector<Loop>& loops,
                                const TiParameters& params) {
  return build(Scheme::kHarmonicOnly, net, meas, loops, params);
}

Formulation build_traditional(const Network& net, const MeasurementSet& meas,
                              const std::vector<Loop>& loops,
                              const TiParameters& params) {
  return build(Scheme::kTraditional, net, meas, loops, params);
}

Formulation build_model(Scheme scheme, const Network& net,
                        const MeasurementSet& meas,
                        const std::vector<Loop>& loops,
                        const TiParameters& params) {
  return build(scheme, net, meas, loops, params);
}

std::vector<double> truth_assignment(const Formulation& f, const Network& net,
                                     const GroundTruth& truth,
                                     const MeasurementSet& meas,
                                     const TiParameters& params) {
  std::vector<double> x(f.model.num_variables(), 0.0);
  const int h = f.harmonic_order;
  const Topology& topo = truth.topology;
  std::map<int, Phasor> fundamental;
  if (f.scheme != Scheme::kHarmonicOnly) {
    fundamental = simulate_fundamental(net, topo, meas.pseudo_injections);
  }
  std::vector<HarmonicSource> sources;
  for (const HarmonicSource& src : meas.harmonic_source_meas) {
    if (src.order == h) sources.push_back(src);
  }
  const std::map<HarmonicKey, Phasor> harmonic = simulate_harmonic(net, topo, sources);
  for (const Branch& br : net.branches()) {
    const BranchVars& v = f.vars.branch.at(br.id);
    x[v.s] = topo.closed.at(br.id) ? 1.0 : 0.0;
    if (v.i_re >= 0) {
      const auto it = fundamental.find(br.id);
      const Phasor cur = it == fundamental.end() ? Phasor{} : it->second;
      x[v.i_re] = cur.real();
      x[v.i_im] = cur.imag();
    }
    if (v.h_re >= 0) {
      const auto it = harmonic.find({br.id, h});
      const Phasor cur = it == harmonic.end() ? Phasor{} : it->second;
      const double xr = std::abs(cur.real());
      const double xi = std::abs(cur.imag());
      x[v.h_re] = cur.real();
      x[v.h_im] = cur.imag();
      x[v.x_r] = xr;
      x[v.x_i] = xi;
      x[v.q_r] = cur.real() > 0 ? 1.0 : 0.0;
      x[v.q_i] = cur.imag() > 0 ? 1.0 : 0.0;
      x[v.w_r] = x[v.q_r] * xr;
      x[v.w_i] = x[v.q_i] * xi;
      x[v.b] = xr + xi >= f.c ? 1.0 : 0.0;
      x[v.x_h] = x[v.b] * (xr + xi);
    }
  }
  auto residual = [&](double est, double measured) {
    return std::abs(est - measured) / std::max(std::abs(measured), params.denom_floor);
  };
  for (const auto& [id, g] : f.vars.pmu) {
    const BranchVars& v = f.vars.branch.at(id);
    if (g.g_hr >= 0) {
      const Phasor mh = meas.harmonic_branch.at({id, h});
      x[g.g_hr] = residual(x[v.h_re], mh.real());
      x[g.g_hi] = residual(x[v.h_im], mh.imag());
    }
    if (g.g_r >= 0) {
      const Phasor mf = meas.fundamental_branch.at(id);
      x[g.g_r] = residual(x[v.i_re], mf.real());
      x[g.g_i] = residual(x[v.i_im], mf.imag());
    }
  }
  return x;
}

std::string constraint_family(const std::string& row_name) {
  return row_name.substr(0, row_name.find('_'));
}

std::map<std::string, double> violated_families(const milp::MilpModel& model,
                                                const std::vector<double>& x,
                                                double tol) {
  std::map<std::string, double> out;
  for (int i = 0; i < model.num_constraints(); ++i) {
    const double v = model.row_violation(i, x);
    if (v > tol) {
      double& slot = out[constraint_family(model.constraint(i).name)];
      slot = std::max(slot, v);
    }
  }
  return out;
}

}  // namespace dnti
