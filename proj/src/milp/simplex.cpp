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

#include "dnti/milp/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace dnti::milp {
namespace {

constexpr double kDropTol = 1e-13;
constexpr double kVerifyTol = 1e-7;

}  // namespace

DenseSimplex::DenseSimplex(const LpProblem& lp, SimplexOptions opts)
    : opts_(opts), m_(lp.rows), n_(lp.cols), a_(lp.a) {
  const int total = n_ + m_;
  c_.assign(total, 0.0);
  lo_.resize(total);
  hi_.resize(total);
  for (int j = 0; j < n_; ++j) {
    c_[j] = lp.cost[j];
    lo_[j] = lp.col_lower[j];
    hi_[j] = lp.col_upper[j];
  }
  for (int i = 0; i < m_; ++i) {
    lo_[n_ + i] = lp.row_lower[i];
    hi_[n_ + i] = lp.row_upper[i];
  }
  a_start_.push_back(0);
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < n_; ++j) {
      const double v = a_[static_cast<std::size_t>(i) * n_ + j];
      if (v == 0.0) continue;
      a_col_.push_back(j);
      a_val_.push_back(v);
    }
    a_start_.push_back(static_cast<int>(a_col_.size()));
  }
  at_upper_.assign(total, 0);
  reset_to_slack_basis();
}

void DenseSimplex::set_col_bounds(int j, double lower, double upper) {
  if (lo_[j] == lower && hi_[j] == upper) return;
  lo_[j] = lower;
  hi_[j] = upper;
  if (is_basic(j)) return;
  const double value = nonbasic_value(j);
  move_nonbasic(-where_[j] - 1, value - x_[j]);
  x_[j] = value;
}

void DenseSimplex::reset_to_slack_basis() {
  const int total = n_ + m_;
  head_.resize(m_);
  nonbasic_.resize(n_);
  where_.assign(total, 0);
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    where_[n_ + i] = i;
  }
  for (int k = 0; k < n_; ++k) {
    nonbasic_[k] = k;
    where_[k] = -(k + 1);
  }
  t_.resize(static_cast<std::size_t>(m_) * n_);
  for (std::size_t p = 0; p < t_.size(); ++p) t_[p] = -a_[p];
  d_.assign(n_, 0.0);
  x_.assign(total, 0.0);
  compute_row_weights();
  compute_primal();
  compute_duals();
}

double DenseSimplex::nonbasic_value(int var) const {
  const bool lo_finite = std::isfinite(lo_[var]);
  const bool hi_finite = std::isfinite(hi_[var]);
  if (lo_finite && hi_finite) return at_upper_[var] ? hi_[var] : lo_[var];
  if (lo_finite) return lo_[var];
  if (hi_finite) return hi_[var];
  return 0.0;
}

void DenseSimplex::compute_primal() {
  vals_.assign(n_, 0.0);
  nz_.clear();
  for (int k = 0; k < n_; ++k) {
    const double v = nonbasic_value(nonbasic_[k]);
    x_[nonbasic_[k]] = v;
    vals_[k] = v;
    if (v != 0.0) nz_.push_back(k);
  }
  for (int i = 0; i < m_; ++i) {
    const double* ti = row(i);
    double acc = 0.0;
    for (int k : nz_) acc += ti[k] * vals_[k];
    x_[head_[i]] = -acc;
  }
}

void DenseSimplex::compute_duals() {
  for (int k = 0; k < n_; ++k) d_[k] = c_[nonbasic_[k]];
  for (int i = 0; i < m_; ++i) {
    const double cb = c_[head_[i]];
    if (cb == 0.0) continue;
    const double* ti = row(i);
    for (int k = 0; k < n_; ++k) d_[k] -= cb * ti[k];
  }
}

void DenseSimplex::compute_row_weights() {
  row_weight_.assign(m_, 1.0);
  for (int i = 0; i < m_; ++i) {
    const double* ti = row(i);
    double w = 1.0;
    for (int k = 0; k < n_; ++k) w += ti[k] * ti[k];
    row_weight_[i] = w;
  }
}

void DenseSimplex::refresh() {
  for (int i = 0; i < m_; ++i) {
    double* ti = row(i);
    double w = 1.0;
    for (int k = 0; k < n_; ++k) {
      if (std::abs(ti[k]) < kDropTol) ti[k] = 0.0;
      w += ti[k] * ti[k];
    }
    row_weight_[i] = w;
  }
  compute_primal();
  compute_duals();
  since_refresh_ = 0;
}

void DenseSimplex::pivot(int r, int k) {
  double* tr = row(r);
  const double inv = 1.0 / tr[k];
  nz_.clear();
  double norm2 = 0.0;
  for (int j = 0; j < n_; ++j) {
    if (j == k || tr[j] == 0.0) continue;
    const double v = tr[j] * inv;
    if (std::abs(v) < kDropTol) {
      tr[j] = 0.0;
      continue;
    }
    tr[j] = v;
    nz_.push_back(j);
    norm2 += v * v;
  }
  tr[k] = inv;
  row_weight_[r] = 1.0 + norm2 + inv * inv;
  for (int i = 0; i < m_; ++i) {
    if (i == r) continue;
    double* ti = row(i);
    const double f = ti[k];
    if (f == 0.0) continue;
    double dot = 0.0;
    for (int j : nz_) {
      dot += ti[j] * tr[j];
      ti[j] -= f * tr[j];
    }
    ti[k] = -f * inv;
    const double w = row_weight_[i] - f * f - 2.0 * f * dot + f * f * norm2 +
                     ti[k] * ti[k];
    row_weight_[i] = std::max(1.0, w);
  }
  const double f = d_[k];
  if (f != 0.0) {
    for (int j : nz_) d_[j] -= f * tr[j];
    d_[k] = -f * inv;
  }
  const int leaving = head_[r];
  const int entering = nonbasic_[k];
  head_[r] = entering;
  nonbasic_[k] = leaving;
  where_[entering] = r;
  where_[leaving] = -(k + 1);
}

void DenseSimplex::move_nonbasic(int k, double delta) {
  if (delta == 0.0) return;
  x_[nonbasic_[k]] += delta;
  for (int i = 0; i < m_; ++i) {
    const double tik = t_[static_cast<std::size_t>(i) * n_ + k];
    if (tik != 0.0) x_[head_[i]] -= tik * delta;
  }
}

double DenseSimplex::primal_infeasibility(int var) const {
  if (x_[var] < lo_[var] - opts_.primal_tol) return lo_[var] - x_[var];
  if (x_[var] > hi_[var] + opts_.primal_tol) return x_[var] - hi_[var];
  return 0.0;
}

double DenseSimplex::max_primal_infeasibility() const {
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) {
    worst = std::max(worst, primal_infeasibility(head_[i]));
  }
  return worst;
}

bool DenseSimplex::dual_feasible() const {
  for (int k = 0; k < n_; ++k) {
    const int var = nonbasic_[k];
    if (is_fixed(var)) continue;
    const bool free = !std::isfinite(lo_[var]) && !std::isfinite(hi_[var]);
    const bool up = std::isfinite(hi_[var]) &&
                    (at_upper_[var] || !std::isfinite(lo_[var]));
    if (free) {
      if (std::abs(d_[k]) > opts_.dual_tol) return false;
    } else if (up) {
      if (d_[k] > opts_.dual_tol) return false;
    } else if (d_[k] < -opts_.dual_tol) {
      return false;
    }
  }
  return true;
}

int DenseSimplex::price(const std::vector<double>& d, bool bland) const {
  int best = -1;
  double best_score = 0.0;
  for (int k = 0; k < n_; ++k) {
    const int var = nonbasic_[k];
    if (is_fixed(var)) continue;
    const bool free = !std::isfinite(lo_[var]) && !std::isfinite(hi_[var]);
    const bool up = std::isfinite(hi_[var]) &&
                    (at_upper_[var] || !std::isfinite(lo_[var]));
    double score = 0.0;
    if (free) {
      score = std::abs(d[k]);
    } else if (up) {
      score = d[k];
    } else {
      score = -d[k];
    }
    if (score <= opts_.dual_tol) continue;
    if (bland) {
      if (best < 0 || var < nonbasic_[best]) best = k;
    } else if (score > best_score) {
      best_score = score;
      best = k;
    }
  }
  return best;
}

int DenseSimplex::ratio_test_primal(int k, double dir, bool phase1, bool bland,
                                    double* theta) const {
  const double tol = opts_.primal_tol;
  const int entering = nonbasic_[k];
  const double range = hi_[entering] - lo_[entering];
  double theta_max = kInf;
  for (int i = 0; i < m_; ++i) {
    const double alpha = -t_[static_cast<std::size_t>(i) * n_ + k] * dir;
    if (std::abs(alpha) < opts_.pivot_tol) continue;
    const int b = head_[i];
    const double xb = x_[b];
    double limit = kInf;
    if (phase1 && xb < lo_[b] - tol) {
      if (alpha > 0) limit = (lo_[b] - xb) / alpha;
    } else if (phase1 && xb > hi_[b] + tol) {
      if (alpha < 0) limit = (hi_[b] - xb) / alpha;
    } else if (alpha > 0) {
      if (std::isfinite(hi_[b])) limit = (hi_[b] + tol - xb) / alpha;
    } else if (std::isfinite(lo_[b])) {
      limit = (lo_[b] - tol - xb) / alpha;
    }
    theta_max = std::min(theta_max, limit);
  }

  int best = -1;
  double best_alpha = 0.0;
  double best_theta = kInf;
  for (int i = 0; i < m_; ++i) {
    const double alpha = -t_[static_cast<std::size_t>(i) * n_ + k] * dir;
    if (std::abs(alpha) < opts_.pivot_tol) continue;
    const int b = head_[i];
    const double xb = x_[b];
    double exact = kInf;
    if (phase1 && xb < lo_[b] - tol) {
      if (alpha > 0) exact = (lo_[b] - xb) / alpha;
    } else if (phase1 && xb > hi_[b] + tol) {
      if (alpha < 0) exact = (hi_[b] - xb) / alpha;
    } else if (alpha > 0) {
      if (std::isfinite(hi_[b])) exact = (hi_[b] - xb) / alpha;
    } else if (std::isfinite(lo_[b])) {
      exact = (lo_[b] - xb) / alpha;
    }
    if (!std::isfinite(exact)) continue;
    exact = std::max(0.0, exact);
    if (bland) {
      if (best < 0 || exact < best_theta - 1e-12 ||
          (exact <= best_theta + 1e-12 && b < head_[best])) {
        best = i;
        best_theta = exact;
      }
    } else if (exact <= theta_max) {
      const double mag = std::abs(alpha);
      if (best < 0 || mag > best_alpha ||
          (mag == best_alpha && b < head_[best])) {
        best = i;
        best_alpha = mag;
        best_theta = exact;
      }
    }
  }
  if (std::isfinite(range) && (best < 0 || range <= best_theta)) {
    *theta = range;
    return -1;
  }
  *theta = best < 0 ? kInf : best_theta;
  return best;
}

DenseSimplex::Step DenseSimplex::primal_iteration(bool phase1, bool bland) {
  const std::vector<double>* d = &d_;
  if (phase1) {
    d1_.assign(n_, 0.0);
    bool any = false;
    for (int i = 0; i < m_; ++i) {
      const int b = head_[i];
      double c1 = 0.0;
      if (x_[b] < lo_[b] - opts_.primal_tol) {
        c1 = -1.0;
      } else if (x_[b] > hi_[b] + opts_.primal_tol) {
        c1 = 1.0;
      } else {
        continue;
      }
      any = true;
      const double* ti = row(i);
      for (int k = 0; k < n_; ++k) d1_[k] -= c1 * ti[k];
    }
    if (!any) return Step::kDone;
    d = &d1_;
  }
  const int k = price(*d, bland);
  if (k < 0) return phase1 ? Step::kInfeasible : Step::kDone;
  const int entering = nonbasic_[k];
  const double dir = (*d)[k] < 0 ? 1.0 : -1.0;
  double theta = 0.0;
  const int r = ratio_test_primal(k, dir, phase1, bland, &theta);
  if (!std::isfinite(theta)) {
    return phase1 ? Step::kFailure : Step::kUnbounded;
  }
  degenerate_run_ = theta < 1e-12 ? degenerate_run_ + 1 : 0;
  ++iterations_;
  if (r < 0) {
    move_nonbasic(k, dir * theta);
    at_upper_[entering] = dir > 0 ? 1 : 0;
    x_[entering] = dir > 0 ? hi_[entering] : lo_[entering];
    return Step::kContinue;
  }
  const int leaving = head_[r];
  const double alpha = -t_[static_cast<std::size_t>(r) * n_ + k] * dir;
  bool to_upper = alpha > 0;
  if (phase1 && x_[leaving] < lo_[leaving] - opts_.primal_tol) to_upper = false;
  if (phase1 && x_[leaving] > hi_[leaving] + opts_.primal_tol) to_upper = true;
  move_nonbasic(k, dir * theta);
  pivot(r, k);
  x_[leaving] = to_upper ? hi_[leaving] : lo_[leaving];
  at_upper_[leaving] = to_upper ? 1 : 0;
  if (++since_refresh_ >= opts_.refresh_interval) refresh();
  return Step::kContinue;
}

DenseSimplex::Step DenseSimplex::dual_iteration(bool bland) {
  int r = -1;
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) {
    const double inf = primal_infeasibility(head_[i]);
    if (inf <= 0.0) continue;
    if (bland) {
      if (r < 0 || head_[i] < head_[r]) r = i;
    } else if (inf * inf > worst * worst * row_weight_[i]) {
      worst = inf / std::sqrt(row_weight_[i]);
      r = i;
    }
  }
  if (r < 0) return Step::kDone;
  const int leaving = head_[r];
  const bool below = x_[leaving] < lo_[leaving];
  const double s = below ? 1.0 : -1.0;
  const double target = below ? lo_[leaving] : hi_[leaving];
  const double* tr = row(r);

  auto ratio = [&](int k, double* out) {
    const int var = nonbasic_[k];
    if (is_fixed(var)) return false;
    const double alpha = tr[k];
    if (std::abs(alpha) < opts_.pivot_tol) return false;
    const bool free = !std::isfinite(lo_[var]) && !std::isfinite(hi_[var]);
    const bool up = std::isfinite(hi_[var]) &&
                    (at_upper_[var] || !std::isfinite(lo_[var]));
    double dk = d_[k];
    if (free) {
      dk = std::abs(dk);
    } else if (up) {
      if (s * alpha <= 0) return false;
      dk = std::max(0.0, -dk);
    } else {
      if (-s * alpha <= 0) return false;
      dk = std::max(0.0, dk);
    }
    *out = dk / std::abs(alpha);
    return true;
  };

  double theta_max = kInf;
  for (int k = 0; k < n_; ++k) {
    double q = 0.0;
    if (!ratio(k, &q)) continue;
    theta_max = std::min(theta_max, q + opts_.dual_tol / std::abs(tr[k]));
  }
  int best = -1;
  double best_q = kInf;
  double best_alpha = 0.0;
  for (int k = 0; k < n_; ++k) {
    double q = 0.0;
    if (!ratio(k, &q)) continue;
    if (bland) {
      if (best < 0 || q < best_q - 1e-12 ||
          (q <= best_q + 1e-12 && nonbasic_[k] < nonbasic_[best])) {
        best = k;
        best_q = q;
      }
    } else if (q <= theta_max) {
      const double mag = std::abs(tr[k]);
      if (best < 0 || mag > best_alpha) {
        best = k;
        best_alpha = mag;
        best_q = q;
      }
    }
  }
  if (best < 0) return Step::kInfeasible;
  degenerate_run_ = best_q < 1e-12 ? degenerate_run_ + 1 : 0;
  ++iterations_;
  const double alpha = tr[best];
  const double delta = -(target - x_[leaving]) / alpha;
  move_nonbasic(best, delta);
  pivot(r, best);
  x_[leaving] = target;
  at_upper_[leaving] = below ? 0 : 1;
  if (++since_refresh_ >= opts_.refresh_interval) refresh();
  return Step::kContinue;
}

LpStatus DenseSimplex::run_primal() {
  const std::int64_t cap = iterations_ + 50LL * (m_ + n_) + 10000;
  const std::int64_t bland_after = 10LL * (m_ + n_);
  for (int attempt = 0; attempt < 4; ++attempt) {
    degenerate_run_ = 0;
    bool rechecked = false;
    for (;;) {
      if (iterations_ > cap) return LpStatus::kNumericalFailure;
      if (pivot_limit_ > 0 && iterations_ >= limit_at_) return LpStatus::kIterationLimit;
      const Step step = primal_iteration(true, degenerate_run_ > bland_after);
      if (step == Step::kContinue) continue;
      if (step == Step::kDone) break;
      if (step == Step::kInfeasible) {
        if (rechecked) return LpStatus::kInfeasible;
        reinvert(head_);
        rechecked = true;
        continue;
      }
      return LpStatus::kNumericalFailure;
    }
    degenerate_run_ = 0;
    for (;;) {
      if (iterations_ > cap) return LpStatus::kNumericalFailure;
      if (pivot_limit_ > 0 && iterations_ >= limit_at_) return LpStatus::kIterationLimit;
      const Step step = primal_iteration(false, degenerate_run_ > bland_after);
      if (step == Step::kContinue) continue;
      if (step == Step::kUnbounded) return LpStatus::kUnbounded;
      if (step == Step::kDone) break;
      return LpStatus::kNumericalFailure;
    }
    if (max_primal_infeasibility() == 0.0 && dual_feasible()) {
      return LpStatus::kOptimal;
    }
    refresh();
  }
  return LpStatus::kNumericalFailure;
}

LpStatus DenseSimplex::run_dual() {
  const std::int64_t cap = iterations_ + 50LL * (m_ + n_) + 10000;
  const std::int64_t bland_after = 10LL * (m_ + n_);
  degenerate_run_ = 0;
  bool rechecked = false;
  for (;;) {
    if (iterations_ > cap) return LpStatus::kNumericalFailure;
    if (pivot_limit_ > 0 && iterations_ >= limit_at_) return LpStatus::kIterationLimit;
    const Step step = dual_iteration(degenerate_run_ > bland_after);
    if (step == Step::kContinue) continue;
    if (step == Step::kInfeasible) {
      if (rechecked) return LpStatus::kInfeasible;
      reinvert(head_);
      rechecked = true;
      if (!dual_feasible()) return run_primal();
      continue;
    }
    break;
  }
  if (max_primal_infeasibility() == 0.0 && dual_feasible()) {
    return LpStatus::kOptimal;
  }
  refresh();
  return run_primal();
}

bool DenseSimplex::verify() {
  double scale = 1.0;
  double resid = 0.0;
  for (int i = 0; i < m_; ++i) {
    double act = 0.0;
    for (int p = a_start_[i]; p < a_start_[i + 1]; ++p) {
      act += a_val_[p] * x_[a_col_[p]];
    }
    scale = std::max(scale, std::abs(x_[n_ + i]));
    resid = std::max(resid, std::abs(act - x_[n_ + i]));
  }
  if (resid > 1e-9 * scale) return false;
  for (int i = 0; i < m_; ++i) {
    const int b = head_[i];
    if (x_[b] < lo_[b] - kVerifyTol || x_[b] > hi_[b] + kVerifyTol) return false;
  }
  return true;
}

LpStatus DenseSimplex::solve() {
  limit_at_ = iterations_ + pivot_limit_;
  for (int attempt = 0; attempt < 3; ++attempt) {
    LpStatus status = LpStatus::kOptimal;
    const bool primal_ok = max_primal_infeasibility() == 0.0;
    if (dual_feasible()) {
      if (!primal_ok) status = run_dual();
    } else {
      status = run_primal();
    }
    if (status != LpStatus::kOptimal) {
      if (status != LpStatus::kNumericalFailure) return status;
      if (pivot_limit_ > 0 && iterations_ >= limit_at_) return LpStatus::kIterationLimit;
    } else if (verify()) {
      return status;
    }
    // Drift in the maintained values is repaired by recomputing them; a
    // second failure rebuilds the tableau from the constraint matrix.
    if (attempt == 0 && status == LpStatus::kOptimal) {
      refresh();
    } else {
      reinvert(head_);
    }
  }
  return LpStatus::kNumericalFailure;
}

LpStatus DenseSimplex::solve_primal() {
  compute_primal();
  compute_duals();
  const LpStatus status = run_primal();
  if (status == LpStatus::kOptimal && !verify()) {
    reinvert(head_);
    return run_primal();
  }
  return status;
}

DenseSimplex::Basis DenseSimplex::basis() const {
  Basis b;
  b.head = head_;
  b.at_upper = at_upper_;
  return b;
}

void DenseSimplex::reinvert(const std::vector<int>& target_head) {
  const std::vector<unsigned char> saved = at_upper_;
  reset_to_slack_basis();
  at_upper_ = saved;
  std::vector<unsigned char> in_target(n_ + m_, 0);
  for (int v : target_head) in_target[v] = 1;
  for (int v : target_head) {
    if (is_basic(v)) continue;
    const int k = -where_[v] - 1;
    int best = -1;
    double best_mag = 1e-7;
    for (int i = 0; i < m_; ++i) {
      if (in_target[head_[i]]) continue;
      const double mag = std::abs(t_[static_cast<std::size_t>(i) * n_ + k]);
      if (mag > best_mag) {
        best_mag = mag;
        best = i;
      }
    }
    if (best >= 0) pivot(best, k);
  }
  refresh();
}

void DenseSimplex::load_basis(const Basis& target) {
  std::vector<unsigned char> in_target(n_ + m_, 0);
  for (int v : target.head) in_target[v] = 1;
  bool ok = true;
  for (int v : target.head) {
    if (is_basic(v)) continue;
    const int k = -where_[v] - 1;
    int best = -1;
    double best_mag = 1e-7;
    for (int i = 0; i < m_; ++i) {
      if (in_target[head_[i]]) continue;
      const double mag = std::abs(t_[static_cast<std::size_t>(i) * n_ + k]);
      if (mag > best_mag) {
        best_mag = mag;
        best = i;
      }
    }
    if (best < 0) {
      ok = false;
      break;
    }
    pivot(best, k);
  }
  at_upper_ = target.at_upper;
  if (!ok) {
    reinvert(target.head);
    return;
  }
  compute_primal();
  compute_duals();
}

double DenseSimplex::objective() const {
  double z = 0.0;
  for (int j = 0; j < n_; ++j) z += c_[j] * x_[j];
  return z;
}

std::vector<double> DenseSimplex::primal_values() const {
  return std::vector<double>(x_.begin(), x_.begin() + n_);
}

}  // namespace dnti::milp
