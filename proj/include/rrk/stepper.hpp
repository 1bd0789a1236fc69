#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrk/controller.hpp"
#include "rrk/problem.hpp"
#include "rrk/relaxation.hpp"
#include "rrk/tableau.hpp"

namespace rrk {

enum class StrategyKind { Baseline, Naive, FsalR, RFsal };

/// First-stage seed for the next FSAL-R step.
enum class FsalRStage1 { Simple, Interpolation };

/// R-FSAL embedded solution: V1/V2 advance with dt, V3/V4 with gamma*dt;
/// V2/V4 reverse-interpolate the FSAL stage, V1/V3 use f(u_gamma) directly.
enum class RFsalEmbedded { V1, V2, V3, V4 };

/// R-FSAL error comparison: C1 u vs u_hat, C2 u_gamma vs u_hat_gamma,
/// C3 u_gamma vs u_hat.
enum class RFsalCompare { C1, C2, C3 };

struct Strategy {
  StrategyKind kind = StrategyKind::Baseline;
  FsalRStage1 fsalr_stage1 = FsalRStage1::Interpolation;
  RFsalEmbedded rfsal_embedded = RFsalEmbedded::V4;
  RFsalCompare rfsal_compare = RFsalCompare::C3;

  static Strategy baseline() { return {}; }
  static Strategy naive() { return {StrategyKind::Naive}; }
  static Strategy fsalr(FsalRStage1 stage1 = FsalRStage1::Interpolation) {
    return {StrategyKind::FsalR, stage1};
  }
  static Strategy rfsal(RFsalEmbedded embedded = RFsalEmbedded::V4, RFsalCompare compare = RFsalCompare::C3) {
    return {StrategyKind::RFsal, FsalRStage1::Interpolation, embedded, compare};
  }

  bool relaxes() const { return kind != StrategyKind::Baseline; }
  bool requires_fsal() const { return kind == StrategyKind::FsalR || kind == StrategyKind::RFsal; }

  std::string name() const {
    switch (kind) {
      case StrategyKind::Baseline: return "baseline";
      case StrategyKind::Naive: return "naive";
      case StrategyKind::FsalR: return "fsalr";
      case StrategyKind::RFsal: return "rfsal";
    }
    return "?";
  }

  std::string variant() const {
    if (kind == StrategyKind::FsalR)
      return fsalr_stage1 == FsalRStage1::Simple ? "simple" : "interpolation";
    if (kind == StrategyKind::RFsal) {
      static const char* emb[] = {"v1", "v2", "v3", "v4"};
      static const char* cmp[] = {"c1", "c2", "c3"};
      return std::string(emb[static_cast<int>(rfsal_embedded)]) + "-" + cmp[static_cast<int>(rfsal_compare)];
    }
    return "-";
  }
};

enum class StepMode { Adaptive, Fixed };

enum class RunStatus { Ok, DtCollapse, MaxSteps, NonFinite };

inline std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::DtCollapse: return "dt-collapse";
    case RunStatus::MaxSteps: return "max-steps";
    case RunStatus::NonFinite: return "non-finite";
  }
  return "?";
}

template <typename Scalar>
struct StepOutcome {
  bool accepted = false;
  Scalar gamma = 1;
  Scalar t_new = 0;
  Scalar dt_used = 0;
  Scalar dt_next = 0;
  Scalar error_norm = 0;
  std::int64_t rhs_calls = 0;
  bool relaxation_fallback = false;
  /// FSAL-R diagnostics: ||cached k1 - f(u_gamma)|| (evaluated off the books).
  std::optional<Scalar> cache_error;
};

template <typename Scalar>
struct IntegratorOptions {
  Tolerances<Scalar> tol{};
  std::array<Scalar, 3> beta{Scalar(0.60), Scalar(-0.20), Scalar(0)};
  std::optional<int> controller_order;
  Scalar accept_threshold = Scalar(0.81);
  Scalar w_floor = Scalar(1e-10);
  std::optional<Scalar> dt0;
  std::optional<Scalar> dt_min;
  std::optional<Scalar> dt_max;
  /// Fixed step size; disables error control when set.
  std::optional<Scalar> fixed_dt;
  std::int64_t max_steps = 10'000'000;
  RelaxationConfig<Scalar> relaxation{};
  /// Adaptive runs: a failed relaxation solve rejects the step and retries
  /// with dt scaled by this factor. Fixed-step runs fall back to gamma = 1.
  Scalar relaxation_failure_shrink = Scalar(0.25);
  bool reject_on_relaxation_failure = true;
  bool diagnose_cache = false;
  /// Called after every accepted step with (t, u, gamma, dt_used).
  std::function<void(Scalar, const Vector<Scalar>&, Scalar, Scalar)> observer;
};

template <typename Scalar>
struct RunRecord {
  std::string problem;
  std::string method;
  std::string strategy;
  std::string variant;
  Scalar tol_or_dt = 0;
  Scalar final_error = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar entropy_drift = 0;
  std::int64_t rhs_calls = 0;
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  Scalar gamma_min = 1;
  Scalar gamma_max = 1;
  RunStatus status = RunStatus::Ok;
  std::int64_t runtime_ns = 0;

  Scalar t_final = 0;
  Scalar eta0 = 0;
  std::int64_t relaxation_fallbacks = 0;
  Scalar max_cache_error = 0;

  Scalar max_gamma_deviation() const { return std::max(gamma_max - Scalar(1), Scalar(1) - gamma_min); }
};

template <typename Scalar>
struct StageResult {
  std::vector<Vector<Scalar>> k;
  Vector<Scalar> u_candidate;
  int rhs_calls = 0;
};

/// Stages k^i = f(y^i), y^i = u + dt sum_{j<i} a_ij k^j, and the main update.
/// Only the stages feeding `b` are formed; for FSAL tableaux the trailing stage
/// is the derivative at the candidate and is left to the caller.
template <typename Scalar, typename Rhs>
StageResult<Scalar> rk_stages(Rhs&& f, Scalar t, const Vector<Scalar>& u_start, Scalar dt, const Tableau<Scalar>& tab,
                              const std::optional<Vector<Scalar>>& k1 = std::nullopt) {
  if (!(dt > 0)) throw std::invalid_argument("rk_stages: dt must be positive");
  if (k1 && tab.c(0) != Scalar(0)) throw std::invalid_argument("rk_stages: cached first stage needs c_1 = 0");
  const int m = tab.main_stages();
  StageResult<Scalar> r;
  r.k.assign(m, Vector<Scalar>(u_start.size()));
  Vector<Scalar> y(u_start.size());
  for (int i = 0; i < m; ++i) {
    if (i == 0 && k1) {
      r.k[0] = *k1;
      continue;
    }
    y = u_start;
    for (int j = 0; j < i; ++j)
      if (tab.a(i, j) != Scalar(0)) y.noalias() += (dt * tab.a(i, j)) * r.k[j];
    f(t + tab.c(i) * dt, y, r.k[i]);
    ++r.rhs_calls;
  }
  r.u_candidate = u_start;
  for (int i = 0; i < m; ++i)
    if (tab.b(i) != Scalar(0)) r.u_candidate.noalias() += (dt * tab.b(i)) * r.k[i];
  return r;
}

/// Single-run integrator for one (problem, tableau, strategy) triple.
///
/// State between steps is the (possibly relaxed) solution u^n at time t^n and
/// the cached first-stage derivative. The cache is exact f(u^n) for baseline
/// and R-FSAL, approximate for FSAL-R, and invalid after a naive step.
template <typename Scalar>
class Integrator {
 public:
  using Vec = Vector<Scalar>;

  Integrator(const Problem<Scalar>& problem, Tableau<Scalar> tableau, Strategy strategy,
             IntegratorOptions<Scalar> options = {})
      : problem_(problem), tab_(std::move(tableau)), strategy_(strategy), opts_(std::move(options)) {
    if (strategy_.requires_fsal() && !tab_.fsal)
      throw std::invalid_argument(strategy_.name() + " requires an FSAL tableau, got " + tab_.name);
    ctrl_.beta = opts_.beta;
    ctrl_.p_ctrl = opts_.controller_order.value_or(tab_.has_embedded() ? controller_order(tab_) : tab_.p);
    ctrl_.accept_threshold = opts_.accept_threshold;
    ctrl_.w_floor = opts_.w_floor;
    const auto n = problem_.dim;
    k_.assign(tab_.main_stages(), Vec(n));
    k1_.resize(n);
    k_fsal_.resize(n);
    y_.resize(n);
    reset();
  }

  void reset() {
    u_ = problem_.u0;
    t_ = problem_.t0;
    k1_valid_ = false;
    rhs_calls_ = 0;
  }

  /// Prepares adaptive stepping towards t_end and returns the first step size.
  /// Without a user dt0 this spends f(u0) (kept as the first stage) and one
  /// trial evaluation.
  Scalar start(Scalar t_end) {
    const Scalar span = t_end - t_;
    if (!(span > 0)) throw std::invalid_argument("integrate: t_end must exceed t0");
    ctrl_.dt_min = opts_.dt_min.value_or(Scalar(1e-14) * span);
    ctrl_.dt_max = opts_.dt_max.value_or(span);
    ctrl_.eps_prev = ctrl_.eps_prev2 = 1;
    if (opts_.dt0) {
      ctrl_.dt = *opts_.dt0;
    } else {
      ensure_first_stage();
      if (!tab_.has_embedded())
        throw std::invalid_argument("adaptive stepping requires an embedded pair, got " + tab_.name);
      ctrl_.dt = initial_step<Scalar>([this](Scalar t, const Vec& u, Vec& du) { eval(t, u, du); }, t_, u_, k1_,
                                      ctrl_.p_ctrl, opts_.tol);
    }
    ctrl_.dt = std::clamp(ctrl_.dt, ctrl_.dt_min, ctrl_.dt_max);
    return ctrl_.dt;
  }

  StepOutcome<Scalar> step(Scalar dt, StepMode mode) {
    if (mode == StepMode::Adaptive && !tab_.has_embedded())
      throw std::invalid_argument("adaptive stepping requires an embedded pair, got " + tab_.name);
    const bool adaptive = mode == StepMode::Adaptive;
    StepOutcome<Scalar> out;
    const std::int64_t calls_before = rhs_calls_;
    out.dt_used = dt;

    ensure_first_stage();
    compute_stages(dt);

    switch (strategy_.kind) {
      case StrategyKind::Baseline: step_baseline(out, dt, adaptive); break;
      case StrategyKind::Naive: step_naive(out, dt, adaptive); break;
      case StrategyKind::FsalR: step_fsalr(out, dt, adaptive); break;
      case StrategyKind::RFsal: step_rfsal(out, dt, adaptive); break;
    }
    if (!adaptive) {
      out.accepted = true;
      out.dt_next = dt;
    }
    out.t_new = t_;
    out.rhs_calls = rhs_calls_ - calls_before;
    return out;
  }

  const Vec& state() const { return u_; }
  Scalar time() const { return t_; }
  std::int64_t rhs_calls() const { return rhs_calls_; }
  const ControllerState<Scalar>& controller() const { return ctrl_; }
  ControllerState<Scalar>& controller() { return ctrl_; }
  const Tableau<Scalar>& tableau() const { return tab_; }
  const Strategy& strategy() const { return strategy_; }
  bool first_stage_cached() const { return k1_valid_; }
  const Vec& first_stage() const { return k1_; }

 private:
  void eval(Scalar t, const Vec& u, Vec& du) {
    problem_.rhs(t, u, du);
    ++rhs_calls_;
  }

  void ensure_first_stage() {
    if (!k1_valid_) {
      eval(t_, u_, k1_);
      k1_valid_ = true;
      k1_exact_ = true;
    }
  }

  void compute_stages(Scalar dt) {
    const int m = tab_.main_stages();
    k_[0] = k1_;
    for (int i = 1; i < m; ++i) {
      y_ = u_;
      for (int j = 0; j < i; ++j)
        if (tab_.a(i, j) != Scalar(0)) y_.noalias() += (dt * tab_.a(i, j)) * k_[j];
      eval(t_ + tab_.c(i) * dt, y_, k_[i]);
    }
    u_cand_ = u_;
    for (int i = 0; i < m; ++i)
      if (tab_.b(i) != Scalar(0)) u_cand_.noalias() += (dt * tab_.b(i)) * k_[i];
  }

  // u_start + h (sum_i b_hat_i k^i + b_hat_{s+1} g)
  Vec embedded(Scalar h, const Vec& fsal_value) const {
    Vec u_hat = u_;
    const int m = tab_.main_stages();
    for (int i = 0; i < m; ++i)
      if (tab_.b_hat(i) != Scalar(0)) u_hat.noalias() += (h * tab_.b_hat(i)) * k_[i];
    if (tab_.b_hat(tab_.s) != Scalar(0)) u_hat.noalias() += (h * tab_.b_hat(tab_.s)) * fsal_value;
    return u_hat;
  }

  void decide(StepOutcome<Scalar>& out, const Vec& u, const Vec& u_hat) {
    Scalar w = weighted_error_norm(u, u_hat, opts_.tol);
    if (!std::isfinite(w)) w = std::numeric_limits<Scalar>::max();
    out.error_norm = w;
    const auto proposal = propose_step(ctrl_, w, ctrl_.p_ctrl);
    out.accepted = proposal.accept;
    out.dt_next = proposal.dt_new;
  }

  struct Relaxed {
    Scalar gamma;
    Vec u;
    bool fallback;
  };

  Relaxed relax(const Vec& u_new) {
    const Vec direction = u_new - u_;
    if (direction.isZero(Scalar(0))) return {Scalar(1), u_new, false};
    try {
      auto r = solve_gamma<Scalar>(u_, u_new, problem_.entropy, opts_.relaxation);
      return {r.gamma, std::move(r.u_relaxed), false};
    } catch (const RelaxationFailure&) {
      return {Scalar(1), u_new, true};
    }
  }

  void step_baseline(StepOutcome<Scalar>& out, Scalar dt, bool adaptive) {
    if (tab_.fsal) eval(t_ + dt, u_cand_, k_fsal_);
    if (adaptive) decide(out, u_cand_, embedded(dt, k_fsal_));
    if (adaptive && !out.accepted) return;
    u_ = u_cand_;
    t_ += dt;
    if (tab_.fsal) {
      k1_ = k_fsal_;
    } else {
      k1_valid_ = false;
    }
  }

  // Turns an accepted adaptive step into a rejection when relaxation failed.
  // An approximate FSAL-R first stage is replaced by f(u^n) and the same dt
  // is retried; otherwise dt shrinks.
  bool reject_failed_relaxation(StepOutcome<Scalar>& out, const Relaxed& r, Scalar dt, bool adaptive,
                                const ControllerState<Scalar>& before) {
    if (!(adaptive && r.fallback && opts_.reject_on_relaxation_failure)) return false;
    ctrl_ = before;
    if (k1_exact_) {
      ctrl_.dt = std::max(opts_.relaxation_failure_shrink * dt, ctrl_.dt_min);
    } else {
      ctrl_.dt = dt;
      k1_valid_ = false;
    }
    out.accepted = false;
    out.relaxation_fallback = true;
    out.dt_next = ctrl_.dt;
    return true;
  }

  void step_naive(StepOutcome<Scalar>& out, Scalar dt, bool adaptive) {
    const auto before = ctrl_;
    if (adaptive) {
      eval(t_ + dt, u_cand_, k_fsal_);
      decide(out, u_cand_, embedded(dt, k_fsal_));
      if (!out.accepted) return;
    }
    auto r = relax(u_cand_);
    if (reject_failed_relaxation(out, r, dt, adaptive, before)) return;
    out.gamma = r.gamma;
    out.relaxation_fallback = r.fallback;
    u_ = std::move(r.u);
    t_ += r.gamma * dt;
    k1_valid_ = false;
  }

  void step_fsalr(StepOutcome<Scalar>& out, Scalar dt, bool adaptive) {
    const auto before = ctrl_;
    eval(t_ + dt, u_cand_, k_fsal_);
    if (adaptive) {
      decide(out, u_cand_, embedded(dt, k_fsal_));
      if (!out.accepted) return;
    }
    auto r = relax(u_cand_);
    if (reject_failed_relaxation(out, r, dt, adaptive, before)) return;
    out.gamma = r.gamma;
    out.relaxation_fallback = r.fallback;
    u_ = std::move(r.u);
    t_ += r.gamma * dt;
    k1_exact_ = r.gamma == Scalar(1);
    if (strategy_.fsalr_stage1 == FsalRStage1::Simple) {
      k1_ = k_fsal_;
    } else {
      // f(u_gamma) ~ f(u^n) + gamma (f(u^{n+1}) - f(u^n)), with f(u^n) the stage k^1 in use.
      k1_ = k_[0] + r.gamma * (k_fsal_ - k_[0]);
    }
    if (opts_.diagnose_cache) {
      Vec exact(u_.size());
      problem_.rhs(t_, u_, exact);
      out.cache_error = (k1_ - exact).norm();
    }
  }

  void step_rfsal(StepOutcome<Scalar>& out, Scalar dt, bool adaptive) {
    auto r = relax(u_cand_);
    if (reject_failed_relaxation(out, r, dt, adaptive, ctrl_)) return;
    out.gamma = r.gamma;
    out.relaxation_fallback = r.fallback;
    const Scalar gamma = r.gamma;
    const Scalar t_gamma = t_ + gamma * dt;
    eval(t_gamma, r.u, k_fsal_);

    if (adaptive) {
      const auto variant = strategy_.rfsal_embedded;
      const bool interpolate = variant == RFsalEmbedded::V2 || variant == RFsalEmbedded::V4;
      const bool scaled = variant == RFsalEmbedded::V3 || variant == RFsalEmbedded::V4;
      const Vec fsal_value = interpolate ? Vec(k_[0] + (k_fsal_ - k_[0]) / gamma) : k_fsal_;
      const Vec u_hat = embedded(scaled ? gamma * dt : dt, fsal_value);
      switch (strategy_.rfsal_compare) {
        case RFsalCompare::C1: decide(out, u_cand_, u_hat); break;
        case RFsalCompare::C2: decide(out, r.u, relaxed_state<Scalar>(u_, u_hat - u_, gamma)); break;
        case RFsalCompare::C3: decide(out, r.u, u_hat); break;
      }
      if (!out.accepted) return;
    }
    u_ = std::move(r.u);
    t_ = t_gamma;
    k1_ = k_fsal_;
  }

  const Problem<Scalar>& problem_;
  Tableau<Scalar> tab_;
  Strategy strategy_;
  IntegratorOptions<Scalar> opts_;
  ControllerState<Scalar> ctrl_;

  Vec u_;
  Scalar t_ = 0;
  Vec k1_;
  bool k1_valid_ = false;
  bool k1_exact_ = true;
  std::int64_t rhs_calls_ = 0;

  std::vector<Vec> k_;
  Vec y_;
  Vec u_cand_;
  Vec k_fsal_;
};

/// Runs one integration to t_end (adaptive unless `options.fixed_dt` is set).
///
/// Adaptive runs clip the last step to land on t_end; relaxation still rescales
/// it, so the record reports the actual final time and the error there. Fixed
/// runs take round((t_end - t0) / dt) steps.
template <typename Scalar>
RunRecord<Scalar> integrate(const Problem<Scalar>& problem, const Tableau<Scalar>& tableau, const Strategy& strategy,
                            const IntegratorOptions<Scalar>& options, Scalar t_end) {
  RunRecord<Scalar> rec;
  rec.problem = problem.name;
  rec.method = tableau.name;
  rec.strategy = strategy.name();
  rec.variant = strategy.variant();
  rec.tol_or_dt = options.fixed_dt ? *options.fixed_dt : options.tol.rel;

  const auto started = std::chrono::steady_clock::now();
  Integrator<Scalar> integ(problem, tableau, strategy, options);
  rec.eta0 = problem.entropy(problem.u0);
  bool first_gamma = true;

  auto record_accepted = [&](const StepOutcome<Scalar>& out) {
    ++rec.accepted;
    const Scalar drift = std::abs(problem.entropy(integ.state()) - rec.eta0);
    if (!(drift <= rec.entropy_drift)) rec.entropy_drift = drift;
    if (strategy.relaxes()) {
      if (first_gamma) {
        rec.gamma_min = rec.gamma_max = out.gamma;
        first_gamma = false;
      } else {
        rec.gamma_min = std::min(rec.gamma_min, out.gamma);
        rec.gamma_max = std::max(rec.gamma_max, out.gamma);
      }
    }
    if (out.relaxation_fallback) ++rec.relaxation_fallbacks;
    if (out.cache_error) rec.max_cache_error = std::max(rec.max_cache_error, *out.cache_error);
    if (options.observer) options.observer(integ.time(), integ.state(), out.gamma, out.dt_used);
  };
  auto finite_state = [&] { return integ.state().allFinite() && std::isfinite(integ.time()); };

  if (options.fixed_dt) {
    const Scalar dt = *options.fixed_dt;
    if (!(dt > 0)) throw std::invalid_argument("integrate: fixed dt must be positive");
    const auto n = static_cast<std::int64_t>(std::llround((t_end - problem.t0) / dt));
    for (std::int64_t i = 0; i < n; ++i) {
      const auto out = integ.step(dt, StepMode::Fixed);
      record_accepted(out);
      if (!finite_state()) {
        rec.status = RunStatus::NonFinite;
        break;
      }
    }
  } else {
    Scalar dt = integ.start(t_end);
    const Scalar dt_min = integ.controller().dt_min;
    while (true) {
      const Scalar remaining = t_end - integ.time();
      if (remaining <= dt_min) break;
      if (rec.accepted + rec.rejected >= options.max_steps) {
        rec.status = RunStatus::MaxSteps;
        break;
      }
      const bool last = dt >= remaining;
      const Scalar dt_try = last ? remaining : dt;
      const auto out = integ.step(dt_try, StepMode::Adaptive);
      if (out.accepted) {
        record_accepted(out);
        if (!finite_state()) {
          rec.status = RunStatus::NonFinite;
          break;
        }
        if (last) break;
      } else {
        ++rec.rejected;
        if (out.relaxation_fallback) ++rec.relaxation_fallbacks;
        if (dt_try <= dt_min) {
          rec.status = RunStatus::DtCollapse;
          break;
        }
      }
      dt = out.dt_next;
    }
  }

  rec.rhs_calls = integ.rhs_calls();
  rec.t_final = integ.time();
  if (rec.status == RunStatus::Ok && problem.has_reference())
    rec.final_error = problem.l2_norm(integ.state() - problem.exact(rec.t_final));
  rec.runtime_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - started).count();
  return rec;
}

}  // namespace rrk
