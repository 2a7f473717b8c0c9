#include "molgec/controller.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "molgec/rosenbrock.hpp"
#include "molgec/spatial.hpp"

namespace molgec {

std::string mode_name(RefinementMode mode) {
  return mode == RefinementMode::uniform ? "uniform" : "adaptive";
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::converged: return "converged";
    case Verdict::not_converged: return "not_converged";
    case Verdict::failed: return "failed";
  }
  return "failed";
}

void ControlConstants::validate() const {
  if (!(c_time > 0.0 && c_time < 1.0)) throw std::invalid_argument("C_T must lie in (0, 1)");
  if (!(c_control >= 1.0)) throw std::invalid_argument("C_control must be >= 1");
  if (!(c_alpha > 1.0)) throw std::invalid_argument("C_alpha must be > 1");
}

namespace {

struct StepState {
  MeshPair pair;
  std::vector<double> v;
  std::vector<double> f;
  ErrorState errors;
};

// Moves the solution and both error fields onto `next` at time t.
void move_to_mesh(const ProblemSpec& spec, StepState& s, MeshPair next, double t) {
  const Mesh& from = s.pair.fine();
  const Mesh& to = next.fine();
  auto carry = [&](const std::vector<double>& values, std::optional<double> fill) {
    const auto nodal = with_boundary(spec, from, t, values, fill);
    auto moved = transfer_solution(nodal, from, to);
    if (to.boundary() == BoundaryKind::neumann) return moved;
    return std::vector<double>(moved.begin() + 1, moved.end() - 1);
  };
  // Before the first accepted step the initial profile is known exactly, so
  // sample it instead of interpolating an under-resolved one.
  s.v = t == 0.0 ? initial_restriction(spec, to) : carry(s.v, std::nullopt);
  s.errors.time_error = carry(s.errors.time_error, 0.0);
  s.errors.space_error = carry(s.errors.space_error, 0.0);
  s.pair = std::move(next);
  s.f = apply_rhs(spec, s.pair.fine(), t, s.v);
}

AdaptMarks coarsen_only(const AdaptMarks& marks) { return {{}, marks.coarsen}; }

}  // namespace

RunResult run_single(const ProblemSpec& spec, const MeshPair& pair, const LocalTolerances& tols,
                     const RunOptions& options) {
  const double horizon = spec.horizon;
  const double tau_min = 1e-14 * horizon;
  const double gamma = ros3p().gamma;
  const bool adaptive = options.mode == RefinementMode::adaptive;

  StepState s{pair, initial_restriction(spec, pair.fine()), {}, {}};
  s.f = apply_rhs(spec, s.pair.fine(), 0.0, s.v);
  s.errors = ErrorState::zero(s.v.size());

  RunTrace trace;
  trace.min_tau = std::numeric_limits<double>::infinity();
  double t = 0.0;
  double tau = fit_to_horizon(options.tau0, 0.0, horizon);
  std::size_t attempts = 0;
  std::size_t adaptations_this_step = 0;
  ShiftedSolver step_lu;
  ShiftedSolver half_lu;

  while (t < horizon) {
    if (++attempts > options.max_steps) {
      throw RunError("run_single: step limit of " + std::to_string(options.max_steps) +
                     " exceeded at t = " + std::to_string(t));
    }
    const Mesh& fine = s.pair.fine();
    const MolSystem system(spec, fine);
    const auto jac = system.jacobian(t, s.v);
    const double norm_v = l2_norm(fine, s.v);
    const double tol_n = tols.abs + tols.rel * norm_v;

    std::vector<double> v_next;
    std::vector<double> f_next;
    MidpointResidual mid;
    double error = 0.0;
    bool singular = false;
    try {
      step_lu.factorize(jac, gamma * tau);
      v_next = ros3p_step(system, t, tau, s.v, s.f, step_lu);
      f_next = system.rhs(t + tau, v_next);
      const HermiteSegment seg{t, tau, s.v, s.f, v_next, f_next};
      mid = residual_midpoint(system, seg);
      error = l2_norm(fine, local_error_estimate(step_lu, mid.residual));
      singular = !std::isfinite(error);
    } catch (const SingularSystemError&) {
      singular = true;
    }

    StepRecord record{t, tau, error, tol_n, false, false, fine.unknown_count()};
    if (singular) {
      ++trace.rejected;
      tau *= 0.5;
      if (options.record_steps) trace.steps.push_back(record);
      if (tau < tau_min) throw RunError("run_single: step size underflow after singular stage system");
      continue;
    }

    const auto proposal = propose_step(error, tol_n, tau, t, horizon);
    if (!proposal.accept) {
      ++trace.rejected;
      if (options.record_steps) trace.steps.push_back(record);
      tau = proposal.tau_next;
      if (tau < tau_min) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "run_single: step size fell below %.3e at t = %.6g", tau_min, t);
        throw RunError(buf);
      }
      continue;
    }

    // The Hermite midpoint state carries a tau*(F0 - F1)/8 term that is pure
    // noise in stiff modes, and the Richardson difference amplifies it by
    // 1/h^2. Averaging the two endpoint estimates avoids that.
    std::vector<double> coarse_alpha =
        truncation_estimate_coarse(spec, s.pair, t, s.v, s.f);
    {
      const auto end_alpha = truncation_estimate_coarse(spec, s.pair, t + tau, v_next, f_next);
      for (std::size_t k = 0; k < coarse_alpha.size(); ++k) {
        coarse_alpha[k] = 0.5 * (coarse_alpha[k] + end_alpha[k]);
      }
    }
    auto fine_alpha = prolongate_truncation(coarse_alpha, s.pair, spec.spatial_order);

    std::optional<AlphaIndicator> indicator;
    if (adaptive) {
      const double tol_alpha = tols.alpha_abs + tols.alpha_rel * norm_v;
      std::vector<double> samples;
      if (options.indicator == IndicatorSource::coarse_estimate) {
        samples = midpoint_truncation(coarse_alpha, s.pair);
      } else {
        samples.resize(s.pair.coarse().interval_count());
        const std::size_t first = fine.first_unknown();
        for (std::size_t k = 0; k < samples.size(); ++k) samples[k] = fine_alpha[2 * k + 1 - first];
      }
      indicator = alpha_indicator(samples, s.pair, tol_alpha);
      if (indicator->value > tol_alpha &&
          adaptations_this_step < options.max_adaptations_per_step) {
        auto next = adapt_coarse_mesh(s.pair, indicator->marks);
        if (!(next.fine() == s.pair.fine())) {
          move_to_mesh(spec, s, std::move(next), t);
          ++adaptations_this_step;
          ++trace.adaptations;
          record.mesh_changed = true;
          if (options.record_steps) trace.steps.push_back(record);
          continue;  // redo the step on the new mesh
        }
      }
    }

    half_lu.factorize(jac, 0.5 * tau);
    advance_time_error(s.errors.time_error, half_lu, tau, mid.residual);
    advance_space_error(s.errors.space_error, half_lu, tau, fine_alpha);

    t += tau;
    if (horizon - t <= 1e-12 * horizon) t = horizon;
    s.v = std::move(v_next);
    s.f = std::move(f_next);
    ++trace.accepted;
    trace.min_tau = std::min(trace.min_tau, tau);
    trace.max_tau = std::max(trace.max_tau, tau);
    record.accepted = true;
    adaptations_this_step = 0;

    if (indicator && indicator->value <= tols.alpha_abs + tols.alpha_rel * norm_v &&
        !indicator->marks.coarsen.empty() && t < horizon) {
      auto next = adapt_coarse_mesh(s.pair, coarsen_only(indicator->marks));
      if (!(next.fine() == s.pair.fine())) {
        move_to_mesh(spec, s, std::move(next), t);
        ++trace.adaptations;
        record.mesh_changed = true;
      }
    }
    if (options.record_steps) trace.steps.push_back(record);
    tau = proposal.tau_next;
  }

  if (trace.accepted == 0) trace.min_tau = 0.0;
  return {std::move(s.pair), std::move(s.v), std::move(s.errors), std::move(trace)};
}

ReportRow make_row(const ProblemSpec& spec, const RunResult& run, const GlobalTolerance& gtol,
                   const LocalTolerances& tols, RefinementMode mode) {
  const Mesh& fine = run.pair.fine();
  ReportRow row;
  row.tol = tols.abs;
  if (mode == RefinementMode::adaptive) row.tol_alpha = tols.alpha_abs;
  row.unknowns = fine.unknown_count();
  row.tol_m = gtol.abs + gtol.rel * l2_norm(fine, run.solution);
  std::vector<double> total(run.solution.size());
  for (std::size_t k = 0; k < total.size(); ++k) {
    total[k] = run.errors.time_error[k] + run.errors.space_error[k];
  }
  row.norm_total_est = l2_norm(fine, total);
  row.norm_time_est = l2_norm(fine, run.errors.time_error);
  row.norm_space_est = l2_norm(fine, run.errors.space_error);
  row.accepted_steps = run.trace.accepted;
  row.rejected_steps = run.trace.rejected;
  row.h = fine.domain().length() / static_cast<double>(fine.interval_count());
  if (spec.has_exact()) {
    auto err = exact_restriction(spec, fine, spec.horizon);
    for (std::size_t k = 0; k < err.size(); ++k) err[k] = run.solution[k] - err[k];
    const double e = l2_norm(fine, err);
    row.true_error = e;
    if (e > 0.0) {
      row.theta_est = row.norm_total_est / e;
      row.theta_ctr = row.tol_m / e;
    }
  }
  return row;
}

TimeGate time_error_gate(const ReportRow& row, const ControlConstants& c) {
  TimeGate gate;
  gate.pass = row.norm_time_est <= c.c_time * c.c_control * row.tol_m;
  if (!gate.pass) gate.factor = c.c_time * row.tol_m / row.norm_time_est;
  return gate;
}

void apply_time_gate(LocalTolerances& tols, const TimeGate& gate) {
  if (gate.pass) return;
  tols.abs *= gate.factor;
  tols.rel *= gate.factor;
}

bool valid_resolution(std::size_t unknowns, BoundaryKind bc) {
  if (bc == BoundaryKind::neumann && unknowns < 3) return false;
  if (bc == BoundaryKind::dirichlet && unknowns < 3) return false;
  return intervals_for_unknowns(unknowns, bc) % 2 == 0;
}

std::size_t resolution_for_ratio(std::size_t unknowns, double ratio, BoundaryKind bc) {
  const double intervals = static_cast<double>(intervals_for_unknowns(unknowns, bc));
  const double target = intervals / ratio;
  auto even = static_cast<std::size_t>(2.0 * std::ceil(target / 2.0 - 1e-9));
  even = std::max<std::size_t>(even, bc == BoundaryKind::dirichlet ? 4 : 2);
  return unknowns_for_intervals(even, bc);
}

std::size_t coarser_resolution(std::size_t unknowns, BoundaryKind bc) {
  const double half = 0.5 * static_cast<double>(intervals_for_unknowns(unknowns, bc));
  const auto lower = static_cast<std::size_t>(2.0 * std::floor(half / 2.0));
  const std::size_t upper = lower + 2;
  const std::size_t pick = (half - static_cast<double>(lower) <= static_cast<double>(upper) - half)
                               ? lower
                               : upper;
  return unknowns_for_intervals(std::max<std::size_t>(pick, 2), bc);
}

SpaceUpdate uniform_space_update(const ReportRow& row, const ControlConstants& c,
                                 std::size_t unknowns, BoundaryKind bc, int order) {
  SpaceUpdate out;
  out.unknowns = unknowns;
  out.pass = row.norm_total_est <= c.c_control * row.tol_m;
  if (out.pass) return out;
  if (!(row.norm_space_est > 0.0)) {
    // Nothing to refine against; let the caller's rerun guard end the loop.
    out.factor = 0.5;
  } else {
    out.factor = std::pow((1.0 - c.c_time) * row.tol_m / row.norm_space_est, 1.0 / order);
  }
  if (out.factor >= 1.0) out.factor = 0.5;
  out.unknowns = resolution_for_ratio(unknowns, out.factor, bc);
  return out;
}

SpaceUpdate adaptive_space_update(const ReportRow& row, const ControlConstants& c) {
  SpaceUpdate out;
  out.unknowns = row.unknowns;
  out.pass = row.norm_total_est <= c.c_control * row.tol_m;
  if (out.pass) return out;
  out.factor = row.norm_space_est > 0.0 ? (1.0 - c.c_time) * row.tol_m / row.norm_space_est : 0.5;
  if (out.factor >= 0.99) out.factor = 0.5;
  return out;
}

std::optional<double> observed_order(double eta_norm, double eta_norm_new, double h, double h_new) {
  if (!(eta_norm > 0.0) || !(eta_norm_new > 0.0) || !(h > 0.0) || !(h_new > 0.0) || h == h_new) {
    return std::nullopt;
  }
  return std::log(eta_norm / eta_norm_new) / std::log(h / h_new);
}

bool order_acceptable(std::optional<double> q_num, int order, std::size_t coarser_unknowns,
                      bool after_refinement) {
  if (!q_num) return false;
  const double band = (after_refinement || coarser_unknowns < 50) ? 0.5 : 0.25;
  return std::abs(*q_num - order) <= band;
}

namespace {

LocalTolerances initial_tolerances(const ControlOptions& o) {
  return {o.gtol.abs, o.gtol.rel, o.constants.c_alpha * o.gtol.abs,
          o.constants.c_alpha * o.gtol.rel};
}

ControlReport new_report(const ProblemSpec& spec, const ControlOptions& o, RefinementMode mode) {
  o.constants.validate();
  if (!(o.gtol.abs > 0.0) || !(o.gtol.rel >= 0.0)) {
    throw std::invalid_argument("global tolerances must be positive");
  }
  ControlReport report;
  report.problem = spec.name;
  report.mode = mode;
  report.gtol = o.gtol.abs;
  report.initial_unknowns = o.initial_unknowns;
  return report;
}

}  // namespace

ControlReport control_uniform(const ProblemSpec& spec, const ControlOptions& o) {
  auto report = new_report(spec, o, RefinementMode::uniform);
  RunOptions run_opts = o.run;
  run_opts.mode = RefinementMode::uniform;
  const auto bc = spec.bc;
  const auto& c = o.constants;

  if (!valid_resolution(o.initial_unknowns, bc)) {
    report.message = "initial resolution " + std::to_string(o.initial_unknowns) +
                     " has no coarse parent";
    return report;
  }

  LocalTolerances tols = initial_tolerances(o);
  std::size_t base = o.initial_unknowns;  // h_0
  std::size_t unknowns = base;            // h
  std::size_t restart_row = 0;

  try {
    while (true) {
      const auto run = run_single(spec, MeshPair::uniform(spec.domain, unknowns, bc), tols, run_opts);
      report.rows.push_back(make_row(spec, run, o.gtol, tols, RefinementMode::uniform));
      const std::size_t current = report.rows.size() - 1;

      auto next_rerun = [&]() {
        if (++report.reruns > c.max_reruns) {
          report.verdict = Verdict::not_converged;
          report.message = "rerun limit exceeded";
          return false;
        }
        return true;
      };

      const auto gate = time_error_gate(report.rows[current], c);
      if (!gate.pass) {
        apply_time_gate(tols, gate);
        if (!next_rerun()) return report;
        continue;
      }

      const auto space = uniform_space_update(report.rows[current], c, unknowns, bc,
                                              spec.spatial_order);
      if (!space.pass) {
        unknowns = space.unknowns;
        if (!next_rerun()) return report;
        continue;
      }

      // Verify the observed spatial order.
      std::optional<std::size_t> previous;
      for (std::size_t r = current; r-- > restart_row;) {
        if (!report.rows[r].check_run && report.rows[r].unknowns != unknowns) {
          previous = r;
          break;
        }
      }
      std::optional<double> q_num;
      std::size_t coarser = unknowns;
      if (previous) {
        const auto& prev = report.rows[*previous];
        auto& cur = report.rows[current];
        q_num = observed_order(prev.norm_space_est, cur.norm_space_est, prev.h, cur.h);
        cur.q_num = q_num;
        coarser = std::min(prev.unknowns, cur.unknowns);
      } else {
        const std::size_t check = coarser_resolution(unknowns, bc);
        if (!valid_resolution(check, bc)) {
          report.verdict = Verdict::converged;
          report.accepted_row = current;
          report.message = "accepted without order check: no valid coarser resolution";
          return report;
        }
        const auto check_run =
            run_single(spec, MeshPair::uniform(spec.domain, check, bc), tols, run_opts);
        auto row = make_row(spec, check_run, o.gtol, tols, RefinementMode::uniform);
        row.check_run = true;
        const auto& cur = report.rows[current];
        q_num = observed_order(row.norm_space_est, cur.norm_space_est, row.h, cur.h);
        row.q_num = q_num;
        coarser = check;
        report.rows.push_back(row);
      }

      if (order_acceptable(q_num, spec.spatial_order, coarser, previous.has_value())) {
        report.verdict = Verdict::converged;
        report.accepted_row = current;
        return report;
      }
      base = coarser_resolution(base, bc);
      if (!valid_resolution(base, bc)) {
        report.verdict = Verdict::not_converged;
        report.message = "observed order check failed and the initial mesh cannot be coarsened";
        return report;
      }
      unknowns = base;
      restart_row = report.rows.size();
      if (!next_rerun()) return report;
    }
  } catch (const std::exception& e) {
    report.verdict = Verdict::failed;
    report.message = e.what();
  }
  return report;
}

ControlReport control_adaptive(const ProblemSpec& spec, const ControlOptions& o) {
  auto report = new_report(spec, o, RefinementMode::adaptive);
  RunOptions run_opts = o.run;
  run_opts.mode = RefinementMode::adaptive;
  const auto& c = o.constants;
  if (!valid_resolution(o.initial_unknowns, spec.bc)) {
    report.message = "initial resolution " + std::to_string(o.initial_unknowns) +
                     " has no coarse parent";
    return report;
  }
  const auto initial = MeshPair::uniform(spec.domain, o.initial_unknowns, spec.bc);
  LocalTolerances tols = initial_tolerances(o);

  try {
    while (true) {
      const auto run = run_single(spec, initial, tols, run_opts);
      report.rows.push_back(make_row(spec, run, o.gtol, tols, RefinementMode::adaptive));
      const auto& row = report.rows.back();

      const auto gate = time_error_gate(row, c);
      const auto space = gate.pass ? adaptive_space_update(row, c) : SpaceUpdate{};
      if (gate.pass && space.pass) {
        report.verdict = Verdict::converged;
        report.accepted_row = report.rows.size() - 1;
        return report;
      }
      if (!gate.pass) {
        apply_time_gate(tols, gate);
      } else {
        tols.alpha_abs *= space.factor;
        tols.alpha_rel *= space.factor;
      }
      if (++report.reruns > c.max_reruns) {
        report.verdict = Verdict::not_converged;
        report.message = "rerun limit exceeded";
        return report;
      }
    }
  } catch (const std::exception& e) {
    report.verdict = Verdict::failed;
    report.message = e.what();
  }
  return report;
}

}  // namespace molgec
