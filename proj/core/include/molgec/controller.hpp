#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "molgec/error_estimation.hpp"
#include "molgec/mesh.hpp"
#include "molgec/problems.hpp"

namespace molgec {

enum class RefinementMode { uniform, adaptive };

std::string mode_name(RefinementMode mode);

struct ControlConstants {
  double c_time = 1.0 / 3.0;  // C_T, share of the tolerance granted to the time error
  double c_control = 1.2;
  double c_alpha = 10.0;
  std::size_t max_reruns = 10;

  void validate() const;
};

/// Local tolerances of one run. The alpha pair is only read in adaptive mode.
struct LocalTolerances {
  double abs = 1e-3;
  double rel = 1e-3;
  double alpha_abs = 1e-2;
  double alpha_rel = 1e-2;
};

/// Where the adaptive indicator samples the truncation estimate at fine midpoints.
enum class IndicatorSource {
  coarse_estimate,  // interpolated coarse-level estimate
  fine_estimate,    // the prolongated (scaled) fine-level estimate
};

struct RunOptions {
  double tau0 = 1e-5;
  RefinementMode mode = RefinementMode::uniform;
  std::size_t max_steps = 1'000'000;
  /// Mesh adaptations allowed while redoing a single time step.
  std::size_t max_adaptations_per_step = 20;
  IndicatorSource indicator = IndicatorSource::coarse_estimate;
  bool record_steps = false;
};

/// One attempted time step.
struct StepRecord {
  double t = 0.0;
  double tau = 0.0;
  double error = 0.0;      // D_n
  double tolerance = 0.0;  // Tol_n
  bool accepted = false;
  bool mesh_changed = false;
  std::size_t unknowns = 0;
};

struct RunTrace {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t adaptations = 0;
  double min_tau = 0.0;
  double max_tau = 0.0;
  std::vector<StepRecord> steps;
};

struct RunResult {
  MeshPair pair;  // final meshes
  std::vector<double> solution;  // V_{h,M}
  ErrorState errors;             // e~_{h,M}, eta~_{h,M}
  RunTrace trace;
};

class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrates from 0 to T on `pair` while transporting both global error
/// estimates. In adaptive mode the mesh is adapted inside each step and the
/// step is redone until D_n <= Tol_n and A_n <= Tol_n^alpha.
RunResult run_single(const ProblemSpec& spec, const MeshPair& pair, const LocalTolerances& tols,
                     const RunOptions& options);

struct GlobalTolerance {
  double abs = 1e-3;
  double rel = 1e-3;
};

/// One row of a control report (one run).
struct ReportRow {
  double tol = 0.0;
  std::optional<double> tol_alpha;
  std::size_t unknowns = 0;
  double tol_m = 0.0;
  double norm_total_est = 0.0;  // ||e~ + eta~||
  double norm_time_est = 0.0;
  double norm_space_est = 0.0;
  std::optional<double> true_error;
  std::optional<double> theta_est;
  std::optional<double> theta_ctr;
  std::optional<double> q_num;
  bool check_run = false;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  double h = 0.0;  // fine spacing (uniform) or domain length / fine intervals
};

enum class Verdict { converged, not_converged, failed };

std::string verdict_name(Verdict v);

struct ControlReport {
  std::string problem;
  RefinementMode mode = RefinementMode::uniform;
  double gtol = 0.0;
  std::size_t initial_unknowns = 0;
  std::vector<ReportRow> rows;
  Verdict verdict = Verdict::failed;
  std::optional<std::size_t> accepted_row;
  std::size_t reruns = 0;
  std::string message;
};

/// Summarizes a finished run against the global tolerance.
ReportRow make_row(const ProblemSpec& spec, const RunResult& run, const GlobalTolerance& gtol,
                   const LocalTolerances& tols, RefinementMode mode);

struct TimeGate {
  bool pass = true;
  double factor = 1.0;
};

/// Passes iff ||e~_M|| <= C_T C_control Tol_M; otherwise the local time
/// tolerances are to be scaled by fac = C_T Tol_M / ||e~_M||.
TimeGate time_error_gate(const ReportRow& row, const ControlConstants& constants);

/// Applies a failed time gate to the tolerances.
void apply_time_gate(LocalTolerances& tols, const TimeGate& gate);

struct SpaceUpdate {
  bool pass = true;
  std::size_t unknowns = 0;  // new resolution (uniform) when !pass
  double factor = 1.0;       // h_new / h (uniform) or Tol^alpha factor (adaptive)
};

/// Passes iff ||e~ + eta~|| <= C_control Tol_M; otherwise
/// h_new = ((1 - C_T) Tol_M / ||eta~||)^{1/q} h, rounded up to the next valid
/// fine resolution with an even interval count.
SpaceUpdate uniform_space_update(const ReportRow& row, const ControlConstants& constants,
                                 std::size_t unknowns, BoundaryKind bc, int order = 2);

/// Passes iff ||e~ + eta~|| <= C_control Tol_M; otherwise the alpha
/// tolerances are to be scaled by (1 - C_T) Tol_M / ||eta~|| (0.5 when that
/// factor would not make progress).
SpaceUpdate adaptive_space_update(const ReportRow& row, const ControlConstants& constants);

/// q_num = log(||eta~_h|| / ||eta~_hnew||) / log(h / h_new).
std::optional<double> observed_order(double eta_norm, double eta_norm_new, double h, double h_new);

/// Check-run pairs need |q_num - q| <= 0.25, or <= 0.5 when the coarser run
/// has fewer than 50 unknowns. A pair produced by a refinement step only
/// needs <= 0.5; its coarse run may be under-resolved.
bool order_acceptable(std::optional<double> q_num, int order, std::size_t coarser_unknowns,
                      bool after_refinement = false);

/// Fine resolution for a spacing scaled by `ratio` (h_new / h).
std::size_t resolution_for_ratio(std::size_t unknowns, double ratio, BoundaryKind bc);

/// Valid fine resolution closest to doubling h (ties go coarser).
std::size_t coarser_resolution(std::size_t unknowns, BoundaryKind bc);

/// Fine intervals even, coarse level non-empty.
bool valid_resolution(std::size_t unknowns, BoundaryKind bc);

struct ControlOptions {
  GlobalTolerance gtol;
  std::size_t initial_unknowns = 51;
  ControlConstants constants;
  RunOptions run;
};

ControlReport control_uniform(const ProblemSpec& spec, const ControlOptions& options);
ControlReport control_adaptive(const ProblemSpec& spec, const ControlOptions& options);

}  // namespace molgec
