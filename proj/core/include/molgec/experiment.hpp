#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "molgec/controller.hpp"
#include "molgec/problems.hpp"

namespace molgec {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Flat `key = value` configuration; repeated keys build lists, `#` starts a
/// comment.
///
///   problem = allen_cahn        # repeat to sweep several problems
///   mode = uniform
///   gtol = 1e-3
///   gtol = 1e-4
///   initial_unknowns = 831
///   output = out/allen_cahn
struct ExperimentConfig {
  std::vector<std::string> problems;  // canonical names; empty selects heat_neumann
  RefinementMode mode = RefinementMode::uniform;
  std::vector<double> gtols;
  std::vector<std::size_t> initial_unknowns;
  double tau0 = 1e-5;
  ControlConstants constants;
  BenchmarkParams params;
  IndicatorSource indicator = IndicatorSource::coarse_estimate;
  std::size_t max_steps = 1'000'000;
  std::string output;
  std::uint64_t seed = 0;  // reserved; the pipeline is deterministic
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Identifies one sweep cell in reports and golden files.
struct CellKey {
  std::string problem;
  RefinementMode mode = RefinementMode::uniform;
  double gtol = 0.0;
  std::size_t initial_unknowns = 0;
  std::optional<double> c_alpha;

  bool matches(const CellKey& other) const;
};

struct ReportCell {
  CellKey key;
  ControlReport report;
};

/// Runs one control report per (gtol, initial unknowns) cell on a bounded
/// worker pool. Cells come back in config order regardless of scheduling.
std::vector<ReportCell> run_experiment(const ExperimentConfig& config, std::size_t workers = 0);

/// Pool size: MOLGEC_WORKERS if set, else hardware concurrency.
std::size_t default_workers();

/// CSV with one row per run:
///   Tol,[Tolalpha,]N,TolM,normEtilde,normetilde,normetatilde,ThetaEst,ThetaCtr,qnum,check_run
/// Each cell is introduced by a `# cell ...` comment line carrying its key.
void write_csv(std::ostream& out, const std::vector<ReportCell>& cells);
std::vector<ReportCell> read_csv(std::istream& in);
std::vector<ReportCell> read_csv_file(const std::string& path);

/// Plain-text table per cell, laid out like a printed results table.
void write_summary(std::ostream& out, const std::vector<ReportCell>& cells);

std::vector<std::string> csv_columns(RefinementMode mode);

class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Allowed deviation per column; relative unless noted.
struct CompareTolerances {
  double tol = 0.05;
  double unknowns = 0.05;
  double tol_m = 0.05;
  double norms = 0.10;
  double theta_est_abs = 0.05;
  double theta_ctr = 0.15;
  double q_num_abs = 0.10;
};

struct CellDiff {
  CellKey key;
  bool pass = true;
  std::vector<std::string> messages;
};

struct CompareResult {
  std::vector<CellDiff> cells;
  bool pass() const;
};

/// Compares every golden cell with the matching report cell. Empty golden
/// fields are not compared.
CompareResult compare_to_golden(const std::vector<ReportCell>& report,
                                const std::vector<ReportCell>& golden,
                                const CompareTolerances& tolerances = {});

void write_compare(std::ostream& out, const CompareResult& result);

}  // namespace molgec
