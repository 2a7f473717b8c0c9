// molgec: run control experiments and compare reports against golden tables.
//
//   molgec run configs/heat.cfg [--workers N] [--csv out.csv] [--quiet]
//   molgec compare report.csv golden.csv
//   molgec list-problems
//
// Exit codes: 0 success, 1 comparison mismatch, 2 usage or structural error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "molgec/experiment.hpp"

namespace fs = std::filesystem;

namespace {

int run_command(const std::string& config_path, std::size_t workers, std::string csv_path,
                bool quiet) {
  const auto config = molgec::load_config(config_path);
  const auto cells = molgec::run_experiment(config, workers);

  if (csv_path.empty() && !config.output.empty()) csv_path = config.output + ".csv";
  if (!csv_path.empty()) {
    const fs::path p(csv_path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) {
      std::cerr << "cannot write '" << csv_path << "'\n";
      return 2;
    }
    molgec::write_csv(out, cells);
    if (!config.output.empty()) {
      std::ofstream summary(config.output + ".txt");
      molgec::write_summary(summary, cells);
    }
  } else {
    molgec::write_csv(std::cout, cells);
  }
  // Failed cells are recorded in the report; the sweep itself still succeeds.
  if (!quiet) molgec::write_summary(csv_path.empty() ? std::cerr : std::cout, cells);
  return 0;
}

int compare_command(const std::string& report_path, const std::string& golden_path) {
  const auto report = molgec::read_csv_file(report_path);
  const auto golden = molgec::read_csv_file(golden_path);
  const auto result = molgec::compare_to_golden(report, golden);
  molgec::write_compare(std::cout, result);
  return result.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global error control for 1D parabolic problems"};
  app.require_subcommand(1);

  std::string config_path;
  std::size_t workers = 0;
  std::string csv_path;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run every cell of an experiment config");
  run->add_option("config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("-w,--workers", workers, "Worker threads (default: MOLGEC_WORKERS or all cores)");
  run->add_option("--csv", csv_path, "CSV report path (default: <output>.csv or stdout)");
  run->add_flag("-q,--quiet", quiet, "Skip the summary table");

  std::string report_path;
  std::string golden_path;
  auto* compare = app.add_subcommand("compare", "Compare a CSV report with a golden CSV");
  compare->add_option("report", report_path)->required()->check(CLI::ExistingFile);
  compare->add_option("golden", golden_path)->required()->check(CLI::ExistingFile);

  auto* list = app.add_subcommand("list-problems", "Print the built-in benchmark names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return run_command(config_path, workers, csv_path, quiet);
    if (*compare) return compare_command(report_path, golden_path);
    if (*list) {
      for (const auto& name : molgec::benchmark_names()) std::cout << name << '\n';
      return 0;
    }
  } catch (const molgec::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return 2;
  } catch (const molgec::StructuralError& e) {
    std::cerr << "malformed report: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
