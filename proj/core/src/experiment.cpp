#include "molgec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace molgec {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string{}; }

double parse_double(const std::string& s, std::size_t line, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(line, "'" + key + "' expects a number, got '" + s + "'");
  }
}

std::size_t parse_count(const std::string& s, std::size_t line, const std::string& key) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ConfigError(line, "'" + key + "' expects a non-negative integer, got '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(trim(field));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(line_no, "missing value for '" + key + "'");

    if (key == "problem") {
      const auto id = parse_benchmark(value);
      if (!id) throw ConfigError(line_no, "unknown problem '" + value + "'");
      cfg.problems.push_back(benchmark_name(*id));
    } else if (key == "mode") {
      if (value == "uniform") cfg.mode = RefinementMode::uniform;
      else if (value == "adaptive") cfg.mode = RefinementMode::adaptive;
      else throw ConfigError(line_no, "mode must be 'uniform' or 'adaptive'");
    } else if (key == "gtol") {
      const double g = parse_double(value, line_no, key);
      if (!(g > 0.0 && g < 1.0)) throw ConfigError(line_no, "gtol must lie in (0, 1)");
      cfg.gtols.push_back(g);
    } else if (key == "initial_unknowns") {
      cfg.initial_unknowns.push_back(parse_count(value, line_no, key));
    } else if (key == "tau0") {
      cfg.tau0 = parse_double(value, line_no, key);
      if (!(cfg.tau0 > 0.0)) throw ConfigError(line_no, "tau0 must be positive");
    } else if (key == "c_time") {
      cfg.constants.c_time = parse_double(value, line_no, key);
    } else if (key == "c_control") {
      cfg.constants.c_control = parse_double(value, line_no, key);
    } else if (key == "c_alpha") {
      cfg.constants.c_alpha = parse_double(value, line_no, key);
    } else if (key == "max_reruns") {
      cfg.constants.max_reruns = parse_count(value, line_no, key);
    } else if (key == "max_steps") {
      cfg.max_steps = parse_count(value, line_no, key);
    } else if (key == "epsilon") {
      cfg.params.burgers_epsilon = parse_double(value, line_no, key);
    } else if (key == "indicator") {
      if (value == "coarse_estimate") cfg.indicator = IndicatorSource::coarse_estimate;
      else if (value == "fine_estimate") cfg.indicator = IndicatorSource::fine_estimate;
      else throw ConfigError(line_no, "indicator must be 'coarse_estimate' or 'fine_estimate'");
    } else if (key == "output") {
      cfg.output = value;
    } else if (key == "seed") {
      cfg.seed = parse_count(value, line_no, key);
    } else {
      throw ConfigError(line_no, "unknown key '" + key + "'");
    }
  }
  try {
    cfg.constants.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(line_no, e.what());
  }
  if (cfg.problems.empty()) cfg.problems.push_back(benchmark_name(BenchmarkId::heat_neumann));
  for (const auto& name : cfg.problems) {
    const auto spec = make_benchmark(name, cfg.params);
    for (auto n : cfg.initial_unknowns) {
      if (!valid_resolution(n, spec.bc)) {
        throw ConfigError(line_no, "initial_unknowns = " + std::to_string(n) +
                                       " admits no coarse parent for " + name);
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  return parse_config(in);
}

bool CellKey::matches(const CellKey& o) const {
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); };
  if (problem != o.problem || mode != o.mode || initial_unknowns != o.initial_unknowns) return false;
  if (!close(gtol, o.gtol)) return false;
  if (c_alpha && o.c_alpha && !close(*c_alpha, *o.c_alpha)) return false;
  return true;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("MOLGEC_WORKERS")) {
    try {
      const auto n = std::stoul(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ReportCell> run_experiment(const ExperimentConfig& config, std::size_t workers) {
  std::vector<ProblemSpec> specs;
  std::vector<std::size_t> spec_of_cell;
  std::vector<ReportCell> cells;
  auto names = config.problems;
  if (names.empty()) names.push_back(benchmark_name(BenchmarkId::heat_neumann));
  for (const auto& name : names) {
    specs.push_back(make_benchmark(name, config.params));
    for (double g : config.gtols) {
      for (auto n : config.initial_unknowns) {
        CellKey key{name, config.mode, g, n, std::nullopt};
        if (config.mode == RefinementMode::adaptive) key.c_alpha = config.constants.c_alpha;
        cells.push_back({key, {}});
        spec_of_cell.push_back(specs.size() - 1);
      }
    }
  }
  if (cells.empty()) return cells;

  if (workers == 0) workers = default_workers();
  workers = std::min(workers, cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      ControlOptions opts;
      opts.gtol = {cells[i].key.gtol, cells[i].key.gtol};
      opts.initial_unknowns = cells[i].key.initial_unknowns;
      opts.constants = config.constants;
      opts.run.tau0 = config.tau0;
      opts.run.max_steps = config.max_steps;
      opts.run.indicator = config.indicator;
      const ProblemSpec& spec = specs[spec_of_cell[i]];
      try {
        cells[i].report = config.mode == RefinementMode::uniform ? control_uniform(spec, opts)
                                                                 : control_adaptive(spec, opts);
      } catch (const std::exception& e) {
        cells[i].report.problem = spec.name;
        cells[i].report.verdict = Verdict::failed;
        cells[i].report.message = e.what();
      }
      cells[i].report.mode = config.mode;
      cells[i].report.gtol = cells[i].key.gtol;
      cells[i].report.initial_unknowns = cells[i].key.initial_unknowns;
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  return cells;
}

std::vector<std::string> csv_columns(RefinementMode mode) {
  std::vector<std::string> cols{"Tol"};
  if (mode == RefinementMode::adaptive) cols.emplace_back("Tolalpha");
  for (const char* c : {"N", "TolM", "normEtilde", "normetilde", "normetatilde", "ThetaEst",
                        "ThetaCtr", "qnum", "check_run"}) {
    cols.emplace_back(c);
  }
  return cols;
}

void write_csv(std::ostream& out, const std::vector<ReportCell>& cells) {
  const RefinementMode mode = cells.empty() ? RefinementMode::uniform : cells.front().key.mode;
  for (const auto& cell : cells) {
    if (cell.key.mode != mode) throw std::invalid_argument("write_csv: cells mix refinement modes");
  }
  const auto cols = csv_columns(mode);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& cell : cells) {
    const auto& r = cell.report;
    out << "# cell problem=" << cell.key.problem << " mode=" << mode_name(cell.key.mode)
        << " gtol=" << fmt(cell.key.gtol) << " n0=" << cell.key.initial_unknowns;
    if (cell.key.c_alpha) out << " c_alpha=" << fmt(*cell.key.c_alpha);
    out << " verdict=" << verdict_name(r.verdict) << " reruns=" << r.reruns;
    if (r.accepted_row) out << " accepted=" << *r.accepted_row;
    out << '\n';
    for (const auto& row : r.rows) {
      out << fmt(row.tol) << ',';
      if (mode == RefinementMode::adaptive) out << fmt(row.tol_alpha) << ',';
      out << row.unknowns << ',' << fmt(row.tol_m) << ',' << fmt(row.norm_total_est) << ','
          << fmt(row.norm_time_est) << ',' << fmt(row.norm_space_est) << ',' << fmt(row.theta_est)
          << ',' << fmt(row.theta_ctr) << ',' << fmt(row.q_num) << ','
          << (row.check_run ? "true" : "false") << '\n';
    }
  }
}

std::vector<ReportCell> read_csv(std::istream& in) {
  std::vector<ReportCell> cells;
  std::vector<std::string> header;
  std::string line;
  std::size_t line_no = 0;
  auto opt = [&](const std::string& s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    try {
      return std::stod(s);
    } catch (const std::exception&) {
      throw StructuralError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream words(line.substr(1));
      std::string word;
      words >> word;
      if (word != "cell") continue;  // free comment
      ReportCell cell;
      while (words >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos) continue;
        const auto k = word.substr(0, eq);
        const auto v = word.substr(eq + 1);
        if (k == "problem") cell.key.problem = v;
        else if (k == "mode") cell.key.mode = v == "adaptive" ? RefinementMode::adaptive : RefinementMode::uniform;
        else if (k == "gtol") cell.key.gtol = std::stod(v);
        else if (k == "n0") cell.key.initial_unknowns = std::stoul(v);
        else if (k == "c_alpha") cell.key.c_alpha = std::stod(v);
        else if (k == "verdict") {
          cell.report.verdict = v == "converged"       ? Verdict::converged
                                : v == "not_converged" ? Verdict::not_converged
                                                       : Verdict::failed;
        } else if (k == "reruns") cell.report.reruns = std::stoul(v);
        else if (k == "accepted") cell.report.accepted_row = std::stoul(v);
      }
      cell.report.problem = cell.key.problem;
      cell.report.mode = cell.key.mode;
      cell.report.gtol = cell.key.gtol;
      cell.report.initial_unknowns = cell.key.initial_unknowns;
      cells.push_back(std::move(cell));
      continue;
    }
    const auto fields = split(line, ',');
    if (header.empty()) {
      header = fields;
      if (header != csv_columns(RefinementMode::uniform) &&
          header != csv_columns(RefinementMode::adaptive)) {
        throw StructuralError("unexpected CSV columns on line " + std::to_string(line_no));
      }
      continue;
    }
    if (fields == header) continue;  // concatenated reports repeat the header
    if (fields.size() != header.size()) {
      throw StructuralError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields");
    }
    if (cells.empty()) {
      throw StructuralError("line " + std::to_string(line_no) + ": row outside a '# cell' block");
    }
    const bool adaptive = header.size() == csv_columns(RefinementMode::adaptive).size();
    std::size_t c = 0;
    ReportRow row;
    row.tol = opt(fields[c++]).value_or(0.0);
    if (adaptive) row.tol_alpha = opt(fields[c++]);
    row.unknowns = static_cast<std::size_t>(opt(fields[c++]).value_or(0.0));
    row.tol_m = opt(fields[c++]).value_or(0.0);
    row.norm_total_est = opt(fields[c++]).value_or(0.0);
    row.norm_time_est = opt(fields[c++]).value_or(0.0);
    row.norm_space_est = opt(fields[c++]).value_or(0.0);
    row.theta_est = opt(fields[c++]);
    row.theta_ctr = opt(fields[c++]);
    row.q_num = opt(fields[c++]);
    row.check_run = fields[c] == "true" || fields[c] == "1";
    cells.back().report.rows.push_back(row);
  }
  if (header.empty() && !cells.empty()) throw StructuralError("CSV header missing");
  return cells;
}

std::vector<ReportCell> read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_csv(in);
}

void write_summary(std::ostream& out, const std::vector<ReportCell>& cells) {
  auto sci = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return std::string(buf);
  };
  auto fixed = [](const std::optional<double>& v) {
    if (!v) return std::string("      ");
    char buf[16];
    std::snprintf(buf, sizeof buf, "%6.2f", *v);
    return std::string(buf);
  };
  for (const auto& cell : cells) {
    const auto& r = cell.report;
    const bool adaptive = cell.key.mode == RefinementMode::adaptive;
    out << r.problem << "  " << mode_name(cell.key.mode) << "  GTol=" << sci(cell.key.gtol)
        << "  N0=" << cell.key.initial_unknowns;
    if (cell.key.c_alpha) out << "  C_alpha=" << sci(*cell.key.c_alpha);
    out << "  [" << verdict_name(r.verdict) << "]";
    if (!r.message.empty()) out << "  " << r.message;
    out << '\n';
    out << "     Tol  ";
    if (adaptive) out << "Tolalpha  ";
    out << (adaptive ? "   N_M" : "     N") << "     TolM    ||E~||    ||e~||  ||eta~||  ThEst  ThCtr   qnum\n";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      const auto& row = r.rows[i];
      if (row.check_run) out << "  - - - - - - - - - - - - - - - - - - - - - - - - - - - - - - -\n";
      out << sci(row.tol) << "  ";
      if (adaptive) out << (row.tol_alpha ? sci(*row.tol_alpha) : std::string(8, ' ')) << "  ";
      out << std::setw(6) << row.unknowns << "  " << sci(row.tol_m) << "  " << sci(row.norm_total_est)
          << "  " << sci(row.norm_time_est) << "  " << sci(row.norm_space_est) << "  "
          << fixed(row.theta_est) << " " << fixed(row.theta_ctr) << " " << fixed(row.q_num);
      if (r.accepted_row && *r.accepted_row == i) out << "  *";
      out << '\n';
    }
    out << '\n';
  }
}

bool CompareResult::pass() const {
  return std::all_of(cells.begin(), cells.end(), [](const CellDiff& d) { return d.pass; });
}

CompareResult compare_to_golden(const std::vector<ReportCell>& report,
                                const std::vector<ReportCell>& golden,
                                const CompareTolerances& tol) {
  CompareResult result;
  for (const auto& g : golden) {
    CellDiff diff;
    diff.key = g.key;
    const auto it = std::find_if(report.begin(), report.end(),
                                 [&](const ReportCell& r) { return r.key.matches(g.key); });
    if (it == report.end()) {
      diff.pass = false;
      diff.messages.push_back("cell missing from report");
      result.cells.push_back(std::move(diff));
      continue;
    }
    const auto& rows = it->report.rows;
    const auto& gold = g.report.rows;
    if (rows.size() != gold.size()) {
      diff.pass = false;
      diff.messages.push_back("row count " + std::to_string(rows.size()) + " vs golden " +
                              std::to_string(gold.size()));
    }
    const std::size_t n = std::min(rows.size(), gold.size());
    auto check = [&](std::size_t r, const char* name, double got, double want, double allowed,
                     bool relative, double slack = 0.0) {
      const double gap = std::abs(got - want);
      bool ok = gap <= slack;
      if (!(relative && want == 0.0)) {
        ok = ok || (relative ? gap / std::abs(want) : gap) <= allowed + 1e-12;
      }
      if (!ok) {
        diff.pass = false;
        std::ostringstream msg;
        msg << "row " << r << ' ' << name << ": " << got << " vs golden " << want;
        diff.messages.push_back(msg.str());
      }
    };
    auto check_opt = [&](std::size_t r, const char* name, const std::optional<double>& got,
                         const std::optional<double>& want, double allowed, bool relative,
                         double slack = 0.0) {
      if (!want) return;
      if (!got) {
        diff.pass = false;
        diff.messages.push_back("row " + std::to_string(r) + ' ' + name + ": missing");
        return;
      }
      check(r, name, *got, *want, allowed, relative, slack);
    };
    for (std::size_t r = 0; r < n; ++r) {
      const auto& a = rows[r];
      const auto& b = gold[r];
      if (a.check_run != b.check_run) {
        diff.pass = false;
        diff.messages.push_back("row " + std::to_string(r) + " check_run flag differs");
      }
      if (b.tol > 0.0) check(r, "Tol", a.tol, b.tol, tol.tol, true);
      check_opt(r, "Tolalpha", a.tol_alpha, b.tol_alpha, tol.tol, true);
      if (b.unknowns > 0) check(r, "N", static_cast<double>(a.unknowns), static_cast<double>(b.unknowns), tol.unknowns, true);
      if (b.tol_m > 0.0) check(r, "TolM", a.tol_m, b.tol_m, tol.tol_m, true);
      if (b.norm_total_est > 0.0) check(r, "normEtilde", a.norm_total_est, b.norm_total_est, tol.norms, true);
      if (b.norm_time_est > 0.0) check(r, "normetilde", a.norm_time_est, b.norm_time_est, tol.norms, true);
      if (b.norm_space_est > 0.0) check(r, "normetatilde", a.norm_space_est, b.norm_space_est, tol.norms, true);
      // Ratios are tabulated with two decimals, so they are only known to 0.005.
      check_opt(r, "ThetaEst", a.theta_est, b.theta_est, tol.theta_est_abs, false, 0.005);
      check_opt(r, "ThetaCtr", a.theta_ctr, b.theta_ctr, tol.theta_ctr, true, 0.005);
      check_opt(r, "qnum", a.q_num, b.q_num, tol.q_num_abs, false, 0.005);
    }
    result.cells.push_back(std::move(diff));
  }
  return result;
}

void write_compare(std::ostream& out, const CompareResult& result) {
  std::size_t failed = 0;
  for (const auto& d : result.cells) {
    out << (d.pass ? "PASS " : "FAIL ") << d.key.problem << ' ' << mode_name(d.key.mode)
        << " gtol=" << fmt(d.key.gtol) << " n0=" << d.key.initial_unknowns << '\n';
    for (const auto& m : d.messages) out << "    " << m << '\n';
    if (!d.pass) ++failed;
  }
  out << result.cells.size() - failed << '/' << result.cells.size() << " cells match\n";
}

}  // namespace molgec
