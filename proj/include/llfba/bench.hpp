#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "llfba/benders.hpp"
#include "llfba/formulations.hpp"
#include "llfba/solver/backend.hpp"

namespace llfba::bench {

/// One method column of the experiment grid. Parsed from strings like
/// "fba", "bigm", "hull", "indicator", "nogood",
/// "benders:master=bigm,pct=0.5,strategy=ksmallest,k=3".
struct MethodSpec {
  std::string name = "bigm";  // fba | bigm | indicator | hull | benders | nogood
  benders::MasterFormulation master = benders::MasterFormulation::BigM;
  double pct = 0.0;
  benders::CutStrategy strategy = benders::CutStrategy::Distinct;
  int k_smallest = 1;
  double density_limit = 1.0;
  double epsilon = 1.0;
  std::optional<double> big_m;
  std::optional<std::string> enzyme_data_path;

  std::string label() const;
  static MethodSpec parse(const std::string& text);  // throws ParseError
};

using Report = benders::SolveReport;

/// Runs every (instance, method) cell; per-cell failures become status rows
/// and never abort the grid.
std::vector<Report> run_benchmark(const std::vector<std::string>& instances,
                                  const std::vector<MethodSpec>& methods,
                                  const solver::SolveSettings& settings,
                                  const solver::Backend& backend);

void write_report_csv(const std::vector<Report>& rows, std::ostream& out);
std::vector<Report> read_report_csv(std::istream& in);  // throws ParseError

struct MethodSummary {
  std::string method;
  int instances = 0;
  double pct_solved = 0.0;
  // Shifted geometric mean (shift 1s); unsolved rows counted at the limit.
  double geomean_all = 0.0;
  // Plain shifted geomean over solved rows only; 0 when none solved.
  double geomean_solved = 0.0;
};

struct BucketSummary {
  std::string bucket;  // by fastest-method runtime, Table-1 row scheme
  std::vector<MethodSummary> methods;
};

struct AggregateResult {
  double time_limit_s = 1800.0;
  double shift_s = 1.0;
  std::vector<MethodSummary> overall;
  std::vector<BucketSummary> buckets;
};

AggregateResult aggregate(const std::vector<Report>& rows, double time_limit_s);
void write_aggregate(const AggregateResult& result, std::ostream& out);

struct ProfilePoint {
  std::string method;
  double time_s = 0.0;
  int solved = 0;
};

/// Cumulative solved-instances-by-time series per method; methods with zero
/// solves contribute a single flat point at time 0.
std::vector<ProfilePoint> make_performance_profile(const std::vector<Report>& rows);
void write_profile(const std::vector<ProfilePoint>& points, std::ostream& out);

struct Grid {
  std::vector<std::string> instances;
  std::vector<MethodSpec> methods;
  solver::SolveSettings settings;
};

/// TOML-style key/value grid file: repeated `instance = path` and
/// `method = spec` lines plus scalar settings (time_limit, seed, epsilon...).
Grid load_grid(const std::string& path);

}  // namespace llfba::bench
