#include "llfba/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "llfba/errors.hpp"
#include "llfba/model_io.hpp"

namespace llfba::bench {

namespace {

using Clock = std::chrono::steady_clock;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::istringstream stream(s);
  std::string part;
  while (std::getline(stream, part, sep)) parts.push_back(part);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

benders::MasterFormulation parse_master(const std::string& text) {
  if (text == "bigm") return benders::MasterFormulation::BigM;
  if (text == "indicator") return benders::MasterFormulation::Indicator;
  if (text == "both") return benders::MasterFormulation::Both;
  throw ParseError("unknown master formulation: " + text);
}

benders::CutStrategy parse_strategy(const std::string& text) {
  if (text == "all") return benders::CutStrategy::All;
  if (text == "distinct") return benders::CutStrategy::Distinct;
  if (text == "ksmallest") return benders::CutStrategy::KSmallest;
  if (text == "density") return benders::CutStrategy::DensityLimit;
  throw ParseError("unknown cut strategy: " + text);
}

std::string format_double(double x) {
  std::ostringstream out;
  out.precision(12);
  out << x;
  return out.str();
}

/// Aggregation key: distinguishes benders/nogood parameterizations.
std::string row_key(const Report& row) {
  if (row.method == "benders") {
    return row.method + ":" + row.formulation + ",pct=" + format_double(row.pct) +
           ",strategy=" + row.strategy;
  }
  if (row.method == "nogood") return row.method + ":" + row.formulation;
  return row.method;
}

double shifted_geomean(const std::vector<double>& times, double shift) {
  if (times.empty()) return 0.0;
  double log_sum = 0.0;
  for (double t : times) log_sum += std::log(t + shift);
  return std::exp(log_sum / static_cast<double>(times.size())) - shift;
}

}  // namespace

std::string MethodSpec::label() const {
  std::string out = name;
  if (name == "benders") {
    out += ":master=" + benders::to_string(master) + ",pct=" + format_double(pct) +
           ",strategy=" + benders::to_string(strategy);
  } else if (name == "nogood") {
    out += ":master=" + benders::to_string(master);
  }
  if (enzyme_data_path) out += "+enz";
  return out;
}

MethodSpec MethodSpec::parse(const std::string& text) {
  MethodSpec spec;
  const auto colon = text.find(':');
  spec.name = trim(text.substr(0, colon));
  static const std::vector<std::string> known = {"fba",  "bigm",    "indicator",
                                                 "hull", "benders", "nogood"};
  if (std::find(known.begin(), known.end(), spec.name) == known.end()) {
    throw ParseError("unknown method: " + spec.name);
  }
  if (colon == std::string::npos) return spec;
  for (const auto& option : split(text.substr(colon + 1), ',')) {
    const auto eq = option.find('=');
    if (eq == std::string::npos) throw ParseError("malformed method option: " + option);
    const std::string key = trim(option.substr(0, eq));
    const std::string value = trim(option.substr(eq + 1));
    try {
      if (key == "master") {
        spec.master = parse_master(value);
      } else if (key == "pct") {
        spec.pct = std::stod(value);
      } else if (key == "strategy") {
        spec.strategy = parse_strategy(value);
      } else if (key == "k") {
        spec.k_smallest = std::stoi(value);
      } else if (key == "density") {
        spec.density_limit = std::stod(value);
      } else if (key == "epsilon") {
        spec.epsilon = std::stod(value);
      } else if (key == "bigm") {
        spec.big_m = std::stod(value);
      } else if (key == "enzyme") {
        spec.enzyme_data_path = value;
      } else {
        throw ParseError("unknown method option: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw ParseError("bad value for method option " + key + ": " + value);
    }
  }
  return spec;
}

namespace {

Report run_cell(const std::string& instance, const MetabolicModel& model,
                const MethodSpec& spec, const solver::SolveSettings& settings,
                const solver::Backend& backend) {
  Report row;
  row.instance = instance;
  row.method = spec.name;
  const auto start = Clock::now();
  auto stop = [&]() {
    row.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  };

  if (spec.name == "benders" || spec.name == "nogood") {
    benders::BendersConfig config;
    config.master_formulation = spec.master;
    config.cuts_per_iter_pct = spec.pct;
    config.cut_strategy = spec.strategy;
    config.k_smallest = spec.k_smallest;
    config.density_limit = spec.density_limit;
    config.no_good_only = spec.name == "nogood";
    config.epsilon = spec.epsilon;
    config.big_m = spec.big_m;
    benders::BendersResult result;
    if (spec.enzyme_data_path) {
      auto split = enzyme::split_reversible(model);
      auto data = enzyme::load_enzyme_data(*spec.enzyme_data_path);
      result = benders::solve_llfba_benders(enzyme::build_enzyme_model(split, data), config,
                                            backend, settings);
    } else {
      result = benders::solve_llfba_benders(model, config, backend, settings);
    }
    row = result.report;
    row.instance = instance;
    stop();
    return row;
  }

  row.formulation = spec.name;
  FluxSolution solution;
  if (spec.enzyme_data_path) {
    auto split = enzyme::split_reversible(model);
    auto data = enzyme::load_enzyme_data(*spec.enzyme_data_path);
    auto enz = enzyme::build_enzyme_model(split, data);
    if (spec.name == "fba") {
      solution = solve_enzyme_fba(enz, backend, settings).flux;
    } else {
      LooplessConfig config;
      config.epsilon = spec.epsilon;
      config.big_m = spec.big_m;
      config.formulation = spec.name == "hull" ? LooplessFormulation::Hull
                           : spec.name == "indicator" ? LooplessFormulation::Indicator
                                                      : LooplessFormulation::BigM;
      auto problem = build_llfba_problem(enz.base, config, backend.supports_indicators());
      append_enzyme_rows(problem, enz, nullptr);
      auto res = backend.solve(problem, settings);
      solution.status = res.status;
      if (res.status == SolveStatus::Optimal) {
        solution.v = Vec::Zero(enz.base.num_reactions());
        for (int j = 0; j < enz.base.num_reactions(); ++j) solution.v[j] = res.primal[j];
        solution.objective_value = res.objective;
      }
    }
  } else if (spec.name == "fba") {
    solution = solve_fba(model, backend, settings);
  } else {
    LooplessConfig config;
    config.epsilon = spec.epsilon;
    config.big_m = spec.big_m;
    config.formulation = spec.name == "hull" ? LooplessFormulation::Hull
                         : spec.name == "indicator" ? LooplessFormulation::Indicator
                                                    : LooplessFormulation::BigM;
    solution = solve_llfba(model, config, backend, settings);
  }
  row.status = solution.status;
  row.objective = solution.objective_value;
  row.iterations = 1;
  stop();
  return row;
}

}  // namespace

std::vector<Report> run_benchmark(const std::vector<std::string>& instances,
                                  const std::vector<MethodSpec>& methods,
                                  const solver::SolveSettings& settings,
                                  const solver::Backend& backend) {
  std::vector<Report> rows;
  for (const auto& instance : instances) {
    MetabolicModel model;
    bool loaded = false;
    try {
      model = io::load_model(instance);
      loaded = true;
    } catch (const std::exception& e) {
      std::cerr << "skipping " << instance << ": " << e.what() << "\n";
    }
    for (const auto& spec : methods) {
      Report row;
      row.instance = instance;
      row.method = spec.name;
      row.status = SolveStatus::NumericalError;
      if (loaded) {
        try {
          row = run_cell(instance, model, spec, settings, backend);
        } catch (const std::exception& e) {
          std::cerr << instance << " / " << spec.label() << " failed: " << e.what() << "\n";
          row.status = SolveStatus::NumericalError;
          row.wall_time_s = settings.time_limit_s;
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_report_csv(const std::vector<Report>& rows, std::ostream& out) {
  out << Report::csv_header() << "\n";
  for (const auto& row : rows) out << row.csv_row() << "\n";
}

std::vector<Report> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty report");
  if (trim(line) != Report::csv_header()) throw ParseError("unexpected report header: " + line);
  std::vector<Report> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split(trim(line), ',');
    if (fields.size() != 10) throw ParseError("malformed report row: " + line);
    Report row;
    row.instance = fields[0];
    row.method = fields[1];
    row.formulation = fields[2];
    try {
      row.pct = std::stod(fields[3]);
      row.strategy = fields[4];
      const auto status = parse_status(fields[5]);
      if (!status) throw ParseError("unknown status: " + fields[5]);
      row.status = *status;
      row.objective = std::stod(fields[6]);
      row.iterations = std::stol(fields[7]);
      row.cuts = std::stol(fields[8]);
      row.wall_time_s = std::stod(fields[9]);
    } catch (const std::invalid_argument&) {
      throw ParseError("malformed report row: " + line);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::vector<MethodSummary> summarize(const std::vector<Report>& rows, double time_limit,
                                     double shift) {
  std::map<std::string, std::vector<const Report*>> by_method;
  for (const auto& row : rows) by_method[row_key(row)].push_back(&row);
  std::vector<MethodSummary> out;
  for (const auto& [key, group] : by_method) {
    MethodSummary summary;
    summary.method = key;
    summary.instances = static_cast<int>(group.size());
    std::vector<double> all_times, solved_times;
    for (const Report* row : group) {
      if (row->status == SolveStatus::Optimal) {
        all_times.push_back(std::min(row->wall_time_s, time_limit));
        solved_times.push_back(row->wall_time_s);
      } else {
        all_times.push_back(time_limit);
      }
    }
    summary.pct_solved =
        100.0 * static_cast<double>(solved_times.size()) / static_cast<double>(group.size());
    summary.geomean_all = shifted_geomean(all_times, shift);
    summary.geomean_solved = shifted_geomean(solved_times, shift);
    out.push_back(std::move(summary));
  }
  return out;
}

}  // namespace

AggregateResult aggregate(const std::vector<Report>& rows, double time_limit_s) {
  AggregateResult result;
  result.time_limit_s = time_limit_s;
  result.overall = summarize(rows, time_limit_s, result.shift_s);

  // Bucket instances by the fastest solved runtime across methods.
  std::map<std::string, double> fastest;
  for (const auto& row : rows) {
    if (row.status != SolveStatus::Optimal) continue;
    auto it = fastest.find(row.instance);
    if (it == fastest.end() || row.wall_time_s < it->second) fastest[row.instance] = row.wall_time_s;
  }
  const std::vector<std::pair<std::string, double>> edges = {
      {"<10s", 10.0}, {"10-60s", 60.0}, {"60-100s", 100.0}, {"100-600s", 600.0}};
  auto bucket_of = [&](const std::string& instance) -> std::string {
    auto it = fastest.find(instance);
    if (it == fastest.end()) return ">600s";
    for (const auto& [label, edge] : edges) {
      if (it->second < edge) return label;
    }
    return ">600s";
  };
  std::map<std::string, std::vector<Report>> per_bucket;
  for (const auto& row : rows) per_bucket[bucket_of(row.instance)].push_back(row);
  const std::vector<std::string> order = {"<10s", "10-60s", "60-100s", "100-600s", ">600s"};
  for (const auto& label : order) {
    auto it = per_bucket.find(label);
    if (it == per_bucket.end()) continue;
    BucketSummary bucket;
    bucket.bucket = label;
    bucket.methods = summarize(it->second, time_limit_s, result.shift_s);
    result.buckets.push_back(std::move(bucket));
  }
  return result;
}

std::string csv_field(const std::string& value) {
  if (value.find(',') == std::string::npos && value.find('"') == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void write_aggregate(const AggregateResult& result, std::ostream& out) {
  out << "# shifted geometric mean, shift_s=" << result.shift_s
      << ", time_limit_s=" << result.time_limit_s << "\n";
  out << "scope,method,instances,pct_solved,geomean_all_s,geomean_solved_s\n";
  auto emit = [&](const std::string& scope, const std::vector<MethodSummary>& methods) {
    for (const auto& m : methods) {
      out << scope << ',' << csv_field(m.method) << ',' << m.instances << ',' << m.pct_solved
          << ',' << m.geomean_all << ',' << m.geomean_solved << "\n";
    }
  };
  emit("overall", result.overall);
  for (const auto& bucket : result.buckets) emit(bucket.bucket, bucket.methods);
}

std::vector<ProfilePoint> make_performance_profile(const std::vector<Report>& rows) {
  std::map<std::string, std::vector<double>> solved_times;
  for (const auto& row : rows) {
    auto& times = solved_times[row_key(row)];
    if (row.status == SolveStatus::Optimal) times.push_back(row.wall_time_s);
  }
  std::vector<ProfilePoint> points;
  for (auto& [method, times] : solved_times) {
    if (times.empty()) {
      points.push_back({method, 0.0, 0});
      continue;
    }
    std::sort(times.begin(), times.end());
    int solved = 0;
    for (double t : times) {
      ++solved;
      points.push_back({method, t, solved});
    }
  }
  return points;
}

void write_profile(const std::vector<ProfilePoint>& points, std::ostream& out) {
  out << "method,time_s,solved\n";
  for (const auto& p : points) {
    out << csv_field(p.method) << ',' << p.time_s << ',' << p.solved << "\n";
  }
}

Grid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open grid file: " + path);
  Grid grid;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = trim(line);
    const auto hash = text.find('#');
    if (hash != std::string::npos) text = trim(text.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ParseError("grid line " + std::to_string(line_no) + " is not key = value");
    }
    const std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    try {
      if (key == "instance") {
        grid.instances.push_back(value);
      } else if (key == "method") {
        grid.methods.push_back(MethodSpec::parse(value));
      } else if (key == "time_limit" || key == "time_limit_s") {
        grid.settings.time_limit_s = std::stod(value);
      } else if (key == "seed") {
        grid.settings.seed = std::stoull(value);
      } else if (key == "feasibility_tol") {
        grid.settings.feasibility_tol = std::stod(value);
      } else if (key == "integrality_tol") {
        grid.settings.integrality_tol = std::stod(value);
      } else if (key == "optimality_gap") {
        grid.settings.optimality_gap = std::stod(value);
      } else {
        throw ParseError("unknown grid key: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw ParseError("bad value on grid line " + std::to_string(line_no) + ": " + value);
    }
  }
  if (grid.instances.empty()) throw ParseError("grid lists no instances");
  if (grid.methods.empty()) throw ParseError("grid lists no methods");
  return grid;
}

}  // namespace llfba::bench
