#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qoscompose/baselines.hpp"
#include "qoscompose/instance_io.hpp"
#include "qoscompose/sfga.hpp"

namespace qoscompose {

inline constexpr std::string_view kScenarioSchema = "qosbench/1";
inline constexpr std::string_view kRecordsCsvHeader =
    "algorithm,instance,level,seed,best_fitness,agg_response_time,agg_energy,agg_cost,"
    "evaluations,wall_time_s";

struct EmptyInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyGroup : std::runtime_error {
  explicit EmptyGroup(const std::string& group_name);
  std::string name;
};

struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // sample (n-1) standard deviation; 0 for singletons
  double min = 0.0;
  double q1 = 0.0;  // type-7 linear-interpolation quantiles
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

SummaryStats summarize_stats(std::span<const double> values);

// Where the per-cell candidate pools come from.
struct InstanceSource {
  enum class Kind { Synthetic, Csv };
  Kind kind = Kind::Synthetic;
  SyntheticSpec synthetic;  // ranges only; size and seed are set per cell
  std::string csv_path;
  ColumnMap columns;
  bool csv_has_header = true;
};

// One experiment: a grid of services-per-task levels x algorithms x seeds.
// Every algorithm in a cell runs with the same evaluation budget
// (population x generations) when equal_evaluation_budget is set, and each
// (level, seed) pair maps to one deterministic instance shared by all
// algorithms, so comparisons are paired.
struct ScenarioSpec {
  std::string name;
  int task_count = 11;
  std::vector<int> levels;
  std::vector<std::string> algorithms;  // sfga | ga | pso | ca | gapso
  std::vector<std::uint64_t> seeds;
  std::array<double, 3> weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  WorkflowShape shape = WorkflowShape::Sequence;
  int population = 50;
  int generations = 100;
  bool equal_evaluation_budget = true;
  SfgaConfig sfga;  // structure knobs; seed/budget filled per cell
  BaselineConfig ga = {BaselineAlgorithm::Ga};
  BaselineConfig pso = {BaselineAlgorithm::Pso};
  BaselineConfig ca = {BaselineAlgorithm::Ca};
  BaselineConfig gapso = {BaselineAlgorithm::Gapso};
  InstanceSource source;
};

ScenarioSpec read_scenario(std::string_view text);
ScenarioSpec load_scenario(const std::filesystem::path& path);

// Runs every (level, algorithm, seed) cell; records come back sorted by
// (level, algorithm tag, seed). Cells are independent jobs executed on up to
// `workers` threads; the result order does not depend on scheduling.
std::vector<RunRecord> run_scenario(const ScenarioSpec& spec, int workers = 1);

// Header plus one row per record, reals at 6 decimal places. With
// include_timing unset the wall-time column is written as zero so output is
// byte-stable across runs.
std::string emit_results_csv(std::span<const RunRecord> records, bool include_timing = true);
std::vector<RunRecord> parse_records_csv(std::string_view text);

enum class Metric { BestFitness, AggResponseTime, AggEnergy, AggCost, WallTime };

Metric parse_metric(std::string_view name);
std::string_view metric_name(Metric metric);
double metric_value(const RunRecord& record, Metric metric);

// Five-number summaries (plus mean/std) per named group, one CSV row each.
std::string emit_boxplot_data(const std::map<std::string, std::vector<double>>& groups);
std::string emit_boxplot_data(std::span<const RunRecord> records, Metric metric);

}  // namespace qoscompose
