#include "qoscompose/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qoscompose/rng.hpp"

namespace qoscompose {

using nlohmann::json;

EmptyGroup::EmptyGroup(const std::string& group_name)
    : std::runtime_error("group '" + group_name + "' has no values"), name(group_name) {}

SummaryStats summarize_stats(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("summarize_stats needs at least one value");

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  double sum = 0.0;
  for (const double v : sorted) sum += v;
  const double mean = sum / static_cast<double>(n);

  double ss = 0.0;
  for (const double v : sorted) ss += (v - mean) * (v - mean);
  const double std_dev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;

  // Type-7 quantile: h = (n-1)p, linear interpolation between order statistics.
  const auto quantile = [&](double p) {
    const double h = static_cast<double>(n - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - std::floor(h);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
  };

  return {n, mean, std_dev, sorted.front(), quantile(0.25), quantile(0.5), quantile(0.75),
          sorted.back()};
}

namespace {

std::string format_fixed6(double v) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string sanitize_field(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  return s;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return std::move(out).str();
}

ColumnRef column_ref_from_json(const json& j) {
  if (j.is_number_unsigned() || j.is_number_integer()) {
    return ColumnRef{static_cast<std::size_t>(j.get<std::uint64_t>())};
  }
  return ColumnRef{j.get<std::string>()};
}

void apply_sfga_overrides(SfgaConfig& config, const json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "population") config.population_size = value.get<int>();
    else if (key == "generations") config.generations = value.get<int>();
    else if (key == "memeplexes") config.memeplex_count = value.get<int>();
    else if (key == "mutation_fraction") config.mutation_fraction = value.get<double>();
    else if (key == "stall_limit") config.stall_limit = value.get<int>();
    else throw ParseError(0, "unknown sfga override key: " + key);
  }
}

void apply_baseline_overrides(BaselineConfig& config, const json& j, const std::string& tag) {
  for (const auto& [key, value] : j.items()) {
    if (key == "population") config.population_size = value.get<int>();
    else if (key == "generations") config.generations = value.get<int>();
    else if (key == "crossover_rate") config.crossover_rate = value.get<double>();
    else if (key == "mutation_rate") config.mutation_rate = value.get<double>();
    else if (key == "tournament_size") config.tournament_size = value.get<int>();
    else if (key == "inertia") config.inertia = value.get<double>();
    else if (key == "cognitive") config.cognitive = value.get<double>();
    else if (key == "social") config.social = value.get<double>();
    else if (key == "acceptance_fraction") config.acceptance_fraction = value.get<double>();
    else throw ParseError(0, "unknown " + tag + " override key: " + key);
  }
}

bool known_algorithm(const std::string& tag) {
  return tag == "sfga" || tag == "ga" || tag == "pso" || tag == "ca" || tag == "gapso";
}

}  // namespace

ScenarioSpec read_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.byte, e.what());
  }

  try {
    if (!doc.is_object() || !doc.contains("schema") || !doc["schema"].is_string()) {
      throw SchemaVersionMismatch("missing schema tag");
    }
    if (doc["schema"].get<std::string>() != kScenarioSchema) {
      throw SchemaVersionMismatch("unsupported schema '" + doc["schema"].get<std::string>() +
                                  "', expected '" + std::string(kScenarioSchema) + "'");
    }

    ScenarioSpec spec;
    spec.name = doc.value("name", std::string{"scenario"});
    spec.task_count = doc.value("task_count", 11);
    spec.levels = doc.at("levels").get<std::vector<int>>();
    spec.algorithms = doc.at("algorithms").get<std::vector<std::string>>();
    spec.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    spec.population = doc.value("population", 50);
    spec.generations = doc.value("generations", 100);
    spec.equal_evaluation_budget = doc.value("equal_evaluation_budget", true);
    if (doc.contains("weights")) {
      const auto w = doc["weights"].get<std::vector<double>>();
      if (w.size() != 3) throw ParseError(0, "weights must have exactly 3 entries");
      std::copy(w.begin(), w.end(), spec.weights.begin());
    }
    if (doc.contains("shape")) {
      spec.shape = parse_workflow_shape(doc["shape"].get<std::string>());
    }

    if (doc.contains("source")) {
      const json& src = doc["source"];
      const std::string type = src.value("type", std::string{"synthetic"});
      if (type == "synthetic") {
        spec.source.kind = InstanceSource::Kind::Synthetic;
        const auto range = [&](const char* key, AttributeRange fallback) {
          if (!src.contains(key)) return fallback;
          const auto v = src[key].get<std::vector<double>>();
          if (v.size() != 2) throw ParseError(0, std::string(key) + " range needs [lo, hi]");
          return AttributeRange{v[0], v[1]};
        };
        spec.source.synthetic.response_time = range("response_time", spec.source.synthetic.response_time);
        spec.source.synthetic.energy = range("energy", spec.source.synthetic.energy);
        spec.source.synthetic.cost = range("cost", spec.source.synthetic.cost);
      } else if (type == "csv") {
        spec.source.kind = InstanceSource::Kind::Csv;
        spec.source.csv_path = src.at("path").get<std::string>();
        spec.source.csv_has_header = src.value("has_header", true);
        if (src.contains("columns")) {
          const json& cols = src["columns"];
          if (cols.contains("response_time")) spec.source.columns.response_time = column_ref_from_json(cols["response_time"]);
          if (cols.contains("energy")) spec.source.columns.energy = column_ref_from_json(cols["energy"]);
          if (cols.contains("cost")) spec.source.columns.cost = column_ref_from_json(cols["cost"]);
          if (cols.contains("id")) spec.source.columns.service_id = column_ref_from_json(cols["id"]);
        }
      } else {
        throw ParseError(0, "unknown source type: " + type);
      }
    }

    spec.sfga.population_size = spec.population;
    spec.sfga.generations = spec.generations;
    for (BaselineConfig* cfg : {&spec.ga, &spec.pso, &spec.ca, &spec.gapso}) {
      cfg->population_size = spec.population;
      cfg->generations = spec.generations;
    }

    if (doc.contains("overrides")) {
      for (const auto& [tag, body] : doc["overrides"].items()) {
        if (tag == "sfga") apply_sfga_overrides(spec.sfga, body);
        else if (tag == "ga") apply_baseline_overrides(spec.ga, body, tag);
        else if (tag == "pso") apply_baseline_overrides(spec.pso, body, tag);
        else if (tag == "ca") apply_baseline_overrides(spec.ca, body, tag);
        else if (tag == "gapso") apply_baseline_overrides(spec.gapso, body, tag);
        else throw ParseError(0, "unknown override section: " + tag);
      }
    }

    if (spec.levels.empty()) throw ParseError(0, "levels must be non-empty");
    for (const int level : spec.levels) {
      if (level < 1) throw ParseError(0, "levels must be positive");
    }
    if (spec.algorithms.empty()) throw ParseError(0, "algorithms must be non-empty");
    for (const std::string& tag : spec.algorithms) {
      if (!known_algorithm(tag)) throw ParseError(0, "unknown algorithm tag: " + tag);
    }
    if (spec.seeds.empty()) throw ParseError(0, "seeds must be non-empty");
    if (spec.task_count < 1) throw ParseError(0, "task_count must be positive");
    if (spec.population < 1 || spec.generations < 1) {
      throw ParseError(0, "population and generations must be positive");
    }
    return spec;
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  return read_scenario(read_file(path));
}

namespace {

struct Cell {
  int level = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
};

// In budget mode the generation knob is only a backstop; the evaluation
// budget (population x generations) is what actually terminates the run.
constexpr int kBudgetGenerationHeadroom = 8;

RunRecord run_cell(const ScenarioSpec& spec, const Cell& cell, const ServicePool* csv_pool) {
  const std::uint64_t instance_seed = mix64(cell.seed ^ mix64(static_cast<std::uint64_t>(cell.level)));

  ServicePool synthetic_pool;
  const ServicePool* pool = csv_pool;
  if (spec.source.kind == InstanceSource::Kind::Synthetic) {
    SyntheticSpec synth = spec.source.synthetic;
    synth.size = static_cast<std::size_t>(spec.task_count) * static_cast<std::size_t>(cell.level);
    synth.seed = instance_seed;
    synthetic_pool = generate_synthetic_pool(synth);
    pool = &synthetic_pool;
  }

  const CompositionProblem problem = sample_instance(
      *pool, spec.task_count, cell.level, spec.shape, spec.weights, mix64(instance_seed));

  const std::string label =
      spec.name + "/L" + std::to_string(cell.level) + "/s" + std::to_string(cell.seed);
  const std::uint64_t budget =
      spec.equal_evaluation_budget
          ? static_cast<std::uint64_t>(spec.population) * static_cast<std::uint64_t>(spec.generations)
          : 0;

  RunRecord record;
  if (cell.algorithm == "sfga") {
    SfgaConfig config = spec.sfga;
    config.seed = cell.seed;
    config.max_evaluations = budget;
    if (budget != 0) config.generations = spec.generations * kBudgetGenerationHeadroom;
    record = run_sfga(problem, config, label);
  } else {
    BaselineConfig config;
    if (cell.algorithm == "ga") {
      config = spec.ga;
      config.algorithm = BaselineAlgorithm::Ga;
    } else if (cell.algorithm == "pso") {
      config = spec.pso;
      config.algorithm = BaselineAlgorithm::Pso;
    } else if (cell.algorithm == "ca") {
      config = spec.ca;
      config.algorithm = BaselineAlgorithm::Ca;
    } else if (cell.algorithm == "gapso") {
      config = spec.gapso;
      config.algorithm = BaselineAlgorithm::Gapso;
    } else {
      throw ConfigInvalid("unknown algorithm tag: " + cell.algorithm);
    }
    config.seed = cell.seed;
    config.max_evaluations = budget;
    if (budget != 0) config.generations = spec.generations * kBudgetGenerationHeadroom;
    record = run_baseline(problem, config, label);
  }
  record.level = cell.level;
  return record;
}

}  // namespace

std::vector<RunRecord> run_scenario(const ScenarioSpec& spec, int workers) {
  std::vector<int> levels = spec.levels;
  std::sort(levels.begin(), levels.end());
  std::vector<std::string> algorithms = spec.algorithms;
  std::sort(algorithms.begin(), algorithms.end());
  std::vector<std::uint64_t> seeds = spec.seeds;
  std::sort(seeds.begin(), seeds.end());

  std::vector<Cell> cells;
  cells.reserve(levels.size() * algorithms.size() * seeds.size());
  for (const int level : levels) {
    for (const std::string& algorithm : algorithms) {
      for (const std::uint64_t seed : seeds) {
        cells.push_back({level, algorithm, seed});
      }
    }
  }

  ServicePool csv_pool;
  const ServicePool* shared_pool = nullptr;
  if (spec.source.kind == InstanceSource::Kind::Csv) {
    csv_pool = load_service_pool_csv(spec.source.csv_path, spec.source.columns,
                                     spec.source.csv_has_header);
    shared_pool = &csv_pool;
  }

  std::vector<RunRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        records[i] = run_cell(spec, cells[i], shared_pool);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) {
          first_error = std::make_exception_ptr(std::runtime_error(
              "scenario cell (level=" + std::to_string(cells[i].level) + ", algorithm=" +
              cells[i].algorithm + ", seed=" + std::to_string(cells[i].seed) + "): " + e.what()));
        }
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) threads.emplace_back(work);
    for (std::thread& thread : threads) thread.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return records;
}

std::string emit_results_csv(std::span<const RunRecord> records, bool include_timing) {
  std::string out{kRecordsCsvHeader};
  out += '\n';
  for (const RunRecord& r : records) {
    out += sanitize_field(r.algorithm);
    out += ',';
    out += sanitize_field(r.instance);
    out += ',';
    out += std::to_string(r.level);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += format_fixed6(r.best_fitness);
    out += ',';
    out += format_fixed6(r.best_aggregate.response_time);
    out += ',';
    out += format_fixed6(r.best_aggregate.energy);
    out += ',';
    out += format_fixed6(r.best_aggregate.cost);
    out += ',';
    out += std::to_string(r.evaluation_count);
    out += ',';
    out += format_fixed6(include_timing ? r.wall_time_s : 0.0);
    out += '\n';
  }
  return out;
}

namespace {

double parse_csv_real(std::string_view text, std::size_t row, std::size_t column) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw BadNumber(row, column, std::string(text));
  }
  return value;
}

std::uint64_t parse_csv_u64(std::string_view text, std::size_t row, std::size_t column) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw BadNumber(row, column, std::string(text));
  }
  return value;
}

}  // namespace

std::vector<RunRecord> parse_records_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    std::string_view line =
        nl == std::string_view::npos ? text.substr(start) : text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  if (lines.empty() || lines[0] != kRecordsCsvHeader) {
    throw ParseError(0, "records CSV header mismatch");
  }

  std::vector<RunRecord> records;
  records.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string_view> fields;
    std::size_t field_start = 0;
    const std::string_view line = lines[i];
    while (true) {
      const std::size_t comma = line.find(',', field_start);
      if (comma == std::string_view::npos) {
        fields.push_back(line.substr(field_start));
        break;
      }
      fields.push_back(line.substr(field_start, comma - field_start));
      field_start = comma + 1;
    }
    if (fields.size() != 10) throw ParseError(i, "expected 10 fields, got " + std::to_string(fields.size()));

    RunRecord r;
    r.algorithm = std::string(fields[0]);
    r.instance = std::string(fields[1]);
    r.level = static_cast<int>(parse_csv_u64(fields[2], i, 2));
    r.seed = parse_csv_u64(fields[3], i, 3);
    r.best_fitness = parse_csv_real(fields[4], i, 4);
    r.best_aggregate.response_time = parse_csv_real(fields[5], i, 5);
    r.best_aggregate.energy = parse_csv_real(fields[6], i, 6);
    r.best_aggregate.cost = parse_csv_real(fields[7], i, 7);
    r.evaluation_count = parse_csv_u64(fields[8], i, 8);
    r.wall_time_s = parse_csv_real(fields[9], i, 9);
    records.push_back(std::move(r));
  }
  return records;
}

Metric parse_metric(std::string_view name) {
  if (name == "best_fitness" || name == "fitness") return Metric::BestFitness;
  if (name == "agg_response_time" || name == "response_time") return Metric::AggResponseTime;
  if (name == "agg_energy" || name == "energy") return Metric::AggEnergy;
  if (name == "agg_cost" || name == "cost") return Metric::AggCost;
  if (name == "wall_time" || name == "wall_time_s") return Metric::WallTime;
  throw ConfigInvalid("unknown metric: " + std::string(name));
}

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::BestFitness: return "best_fitness";
    case Metric::AggResponseTime: return "agg_response_time";
    case Metric::AggEnergy: return "agg_energy";
    case Metric::AggCost: return "agg_cost";
    case Metric::WallTime: return "wall_time_s";
  }
  return "unknown";
}

double metric_value(const RunRecord& record, Metric metric) {
  switch (metric) {
    case Metric::BestFitness: return record.best_fitness;
    case Metric::AggResponseTime: return record.best_aggregate.response_time;
    case Metric::AggEnergy: return record.best_aggregate.energy;
    case Metric::AggCost: return record.best_aggregate.cost;
    case Metric::WallTime: return record.wall_time_s;
  }
  return 0.0;
}

std::string emit_boxplot_data(const std::map<std::string, std::vector<double>>& groups) {
  std::string out = "group,count,min,q1,median,q3,max,mean,std\n";
  for (const auto& [name, values] : groups) {
    if (values.empty()) throw EmptyGroup(name);
    const SummaryStats s = summarize_stats(values);
    out += sanitize_field(name);
    out += ',';
    out += std::to_string(s.count);
    out += ',';
    out += format_fixed6(s.min);
    out += ',';
    out += format_fixed6(s.q1);
    out += ',';
    out += format_fixed6(s.median);
    out += ',';
    out += format_fixed6(s.q3);
    out += ',';
    out += format_fixed6(s.max);
    out += ',';
    out += format_fixed6(s.mean);
    out += ',';
    out += format_fixed6(s.std_dev);
    out += '\n';
  }
  return out;
}

std::string emit_boxplot_data(std::span<const RunRecord> records, Metric metric) {
  std::map<std::string, std::vector<double>> groups;
  for (const RunRecord& r : records) {
    groups[r.algorithm].push_back(metric_value(r, metric));
  }
  return emit_boxplot_data(groups);
}

}  // namespace qoscompose
