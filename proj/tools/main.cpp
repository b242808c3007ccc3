#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qoscompose/baselines.hpp"
#include "qoscompose/bench.hpp"
#include "qoscompose/instance_io.hpp"
#include "qoscompose/sfga.hpp"

namespace qc = qoscompose;
using nlohmann::json;

namespace {

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << text;
}

json record_to_json(const qc::RunRecord& record) {
  return json{{"algorithm", record.algorithm},
              {"instance", record.instance},
              {"level", record.level},
              {"seed", record.seed},
              {"best_genome", record.best_genome.genes},
              {"best_fitness", record.best_fitness},
              {"best_aggregate",
               {{"response_time", record.best_aggregate.response_time},
                {"energy", record.best_aggregate.energy},
                {"cost", record.best_aggregate.cost}}},
              {"trace", record.trace},
              {"evaluations", record.evaluation_count},
              {"wall_time_s", record.wall_time_s}};
}

std::string genome_to_string(const qc::Genome& genome) {
  std::string out;
  for (std::size_t i = 0; i < genome.genes.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(genome.genes[i]);
  }
  return out;
}

void print_record(const qc::RunRecord& record) {
  std::printf("algorithm:      %s\n", record.algorithm.c_str());
  if (!record.instance.empty()) std::printf("instance:       %s\n", record.instance.c_str());
  std::printf("best genome:    [%s]\n", genome_to_string(record.best_genome).c_str());
  std::printf("best fitness:   %.9f\n", record.best_fitness);
  std::printf("response time:  %.6f\n", record.best_aggregate.response_time);
  std::printf("energy:         %.6f\n", record.best_aggregate.energy);
  std::printf("cost:           %.6f\n", record.best_aggregate.cost);
  std::printf("evaluations:    %llu\n", static_cast<unsigned long long>(record.evaluation_count));
  std::printf("wall time:      %.3fs\n", record.wall_time_s);
}

void print_group_table(const std::map<std::string, std::vector<double>>& groups,
                       qc::Metric metric) {
  std::printf("metric: %s\n", std::string(qc::metric_name(metric)).c_str());
  std::printf("%-10s %6s %14s %14s %14s %14s %14s %14s %14s\n", "algorithm", "count", "mean",
              "std", "min", "q1", "median", "q3", "max");
  for (const auto& [name, values] : groups) {
    const qc::SummaryStats s = qc::summarize_stats(values);
    std::printf("%-10s %6zu %14.4f %14.4f %14.4f %14.4f %14.4f %14.4f %14.4f\n", name.c_str(),
                s.count, s.mean, s.std_dev, s.min, s.q1, s.median, s.q3, s.max);
  }
}

std::string summary_csv(const std::vector<qc::RunRecord>& records) {
  std::string out = "metric,algorithm,count,mean,std,min,q1,median,q3,max\n";
  for (const qc::Metric metric :
       {qc::Metric::BestFitness, qc::Metric::AggResponseTime, qc::Metric::AggEnergy,
        qc::Metric::AggCost}) {
    std::map<std::string, std::vector<double>> groups;
    for (const qc::RunRecord& r : records) groups[r.algorithm].push_back(qc::metric_value(r, metric));
    for (const auto& [name, values] : groups) {
      const qc::SummaryStats s = qc::summarize_stats(values);
      char buf[512];
      std::snprintf(buf, sizeof(buf), "%s,%s,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                    std::string(qc::metric_name(metric)).c_str(), name.c_str(), s.count, s.mean,
                    s.std_dev, s.min, s.q1, s.median, s.q3, s.max);
      out += buf;
    }
  }
  return out;
}

std::string summary_by_level_csv(const std::vector<qc::RunRecord>& records) {
  std::string out = "metric,level,algorithm,count,mean,std\n";
  for (const qc::Metric metric : {qc::Metric::BestFitness, qc::Metric::AggEnergy}) {
    std::map<std::pair<int, std::string>, std::vector<double>> groups;
    for (const qc::RunRecord& r : records) {
      groups[{r.level, r.algorithm}].push_back(qc::metric_value(r, metric));
    }
    for (const auto& [key, values] : groups) {
      const qc::SummaryStats s = qc::summarize_stats(values);
      char buf[256];
      std::snprintf(buf, sizeof(buf), "%s,%d,%s,%zu,%.6f,%.6f\n",
                    std::string(qc::metric_name(metric)).c_str(), key.first, key.second.c_str(),
                    s.count, s.mean, s.std_dev);
      out += buf;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QoS-aware service composition: hybrid frog-leaping/genetic optimizer, baselines, "
               "and a benchmark harness"};
  app.require_subcommand(1);
  int exit_code = 0;

  // --- gen ---------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate a synthetic instance (and optionally its pool)");
  struct {
    int tasks = 4;
    int candidates = 3;
    std::uint64_t seed = 0;
    std::string out;
    std::string shape = "sequence";
    std::vector<double> weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    std::string name;
    std::vector<double> rt_range{19.0, 90.0};
    std::vector<double> energy_range{33.0, 147.0};
    std::vector<double> cost_range{28.0, 106.0};
    std::string pool_out;
  } gen_opts;
  gen->add_option("--tasks", gen_opts.tasks, "Number of abstract tasks")->required();
  gen->add_option("--candidates", gen_opts.candidates, "Candidate services per task")->required();
  gen->add_option("--seed", gen_opts.seed, "Generation seed")->required();
  gen->add_option("--out", gen_opts.out, "Instance file to write")->required();
  gen->add_option("--shape", gen_opts.shape, "Workflow shape: sequence | mixed");
  gen->add_option("--weights", gen_opts.weights, "Objective weights w1 w2 w3")->expected(3);
  gen->add_option("--name", gen_opts.name, "Instance name stored in the file");
  gen->add_option("--rt-range", gen_opts.rt_range, "Response-time range: lo hi")->expected(2);
  gen->add_option("--energy-range", gen_opts.energy_range, "Energy range: lo hi")->expected(2);
  gen->add_option("--cost-range", gen_opts.cost_range, "Cost range: lo hi")->expected(2);
  gen->add_option("--pool-out", gen_opts.pool_out, "Also write the sampled pool as CSV");
  gen->callback([&] {
    qc::SyntheticSpec spec;
    spec.response_time = {gen_opts.rt_range[0], gen_opts.rt_range[1]};
    spec.energy = {gen_opts.energy_range[0], gen_opts.energy_range[1]};
    spec.cost = {gen_opts.cost_range[0], gen_opts.cost_range[1]};
    spec.size = static_cast<std::size_t>(gen_opts.tasks) * static_cast<std::size_t>(gen_opts.candidates);
    spec.seed = gen_opts.seed;
    const qc::ServicePool pool = qc::generate_synthetic_pool(spec);
    const qc::CompositionProblem problem = qc::sample_instance(
        pool, gen_opts.tasks, gen_opts.candidates, qc::parse_workflow_shape(gen_opts.shape),
        {gen_opts.weights[0], gen_opts.weights[1], gen_opts.weights[2]}, qc::mix64(gen_opts.seed));
    qc::save_instance(problem, gen_opts.out, gen_opts.name);
    if (!gen_opts.pool_out.empty()) write_text_file(gen_opts.pool_out, qc::pool_to_csv(pool));
    std::printf("wrote %s (%d tasks x %d candidates, shape %s)\n", gen_opts.out.c_str(),
                gen_opts.tasks, gen_opts.candidates, gen_opts.shape.c_str());
  });

  // --- solve -------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "Run one algorithm on one instance");
  struct {
    std::string instance;
    std::string algo;
    std::uint64_t seed = 0;
    int generations = 100;
    int pop = 50;
    int memeplexes = 5;
    double mutation_fraction = 0.3;
    std::optional<int> stall;
    std::uint64_t max_evals = 0;
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;
    int tournament = 2;
    double inertia = 0.7;
    double cognitive = 1.4;
    double social = 1.4;
    double acceptance = 0.2;
    std::uint64_t cap = 1'000'000;
    std::string out;
  } solve_opts;
  solve->add_option("--instance", solve_opts.instance, "Instance file")->required();
  solve->add_option("--algo", solve_opts.algo, "sfga | ga | pso | ca | gapso | brute")->required();
  solve->add_option("--seed", solve_opts.seed, "Run seed")->required();
  solve->add_option("--generations", solve_opts.generations, "Generation budget");
  solve->add_option("--pop", solve_opts.pop, "Population size");
  solve->add_option("--memeplexes", solve_opts.memeplexes, "Memeplex count (sfga)");
  solve->add_option("--mutation-fraction", solve_opts.mutation_fraction, "Memeplex mutation fraction (sfga)");
  solve->add_option("--stall", solve_opts.stall, "Stop after N generations without improvement (sfga)");
  solve->add_option("--max-evals", solve_opts.max_evals, "Evaluation budget, 0 = unbounded");
  solve->add_option("--crossover-rate", solve_opts.crossover_rate, "GA crossover rate");
  solve->add_option("--mutation-rate", solve_opts.mutation_rate, "GA mutation rate");
  solve->add_option("--tournament", solve_opts.tournament, "GA tournament size");
  solve->add_option("--inertia", solve_opts.inertia, "PSO inertia weight");
  solve->add_option("--cognitive", solve_opts.cognitive, "PSO cognitive coefficient");
  solve->add_option("--social", solve_opts.social, "PSO social coefficient");
  solve->add_option("--acceptance", solve_opts.acceptance, "CA acceptance fraction");
  solve->add_option("--cap", solve_opts.cap, "Combination cap (brute)");
  solve->add_option("--out", solve_opts.out, "Write the run record as JSON");
  solve->callback([&] {
    std::string name;
    const qc::CompositionProblem problem = qc::load_instance(solve_opts.instance, &name);
    const std::vector<qc::Violation> violations = qc::validate_problem(problem);
    if (!violations.empty()) {
      for (const qc::Violation& v : violations) std::cerr << qc::describe(v) << "\n";
      throw std::runtime_error("instance failed validation");
    }
    const std::string label = name.empty() ? solve_opts.instance : name;

    qc::RunRecord record;
    if (solve_opts.algo == "sfga") {
      qc::SfgaConfig config;
      config.population_size = solve_opts.pop;
      config.memeplex_count = solve_opts.memeplexes;
      config.generations = solve_opts.generations;
      config.mutation_fraction = solve_opts.mutation_fraction;
      config.seed = solve_opts.seed;
      config.stall_limit = solve_opts.stall;
      config.max_evaluations = solve_opts.max_evals;
      record = qc::run_sfga(problem, config, label);
    } else {
      qc::BaselineConfig config;
      if (solve_opts.algo == "ga") config.algorithm = qc::BaselineAlgorithm::Ga;
      else if (solve_opts.algo == "pso") config.algorithm = qc::BaselineAlgorithm::Pso;
      else if (solve_opts.algo == "ca") config.algorithm = qc::BaselineAlgorithm::Ca;
      else if (solve_opts.algo == "gapso") config.algorithm = qc::BaselineAlgorithm::Gapso;
      else if (solve_opts.algo == "brute") config.algorithm = qc::BaselineAlgorithm::Brute;
      else throw qc::ConfigInvalid("unknown algorithm: " + solve_opts.algo);
      config.population_size = solve_opts.pop;
      config.generations = solve_opts.generations;
      config.seed = solve_opts.seed;
      config.max_evaluations =
          config.algorithm == qc::BaselineAlgorithm::Brute ? solve_opts.cap : solve_opts.max_evals;
      config.crossover_rate = solve_opts.crossover_rate;
      config.mutation_rate = solve_opts.mutation_rate;
      config.tournament_size = solve_opts.tournament;
      config.inertia = solve_opts.inertia;
      config.cognitive = solve_opts.cognitive;
      config.social = solve_opts.social;
      config.acceptance_fraction = solve_opts.acceptance;
      record = qc::run_baseline(problem, config, label);
    }
    print_record(record);
    if (!solve_opts.out.empty()) {
      write_text_file(solve_opts.out, record_to_json(record).dump(2) + "\n");
    }
  });

  // --- oracle ------------------------------------------------------------
  auto* oracle = app.add_subcommand("oracle", "Brute-force the optimum of a small instance");
  struct {
    std::string instance;
    std::uint64_t cap = 1'000'000;
  } oracle_opts;
  oracle->add_option("--instance", oracle_opts.instance, "Instance file")->required();
  oracle->add_option("--cap", oracle_opts.cap, "Combination cap");
  oracle->callback([&] {
    const qc::CompositionProblem problem = qc::load_instance(oracle_opts.instance);
    const qc::BruteForceResult result = qc::brute_force_optimum(problem, oracle_opts.cap);
    std::printf("best genome:    [%s]\n", genome_to_string(result.best_genome).c_str());
    std::printf("best fitness:   %.9f\n", result.best_fitness);
    std::printf("combinations:   %llu\n", static_cast<unsigned long long>(result.combinations));
  });

  // --- validate ----------------------------------------------------------
  auto* validate = app.add_subcommand("validate", "Check an instance file against all invariants");
  struct {
    std::string instance;
  } validate_opts;
  validate->add_option("--instance", validate_opts.instance, "Instance file")->required();
  validate->callback([&] {
    const qc::CompositionProblem problem = qc::load_instance(validate_opts.instance);
    const std::vector<qc::Violation> violations = qc::validate_problem(problem);
    if (violations.empty()) {
      std::printf("OK: %zu tasks, valid\n", problem.tasks.size());
    } else {
      for (const qc::Violation& v : violations) std::cerr << qc::describe(v) << "\n";
      exit_code = 2;
    }
  });

  // --- bench -------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "Run a scenario file and emit records + summaries");
  struct {
    std::string spec;
    std::string out_dir;
    int workers = 1;
    bool no_timing = false;
  } bench_opts;
  bench->add_option("--spec", bench_opts.spec, "Scenario file (qosbench/1)")->required();
  bench->add_option("--out-dir", bench_opts.out_dir, "Output directory")->required();
  bench->add_option("--workers", bench_opts.workers, "Worker threads");
  bench->add_flag("--no-timing", bench_opts.no_timing, "Zero the wall-time column for byte-stable output");
  bench->callback([&] {
    const qc::ScenarioSpec spec = qc::load_scenario(bench_opts.spec);
    const std::vector<qc::RunRecord> records = qc::run_scenario(spec, bench_opts.workers);

    const std::filesystem::path dir(bench_opts.out_dir);
    std::filesystem::create_directories(dir);
    write_text_file(dir / "records.csv", qc::emit_results_csv(records, !bench_opts.no_timing));
    write_text_file(dir / "summary.csv", summary_csv(records));
    write_text_file(dir / "summary_by_level.csv", summary_by_level_csv(records));
    write_text_file(dir / "boxplot_best_fitness.csv",
                    qc::emit_boxplot_data(records, qc::Metric::BestFitness));
    write_text_file(dir / "boxplot_agg_energy.csv",
                    qc::emit_boxplot_data(records, qc::Metric::AggEnergy));

    std::map<std::string, std::vector<double>> energy_groups;
    for (const qc::RunRecord& r : records) {
      energy_groups[r.algorithm].push_back(r.best_aggregate.energy);
    }
    std::printf("%zu records -> %s\n", records.size(), bench_opts.out_dir.c_str());
    print_group_table(energy_groups, qc::Metric::AggEnergy);
  });

  // --- stats -------------------------------------------------------------
  auto* stats = app.add_subcommand("stats", "Summarize a records CSV per algorithm");
  struct {
    std::string records;
    std::string metric = "agg_energy";
  } stats_opts;
  stats->add_option("--records", stats_opts.records, "records.csv from bench")->required();
  stats->add_option("--metric", stats_opts.metric,
                    "best_fitness | agg_response_time | agg_energy | agg_cost | wall_time");
  stats->callback([&] {
    std::ifstream in(stats_opts.records, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + stats_opts.records);
    std::ostringstream text;
    text << in.rdbuf();
    const std::vector<qc::RunRecord> records = qc::parse_records_csv(text.str());
    const qc::Metric metric = qc::parse_metric(stats_opts.metric);
    std::map<std::string, std::vector<double>> groups;
    for (const qc::RunRecord& r : records) groups[r.algorithm].push_back(qc::metric_value(r, metric));
    if (groups.empty()) throw qc::EmptyInput("records file has no rows");
    print_group_table(groups, metric);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return exit_code;
}
