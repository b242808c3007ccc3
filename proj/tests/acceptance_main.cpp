// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier statistical checks live here rather than in the unit tests.

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qoscompose/baselines.hpp"
#include "qoscompose/bench.hpp"
#include "qoscompose/instance_io.hpp"
#include "qoscompose/sfga.hpp"
#include "test_support.hpp"

using namespace qoscompose;
using test::make_problem;
using test::make_task;
using test::random_genome;
using test::random_problem;
using test::sample_matrix;
using test::sample_problem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

// Random instance with at most `max_combinations` genomes, uniform QoS.
CompositionProblem random_small_instance(Rng& rng, std::uint64_t max_combinations) {
  while (true) {
    const int m = 2 + static_cast<int>(rng.uniform_index(4));  // 2..5 tasks
    std::vector<std::vector<QosTriple>> pools;
    std::uint64_t total = 1;
    for (int t = 0; t < m; ++t) {
      const std::size_t n = 1 + rng.uniform_index(4);  // 1..4 candidates
      total *= n;
      std::vector<QosTriple> pool;
      for (std::size_t c = 0; c < n; ++c) {
        pool.push_back({rng.uniform_range(19.0, 90.0), rng.uniform_range(33.0, 147.0),
                        rng.uniform_range(28.0, 106.0)});
      }
      pools.push_back(std::move(pool));
    }
    if (total > max_combinations) continue;
    CompositionProblem problem = make_problem(pools);
    if (rng.uniform_index(2) == 1) {
      problem.workflow = build_workflow(WorkflowShape::Mixed, m);
    }
    return problem;
  }
}

// 1. The five hand-computed aggregation cases, exact to 1e-9.
void criterion_1() {
  bool ok = true;
  std::string detail;

  {
    const CompositionProblem p = sample_problem(0, 2);
    const QosTriple agg = aggregate_qos(p.workflow, p, Genome{{0, 0}});
    ok &= near(agg.response_time, 95) && near(agg.energy, 148) && near(agg.cost, 4410);
  }
  {
    const CompositionProblem p = make_problem({sample_matrix()[9]});
    const QosTriple agg = aggregate_qos(p.workflow, p, Genome{{0}});
    ok &= near(agg.response_time, 80) && near(agg.energy, 33) && near(agg.cost, 58);
  }
  {
    CompositionProblem p;
    p.tasks.push_back(make_task(0, {{26, 70, 40}}));
    p.tasks.push_back(make_task(1, {{19, 96, 63}}));
    p.workflow = WorkflowNode::fork({WorkflowNode::atomic(0), WorkflowNode::atomic(1)});
    const QosTriple agg = aggregate_qos(p.workflow, p, Genome{{0, 0}});
    ok &= near(agg.response_time, 26) && near(agg.energy, 96) && near(agg.cost, 40);
  }
  {
    CompositionProblem p;
    p.tasks.push_back(make_task(0, {{80, 33, 58}}));
    p.workflow = WorkflowNode::loop(WorkflowNode::atomic(0), 2);
    const QosTriple agg = aggregate_qos(p.workflow, p, Genome{{0}});
    ok &= near(agg.response_time, 160) && near(agg.energy, 66) && near(agg.cost, 3364);
  }
  {
    CompositionProblem p;
    p.tasks.push_back(make_task(0, {{61, 100, 28}}));
    p.tasks.push_back(make_task(1, {{49, 98, 74}}));
    p.workflow =
        WorkflowNode::branch({WorkflowNode::atomic(0), WorkflowNode::atomic(1)}, {0.5, 0.5});
    const QosTriple agg = aggregate_qos(p.workflow, p, Genome{{0, 0}});
    ok &= near(agg.response_time, 55) && near(agg.energy, 99) && near(agg.cost, 51);
  }

  report(1, ok, "aggregation oracle: sequence/atomic/fork/loop/branch cases exact to 1e-9");
}

// 2. SFGA attains the brute-force optimum in >= 95% of (instance, seed) cells.
void criterion_2() {
  Rng rng(20240201);
  int hits = 0;
  int cells = 0;
  for (int i = 0; i < 50; ++i) {
    const CompositionProblem problem = random_small_instance(rng, 1000);
    const BruteForceResult oracle = brute_force_optimum(problem, 1000);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      SfgaConfig config;
      config.population_size = 50;
      config.memeplex_count = 5;
      config.generations = 200;
      config.seed = seed;
      const RunRecord record = run_sfga(problem, config);
      ++cells;
      if (near(record.best_fitness, oracle.best_fitness)) ++hits;
    }
  }
  const double rate = static_cast<double>(hits) / static_cast<double>(cells);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "brute-force equivalence: %d/%d cells at the oracle optimum (%.1f%%, need >= 95%%)",
                hits, cells, 100.0 * rate);
  report(2, rate >= 0.95, buf);
}

// 3. Non-increasing traces for every algorithm, zero violations.
void criterion_3() {
  Rng rng(303);
  int violations = 0;
  int runs = 0;
  for (int i = 0; i < 100; ++i) {
    const CompositionProblem problem = random_small_instance(rng, 100000);
    const auto seed = static_cast<std::uint64_t>(i);

    std::vector<RunRecord> records;
    SfgaConfig sfga;
    sfga.population_size = 20;
    sfga.memeplex_count = 4;
    sfga.generations = 30;
    sfga.seed = seed;
    records.push_back(run_sfga(problem, sfga));

    for (const BaselineAlgorithm algorithm :
         {BaselineAlgorithm::Ga, BaselineAlgorithm::Pso, BaselineAlgorithm::Ca,
          BaselineAlgorithm::Gapso}) {
      BaselineConfig config;
      config.algorithm = algorithm;
      config.population_size = 20;
      config.generations = 30;
      config.seed = seed;
      records.push_back(run_baseline(problem, config));
    }

    for (const RunRecord& record : records) {
      ++runs;
      for (std::size_t g = 1; g < record.trace.size(); ++g) {
        if (record.trace[g] > record.trace[g - 1]) ++violations;
      }
      if (record.trace.back() != record.best_fitness) ++violations;
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "elitism: %d trace violations across %d runs (need 0)",
                violations, runs);
  report(3, violations == 0, buf);
}

// 4. Bit-identical repeat runs; scenario CSV identical for 1 vs 4 workers.
void criterion_4() {
  bool ok = true;
  Rng rng(404);
  for (int i = 0; i < 10; ++i) {
    const CompositionProblem problem = random_small_instance(rng, 100000);
    SfgaConfig sfga;
    sfga.population_size = 20;
    sfga.memeplex_count = 4;
    sfga.generations = 25;
    sfga.seed = static_cast<std::uint64_t>(i);
    const RunRecord a = run_sfga(problem, sfga);
    const RunRecord b = run_sfga(problem, sfga);
    ok &= a.best_genome == b.best_genome && a.best_fitness == b.best_fitness && a.trace == b.trace;

    for (const BaselineAlgorithm algorithm :
         {BaselineAlgorithm::Ga, BaselineAlgorithm::Pso, BaselineAlgorithm::Ca,
          BaselineAlgorithm::Gapso}) {
      BaselineConfig config;
      config.algorithm = algorithm;
      config.population_size = 16;
      config.generations = 20;
      config.seed = static_cast<std::uint64_t>(i);
      const RunRecord c = run_baseline(problem, config);
      const RunRecord d = run_baseline(problem, config);
      ok &= c.best_genome == d.best_genome && c.best_fitness == d.best_fitness && c.trace == d.trace;
    }
  }

  ScenarioSpec spec;
  spec.name = "det";
  spec.task_count = 4;
  spec.levels = {2, 4};
  spec.algorithms = {"sfga", "ga", "pso"};
  spec.seeds = {1, 2, 3};
  spec.population = 10;
  spec.generations = 10;
  spec.sfga.memeplex_count = 2;
  const std::string serial = emit_results_csv(run_scenario(spec, 1), false);
  const std::string parallel = emit_results_csv(run_scenario(spec, 4), false);
  const std::string repeat = emit_results_csv(run_scenario(spec, 1), false);
  ok &= serial == parallel && serial == repeat;

  report(4, ok, "determinism: repeated runs identical; records CSV equal for 1 vs 4 workers");
}

// 5. Trend reproduction on scenario-1-style synthetic instances.
void criterion_5() {
  ScenarioSpec spec;
  spec.name = "scenario1";
  spec.task_count = 11;
  spec.levels = {10, 20, 30, 40, 50};
  spec.algorithms = {"sfga", "ga", "pso", "ca", "gapso"};
  spec.seeds.clear();
  for (std::uint64_t s = 1; s <= 30; ++s) spec.seeds.push_back(s);
  spec.population = 50;
  spec.generations = 100;
  spec.equal_evaluation_budget = true;
  spec.sfga.memeplex_count = 5;

  const std::vector<RunRecord> records = run_scenario(spec, 4);
  const bool count_ok = records.size() == 750;  // 5 levels x 5 algorithms x 30 seeds

  std::map<int, std::map<std::string, std::vector<double>>> fitness_by_level, energy_by_level;
  std::map<std::string, std::vector<double>> energy_overall;
  for (const RunRecord& r : records) {
    fitness_by_level[r.level][r.algorithm].push_back(r.best_fitness);
    energy_by_level[r.level][r.algorithm].push_back(r.best_aggregate.energy);
    energy_overall[r.algorithm].push_back(r.best_aggregate.energy);
  }

  bool fitness_ok = true;
  int energy_wins = 0;
  for (const int level : spec.levels) {
    const auto mean = [&](const std::map<std::string, std::vector<double>>& groups,
                          const std::string& algo) {
      return summarize_stats(groups.at(algo)).mean;
    };
    const double sfga_fit = mean(fitness_by_level[level], "sfga");
    fitness_ok &= sfga_fit <= mean(fitness_by_level[level], "ga");
    fitness_ok &= sfga_fit <= mean(fitness_by_level[level], "pso");

    const double sfga_energy = mean(energy_by_level[level], "sfga");
    bool is_min = true;
    for (const std::string& algo : spec.algorithms) {
      is_min &= sfga_energy <= mean(energy_by_level[level], algo);
    }
    if (is_min) ++energy_wins;
  }

  // Report the per-algorithm energy means/stds in the two-row table layout.
  std::printf("    mean aggregate energy over levels 10-50, 30 seeds each:\n    %-14s", "");
  for (const std::string& algo : spec.algorithms) std::printf("%12s", algo.c_str());
  std::printf("\n    %-14s", "mean");
  for (const std::string& algo : spec.algorithms) {
    std::printf("%12.4f", summarize_stats(energy_overall[algo]).mean);
  }
  std::printf("\n    %-14s", "std dev");
  for (const std::string& algo : spec.algorithms) {
    std::printf("%12.5f", summarize_stats(energy_overall[algo]).std_dev);
  }
  std::printf("\n");
  std::printf("    mean best fitness by level:\n");
  for (const int level : spec.levels) {
    std::printf("    L%-3d", level);
    for (const std::string& algo : spec.algorithms) {
      std::printf("%12.6f", summarize_stats(fitness_by_level[level][algo]).mean);
    }
    std::printf("\n");
  }

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "trend reproduction: %zu records; SFGA fitness <= GA,PSO at every level: %s; "
                "SFGA min energy at %d/5 levels (need >= 4)",
                records.size(), fitness_ok ? "yes" : "no", energy_wins);
  report(5, count_ok && fitness_ok && energy_wins >= 4, buf);
}

// 6. 10,000 randomized structural checks each, zero violations.
void criterion_6() {
  Rng rng(606);
  int violations = 0;

  // crossover closure
  for (int i = 0; i < 10000; ++i) {
    const CompositionProblem problem = random_problem(rng, 6, 5, true);
    const Genome p1 = random_genome(problem, rng);
    const Genome p2 = random_genome(problem, rng);
    const std::size_t a = rng.uniform_index(p1.genes.size());
    const std::size_t b = rng.uniform_index(p1.genes.size());
    const auto [c1, c2] = two_point_crossover(p1, p2, std::min(a, b), std::max(a, b));
    if (!genome_in_range(problem, c1) || !genome_in_range(problem, c2)) ++violations;
  }

  // mutation count exactness
  for (int i = 0; i < 10000; ++i) {
    const CompositionProblem problem = random_problem(rng, 4, 4, false);
    EvalContext ctx(problem);
    const std::size_t size = 2 + rng.uniform_index(9);
    SfgaConfig config;
    config.population_size = static_cast<int>(size);
    config.memeplex_count = 1;
    Rng init_rng(static_cast<std::uint64_t>(i));
    auto population = init_population(ctx, config, init_rng);
    EvaluatedFrog global_best = population[0];
    const auto memeplexes = sort_and_partition(population, 1);
    const double fraction = rng.uniform_real();
    const std::uint64_t before = ctx.evaluations;
    memeplex_mutation_step(ctx, memeplexes[0], population, global_best, fraction, init_rng);
    const auto expected =
        static_cast<std::uint64_t>(std::floor(static_cast<double>(size) * fraction));
    if (ctx.evaluations - before != expected) ++violations;
  }

  // partition disjoint cover with equal sizes
  for (int i = 0; i < 10000; ++i) {
    const std::size_t m = 1 + rng.uniform_index(8);
    const std::size_t per = 2 + rng.uniform_index(6);
    std::vector<EvaluatedFrog> population;
    for (std::size_t p = 0; p < m * per; ++p) {
      population.push_back({Genome{{0}}, rng.uniform_real()});
    }
    std::set<std::size_t> seen;
    bool ok = true;
    for (const Memeplex& mp : sort_and_partition(population, static_cast<int>(m))) {
      ok &= mp.members.size() == per;
      for (const std::size_t idx : mp.members) ok &= seen.insert(idx).second;
    }
    ok &= seen.size() == m * per;
    if (!ok) ++violations;
  }

  // fitness in [0, 1]
  for (int i = 0; i < 10000; ++i) {
    const CompositionProblem problem = random_problem(rng, 6, 5, true);
    const ObjectiveBounds bounds = objective_bounds(problem);
    const double f = fitness(problem, random_genome(problem, rng), bounds);
    if (!(f >= 0.0 && f <= 1.0)) ++violations;
  }

  // bounds soundness, exhaustively enumerated small instances
  int checked = 0;
  while (checked < 10000) {
    const CompositionProblem problem = random_problem(rng, 4, 3, true);
    const ObjectiveBounds bounds = objective_bounds(problem);
    Genome g;
    g.genes.assign(problem.tasks.size(), 0);
    while (true) {
      const QosTriple agg = aggregate_qos(problem.workflow, problem, g);
      const double slack = 1e-12 * std::abs(bounds.upper.cost) + 1e-9;
      if (agg.response_time < bounds.lower.response_time - 1e-9 ||
          agg.response_time > bounds.upper.response_time + 1e-9 ||
          agg.energy < bounds.lower.energy - 1e-9 || agg.energy > bounds.upper.energy + 1e-9 ||
          agg.cost < bounds.lower.cost - slack || agg.cost > bounds.upper.cost + slack) {
        ++violations;
      }
      ++checked;
      std::size_t pos = g.genes.size();
      bool done = true;
      while (pos > 0) {
        --pos;
        if (g.genes[pos] + 1 < static_cast<int>(problem.tasks[pos].candidates.size())) {
          ++g.genes[pos];
          std::fill(g.genes.begin() + static_cast<std::ptrdiff_t>(pos) + 1, g.genes.end(), 0);
          done = false;
          break;
        }
      }
      if (done) break;
    }
  }

  char buf[120];
  std::snprintf(buf, sizeof(buf), "structural properties: %d violations over 5x10000 checks (need 0)",
                violations);
  report(6, violations == 0, buf);
}

// 7. Codec laws.
void criterion_7() {
  Rng rng(707);
  bool ok = true;

  for (int i = 0; i < 1000; ++i) {
    const CompositionProblem problem = random_problem(rng, 6, 5, true);
    if (read_instance(write_instance(problem)) != problem) ok = false;
  }

  std::vector<RunRecord> records;
  for (int i = 0; i < 100; ++i) {
    RunRecord r;
    r.algorithm = "sfga";
    r.instance = "x" + std::to_string(i);
    r.level = static_cast<int>(rng.uniform_index(100));
    r.seed = rng.next_u64() % 10000;
    r.best_fitness = rng.uniform_real();
    r.best_aggregate = {rng.uniform_range(0, 1e3), rng.uniform_range(0, 1e3),
                        rng.uniform_range(0, 1e9)};
    r.evaluation_count = rng.next_u64() % 100000;
    r.wall_time_s = rng.uniform_real();
    records.push_back(std::move(r));
  }
  const std::vector<RunRecord> back = parse_records_csv(emit_results_csv(records));
  ok &= back.size() == records.size();
  for (std::size_t i = 0; i < back.size(); ++i) {
    ok &= std::abs(back[i].best_fitness - records[i].best_fitness) <= 1e-6;
    ok &= std::abs(back[i].best_aggregate.response_time -
                   records[i].best_aggregate.response_time) <= 1e-6;
    ok &= std::abs(back[i].best_aggregate.energy - records[i].best_aggregate.energy) <= 1e-6;
    ok &= std::abs(back[i].best_aggregate.cost - records[i].best_aggregate.cost) <= 1e-6;
    ok &= back[i].evaluation_count == records[i].evaluation_count;
  }

  // malformed inputs raise the specified error classes
  const std::string text = write_instance(sample_problem(0, 2));
  try {
    read_instance(text.substr(0, text.size() / 3));
    ok = false;
  } catch (const ParseError&) {
  }
  try {
    std::string wrong = text;
    wrong.replace(wrong.find("qoscompose/1"), 12, "qoscompose/9");
    read_instance(wrong);
    ok = false;
  } catch (const SchemaVersionMismatch&) {
  }
  try {
    ColumnMap columns;
    parse_service_pool_csv("s1,abc,2,3", columns, false);
    ok = false;
  } catch (const BadNumber& e) {
    ok &= e.row == 1 && e.column == 1;
  }
  try {
    ColumnMap columns;
    parse_service_pool_csv("id,a,b,c\n", columns, true);
    ok = false;
  } catch (const EmptyFile&) {
  }

  report(7, ok, "codec laws: 1000 instance round-trips, CSV numeric round-trip, error classes");
}

// 8. Statistics against closed forms and a Welford reference.
void criterion_8() {
  bool ok = true;

  const double a[] = {1.0, 2.0, 3.0};
  const SummaryStats sa = summarize_stats(a);
  ok &= sa.mean == 2.0 && near(sa.std_dev, 1.0, 0.0);

  const double b[] = {5.0};
  const SummaryStats sb = summarize_stats(b);
  ok &= sb.mean == 5.0 && sb.std_dev == 0.0 && sb.q1 == 5.0 && sb.median == 5.0 && sb.q3 == 5.0;

  const double c[] = {1.0, 2.0, 3.0, 4.0, 5.0};
  const SummaryStats sc = summarize_stats(c);
  ok &= sc.q1 == 2.0 && sc.median == 3.0 && sc.q3 == 4.0;

  Rng rng(808);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng.uniform_index(200);
    std::vector<double> values;
    for (std::size_t k = 0; k < n; ++k) values.push_back(rng.uniform_range(-1e3, 1e3));
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double delta = values[k] - mean;
      mean += delta / static_cast<double>(k + 1);
      m2 += delta * (values[k] - mean);
    }
    const double std_dev = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
    const SummaryStats s = summarize_stats(values);
    ok &= std::abs(s.mean - mean) <= 1e-9 * std::max(1.0, std::abs(mean));
    ok &= std::abs(s.std_dev - std_dev) <= 1e-9 * std::max(1.0, std_dev);
  }

  report(8, ok, "statistics: closed-form examples exact, 1000 random lists within 1e-9");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();

  if (failures == 0) {
    std::printf("all 8 acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", failures);
  return 1;
}
