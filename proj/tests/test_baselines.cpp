#include <cmath>

#include <doctest.h>

#include "qoscompose/baselines.hpp"
#include "test_support.hpp"

using namespace qoscompose;
using test::forced_problem;
using test::make_problem;
using test::random_problem;
using test::sample_problem;

namespace {

// The shared 81-combination benchmark instance for hit-rate checks.
CompositionProblem small_instance() {
  std::vector<std::vector<QosTriple>> pools;
  Rng rng(1234);
  for (int t = 0; t < 4; ++t) {
    std::vector<QosTriple> pool;
    for (int c = 0; c < 3; ++c) {
      pool.push_back({rng.uniform_range(19.0, 90.0), rng.uniform_range(33.0, 147.0),
                      rng.uniform_range(28.0, 106.0)});
    }
    pools.push_back(std::move(pool));
  }
  return make_problem(pools);
}

int count_hits(const CompositionProblem& problem, BaselineAlgorithm algorithm, int seeds) {
  const BruteForceResult oracle = brute_force_optimum(problem);
  int hits = 0;
  for (int seed = 0; seed < seeds; ++seed) {
    BaselineConfig config;
    config.algorithm = algorithm;
    config.population_size = 30;
    config.generations = 200;
    config.seed = static_cast<std::uint64_t>(seed);
    const RunRecord record = run_baseline(problem, config);
    if (std::abs(record.best_fitness - oracle.best_fitness) <= 1e-9) ++hits;
  }
  return hits;
}

}  // namespace

TEST_CASE("every baseline solves forced instances and is seed-deterministic") {
  const CompositionProblem problem = forced_problem(4);
  for (const BaselineAlgorithm algorithm :
       {BaselineAlgorithm::Ga, BaselineAlgorithm::Pso, BaselineAlgorithm::Ca,
        BaselineAlgorithm::Gapso}) {
    BaselineConfig config;
    config.algorithm = algorithm;
    config.population_size = 10;
    config.generations = 15;
    config.seed = 42;
    const RunRecord a = run_baseline(problem, config, "forced");
    CHECK(a.best_genome == Genome{{0, 0, 0, 0}});
    CHECK(a.best_fitness == 0.0);
    CHECK(a.algorithm == to_string(algorithm));

    const RunRecord b = run_baseline(problem, config, "forced");
    CHECK(a.best_genome == b.best_genome);
    CHECK(a.best_fitness == b.best_fitness);
    CHECK(a.trace == b.trace);
    CHECK(a.evaluation_count == b.evaluation_count);
  }
}

TEST_CASE("baseline traces are non-increasing with valid best genomes") {
  Rng rng(7);
  for (int iter = 0; iter < 8; ++iter) {
    const CompositionProblem problem = random_problem(rng, 5, 4, true);
    for (const BaselineAlgorithm algorithm :
         {BaselineAlgorithm::Ga, BaselineAlgorithm::Pso, BaselineAlgorithm::Ca,
          BaselineAlgorithm::Gapso}) {
      BaselineConfig config;
      config.algorithm = algorithm;
      config.population_size = 16;
      config.generations = 25;
      config.seed = static_cast<std::uint64_t>(iter);
      const RunRecord record = run_baseline(problem, config);
      for (std::size_t i = 1; i < record.trace.size(); ++i) {
        CHECK(record.trace[i] <= record.trace[i - 1]);
      }
      CHECK(record.trace.back() == record.best_fitness);
      CHECK(genome_in_range(problem, record.best_genome));
    }
  }
}

TEST_CASE("ga reaches the small-instance optimum in most seeds") {
  CHECK(count_hits(small_instance(), BaselineAlgorithm::Ga, 20) >= 16);
}

TEST_CASE("pso reaches the small-instance optimum in most seeds") {
  CHECK(count_hits(small_instance(), BaselineAlgorithm::Pso, 20) >= 14);
}

TEST_CASE("ca reaches the small-instance optimum in most seeds") {
  CHECK(count_hits(small_instance(), BaselineAlgorithm::Ca, 20) >= 14);
}

TEST_CASE("gapso reaches the small-instance optimum in most seeds") {
  CHECK(count_hits(small_instance(), BaselineAlgorithm::Gapso, 20) >= 16);
}

TEST_CASE("no metaheuristic beats the brute-force oracle") {
  Rng rng(17);
  for (int iter = 0; iter < 10; ++iter) {
    const CompositionProblem problem = random_problem(rng, 4, 4, true);
    const BruteForceResult oracle = brute_force_optimum(problem);
    for (const BaselineAlgorithm algorithm :
         {BaselineAlgorithm::Ga, BaselineAlgorithm::Pso, BaselineAlgorithm::Ca,
          BaselineAlgorithm::Gapso}) {
      BaselineConfig config;
      config.algorithm = algorithm;
      config.population_size = 12;
      config.generations = 10;
      config.seed = static_cast<std::uint64_t>(iter);
      const RunRecord record = run_baseline(problem, config);
      CHECK(record.best_fitness >= oracle.best_fitness - 1e-12);
    }
  }
}

TEST_CASE("brute_force_optimum picks the dominating selection") {
  const CompositionProblem problem = make_problem({{{1, 1, 1}, {2, 2, 2}}, {{1, 1, 1}, {3, 3, 3}}});
  const BruteForceResult result = brute_force_optimum(problem);
  CHECK(result.best_genome == Genome{{0, 0}});
  CHECK(result.combinations == 4);
  CHECK(result.best_fitness == 0.0);
}

TEST_CASE("brute_force_optimum on the first two sample tasks") {
  const CompositionProblem problem = sample_problem(0, 2);
  const BruteForceResult result = brute_force_optimum(problem);
  CHECK(result.combinations == 12);
  // Regression values frozen from the first oracle run over all 12 selections.
  CHECK(result.best_genome == Genome{{1, 1}});
  CHECK(result.best_fitness == doctest::Approx(0.2475892061122514).epsilon(1e-9));
}

TEST_CASE("brute_force_optimum rejects oversized instances") {
  std::vector<std::vector<QosTriple>> pools;
  for (int t = 0; t < 30; ++t) {
    pools.push_back({{1, 1, 1}, {2, 2, 2}, {3, 3, 3}, {4, 4, 4}});
  }
  const CompositionProblem problem = make_problem(pools);
  try {
    brute_force_optimum(problem, 1'000'000);
    FAIL("expected TooLarge");
  } catch (const TooLarge& e) {
    CHECK(e.total == 1152921504606846976ULL);  // 4^30
    CHECK(e.cap == 1'000'000);
  }
}

TEST_CASE("brute force is enumeration-order independent") {
  Rng rng(23);
  for (int iter = 0; iter < 10; ++iter) {
    const CompositionProblem problem = random_problem(rng, 4, 3, true);
    const BruteForceResult forward = brute_force_optimum(problem);

    // Independent reversed enumeration: first gene fastest.
    const ObjectiveBounds bounds = objective_bounds(problem);
    Genome current;
    current.genes.assign(problem.tasks.size(), 0);
    double best = fitness(problem, current, bounds);
    std::uint64_t count = 1;
    while (true) {
      std::size_t pos = 0;
      while (pos < current.genes.size() &&
             current.genes[pos] + 1 >= static_cast<int>(problem.tasks[pos].candidates.size())) {
        current.genes[pos] = 0;
        ++pos;
      }
      if (pos == current.genes.size()) break;
      ++current.genes[pos];
      ++count;
      best = std::min(best, fitness(problem, current, bounds));
    }
    CHECK(count == forward.combinations);
    CHECK(best == doctest::Approx(forward.best_fitness).epsilon(1e-12));
  }
}

TEST_CASE("baseline config validation") {
  const CompositionProblem problem = sample_problem(0, 2);
  BaselineConfig config;
  config.population_size = 0;
  CHECK_THROWS_AS(run_ga(problem, config), ConfigInvalid);
  config.population_size = 10;
  config.crossover_rate = 1.5;
  CHECK_THROWS_AS(run_ga(problem, config), ConfigInvalid);
  config.crossover_rate = 0.9;
  config.acceptance_fraction = 0.0;
  CHECK_THROWS_AS(run_ca(problem, config), ConfigInvalid);
}
