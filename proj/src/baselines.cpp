#include "qoscompose/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace qoscompose {

std::string to_string(BaselineAlgorithm algorithm) {
  switch (algorithm) {
    case BaselineAlgorithm::Ga: return "ga";
    case BaselineAlgorithm::Pso: return "pso";
    case BaselineAlgorithm::Ca: return "ca";
    case BaselineAlgorithm::Gapso: return "gapso";
    case BaselineAlgorithm::Brute: return "brute";
  }
  return "unknown";
}

TooLarge::TooLarge(std::uint64_t total_combinations, std::uint64_t combo_cap)
    : std::runtime_error("instance has " + std::to_string(total_combinations) +
                         " combinations, above the cap of " + std::to_string(combo_cap)),
      total(total_combinations),
      cap(combo_cap) {}

namespace {

constexpr double kCaExploration = 0.1;  // per-gene chance of sampling outside the belief space

void check_baseline_config(const BaselineConfig& config, const CompositionProblem& problem) {
  if (problem.tasks.empty()) throw ConfigInvalid("problem has no tasks");
  if (config.population_size < 1) throw ConfigInvalid("population_size must be positive");
  if (config.generations < 1) throw ConfigInvalid("generations must be positive");
  if (!(config.crossover_rate >= 0.0 && config.crossover_rate <= 1.0)) {
    throw ConfigInvalid("crossover_rate must be in [0, 1]");
  }
  if (!(config.mutation_rate >= 0.0 && config.mutation_rate <= 1.0)) {
    throw ConfigInvalid("mutation_rate must be in [0, 1]");
  }
  if (config.tournament_size < 1) throw ConfigInvalid("tournament_size must be positive");
  if (!(config.acceptance_fraction > 0.0 && config.acceptance_fraction <= 1.0)) {
    throw ConfigInvalid("acceptance_fraction must be in (0, 1]");
  }
}

void track_best(EvaluatedFrog& global_best, const Genome& genome, double fitness_value) {
  if (fitness_value < global_best.fitness) {
    global_best.genome = genome;
    global_best.fitness = fitness_value;
  }
}

std::size_t argmin_fitness(const std::vector<EvaluatedFrog>& population) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < population.size(); ++i) {
    if (population[i].fitness < population[best].fitness) best = i;
  }
  return best;
}

struct RunState {
  explicit RunState(const CompositionProblem& problem) : ctx(problem) {}

  EvalContext ctx;
  EvaluatedFrog global_best{{}, std::numeric_limits<double>::max()};
  std::vector<double> trace;

  void observe(const Genome& genome, double fitness_value) {
    track_best(global_best, genome, fitness_value);
  }

  RunRecord finish(const CompositionProblem& problem, std::string_view algorithm,
                   std::string_view instance_label, std::uint64_t seed,
                   std::chrono::steady_clock::time_point started) const {
    RunRecord record;
    record.algorithm = std::string(algorithm);
    record.instance = std::string(instance_label);
    record.seed = seed;
    record.best_genome = global_best.genome;
    record.best_fitness = global_best.fitness;
    record.best_aggregate = aggregate_qos(problem.workflow, problem, global_best.genome);
    record.trace = trace;
    record.evaluation_count = ctx.evaluations;
    record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return record;
  }
};

std::vector<EvaluatedFrog> uniform_population(RunState& state, int population_size, Rng& rng) {
  std::vector<EvaluatedFrog> population;
  population.reserve(static_cast<std::size_t>(population_size));
  for (int i = 0; i < population_size; ++i) {
    Genome g = state.ctx.random_genome(rng);
    const double f = state.ctx.evaluate(g);
    state.observe(g, f);
    population.push_back({std::move(g), f});
  }
  return population;
}

// Tournament winner: lowest fitness among tournament_size draws, first drawn on ties.
std::size_t tournament_select(const std::vector<EvaluatedFrog>& population, int tournament_size,
                              Rng& rng) {
  std::size_t winner = rng.uniform_index(population.size());
  for (int i = 1; i < tournament_size; ++i) {
    const std::size_t challenger = rng.uniform_index(population.size());
    if (population[challenger].fitness < population[winner].fitness) winner = challenger;
  }
  return winner;
}

void maybe_mutate(Genome& genome, const CompositionProblem& problem, double mutation_rate,
                  Rng& rng) {
  if (rng.uniform_real() >= mutation_rate) return;
  const std::size_t position = rng.uniform_index(genome.genes.size());
  const std::size_t pool = problem.tasks[position].candidates.size();
  if (pool > 1) {
    auto v = static_cast<int>(rng.uniform_index(pool - 1));
    if (v >= genome.genes[position]) ++v;
    genome = one_point_mutation(genome, position, v, problem);
  }
}

// One generational GA step with one-elite survival; shared by run_ga and the
// GA phase of run_gapso.
std::vector<EvaluatedFrog> ga_generation(RunState& state, const std::vector<EvaluatedFrog>& population,
                                         const BaselineConfig& config, Rng& rng) {
  const CompositionProblem& problem = *state.ctx.problem;
  const auto target = static_cast<std::size_t>(config.population_size);

  std::vector<EvaluatedFrog> next;
  next.reserve(target);
  next.push_back(population[argmin_fitness(population)]);

  while (next.size() < target) {
    const EvaluatedFrog& p1 = population[tournament_select(population, config.tournament_size, rng)];
    const EvaluatedFrog& p2 = population[tournament_select(population, config.tournament_size, rng)];

    Genome c1, c2;
    if (rng.uniform_real() < config.crossover_rate) {
      const std::size_t a = rng.uniform_index(p1.genome.genes.size());
      const std::size_t b = rng.uniform_index(p1.genome.genes.size());
      std::tie(c1, c2) = two_point_crossover(p1.genome, p2.genome, std::min(a, b), std::max(a, b));
    } else {
      c1 = p1.genome;
      c2 = p2.genome;
    }

    maybe_mutate(c1, problem, config.mutation_rate, rng);
    const double f1 = state.ctx.evaluate(c1);
    state.observe(c1, f1);
    next.push_back({std::move(c1), f1});

    if (next.size() < target) {
      maybe_mutate(c2, problem, config.mutation_rate, rng);
      const double f2 = state.ctx.evaluate(c2);
      state.observe(c2, f2);
      next.push_back({std::move(c2), f2});
    }
  }
  return next;
}

bool budget_spent(const RunState& state, const BaselineConfig& config) {
  return config.max_evaluations != 0 && state.ctx.evaluations >= config.max_evaluations;
}

// ---- discrete PSO machinery ----

struct Particle {
  std::vector<double> position;  // one real per gene, clamped to [0, pool-1]
  std::vector<double> velocity;
  Genome genome;
  double fitness = 0.0;
  std::vector<double> best_position;
  double best_fitness = 0.0;
};

struct Swarm {
  std::vector<Particle> particles;
  std::vector<double> gbest_position;
  double gbest_fitness = std::numeric_limits<double>::max();
};

Genome decode_position(const std::vector<double>& position, const CompositionProblem& problem) {
  Genome g;
  g.genes.reserve(position.size());
  for (std::size_t d = 0; d < position.size(); ++d) {
    const auto pool = static_cast<long long>(problem.tasks[d].candidates.size());
    const long long v = std::llround(position[d]);
    g.genes.push_back(static_cast<int>(std::clamp(v, 0LL, pool - 1)));
  }
  return g;
}

Swarm init_swarm(RunState& state, const BaselineConfig& config, Rng& rng) {
  const CompositionProblem& problem = *state.ctx.problem;
  const std::size_t dims = problem.tasks.size();

  Swarm swarm;
  swarm.particles.resize(static_cast<std::size_t>(config.population_size));
  for (Particle& particle : swarm.particles) {
    particle.position.resize(dims);
    particle.velocity.assign(dims, 0.0);
    for (std::size_t d = 0; d < dims; ++d) {
      const double extent = static_cast<double>(problem.tasks[d].candidates.size() - 1);
      particle.position[d] = rng.uniform_real() * extent;
    }
    particle.genome = decode_position(particle.position, problem);
    particle.fitness = state.ctx.evaluate(particle.genome);
    state.observe(particle.genome, particle.fitness);
    particle.best_position = particle.position;
    particle.best_fitness = particle.fitness;
    if (particle.fitness < swarm.gbest_fitness) {
      swarm.gbest_fitness = particle.fitness;
      swarm.gbest_position = particle.position;
    }
  }
  return swarm;
}

void pso_iteration(RunState& state, Swarm& swarm, const BaselineConfig& config, Rng& rng) {
  const CompositionProblem& problem = *state.ctx.problem;
  for (Particle& particle : swarm.particles) {
    for (std::size_t d = 0; d < particle.position.size(); ++d) {
      const double r1 = rng.uniform_real();
      const double r2 = rng.uniform_real();
      particle.velocity[d] = config.inertia * particle.velocity[d] +
                             config.cognitive * r1 * (particle.best_position[d] - particle.position[d]) +
                             config.social * r2 * (swarm.gbest_position[d] - particle.position[d]);
      const double extent = static_cast<double>(problem.tasks[d].candidates.size() - 1);
      particle.position[d] = std::clamp(particle.position[d] + particle.velocity[d], 0.0, extent);
    }
    particle.genome = decode_position(particle.position, problem);
    particle.fitness = state.ctx.evaluate(particle.genome);
    state.observe(particle.genome, particle.fitness);
    if (particle.fitness < particle.best_fitness) {
      particle.best_fitness = particle.fitness;
      particle.best_position = particle.position;
    }
    if (particle.fitness < swarm.gbest_fitness) {
      swarm.gbest_fitness = particle.fitness;
      swarm.gbest_position = particle.position;
    }
  }
}

}  // namespace

RunRecord run_ga(const CompositionProblem& problem, const BaselineConfig& config,
                 std::string_view instance_label) {
  check_baseline_config(config, problem);
  const auto started = std::chrono::steady_clock::now();

  RunState state(problem);
  Rng rng(config.seed);
  std::vector<EvaluatedFrog> population = uniform_population(state, config.population_size, rng);
  state.trace.push_back(state.global_best.fitness);

  for (int gen = 0; gen < config.generations; ++gen) {
    if (budget_spent(state, config)) break;
    population = ga_generation(state, population, config, rng);
    state.trace.push_back(state.global_best.fitness);
  }
  return state.finish(problem, "ga", instance_label, config.seed, started);
}

RunRecord run_pso(const CompositionProblem& problem, const BaselineConfig& config,
                  std::string_view instance_label) {
  check_baseline_config(config, problem);
  const auto started = std::chrono::steady_clock::now();

  RunState state(problem);
  Rng rng(config.seed);
  Swarm swarm = init_swarm(state, config, rng);
  state.trace.push_back(state.global_best.fitness);

  for (int gen = 0; gen < config.generations; ++gen) {
    if (budget_spent(state, config)) break;
    pso_iteration(state, swarm, config, rng);
    state.trace.push_back(state.global_best.fitness);
  }
  return state.finish(problem, "pso", instance_label, config.seed, started);
}

RunRecord run_ca(const CompositionProblem& problem, const BaselineConfig& config,
                 std::string_view instance_label) {
  check_baseline_config(config, problem);
  const auto started = std::chrono::steady_clock::now();

  RunState state(problem);
  Rng rng(config.seed);
  std::vector<EvaluatedFrog> population = uniform_population(state, config.population_size, rng);
  state.trace.push_back(state.global_best.fitness);

  const std::size_t dims = problem.tasks.size();
  const auto accepted_count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(config.acceptance_fraction *
                                             static_cast<double>(config.population_size))));

  std::vector<std::size_t> order(population.size());
  std::vector<int> normative_lo(dims), normative_hi(dims);

  for (int gen = 0; gen < config.generations; ++gen) {
    if (budget_spent(state, config)) break;

    // Acceptance: belief space learns from the top slice of the population.
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (population[a].fitness != population[b].fitness) {
        return population[a].fitness < population[b].fitness;
      }
      return a < b;
    });
    for (std::size_t d = 0; d < dims; ++d) {
      int lo = std::numeric_limits<int>::max();
      int hi = std::numeric_limits<int>::min();
      for (std::size_t i = 0; i < accepted_count; ++i) {
        const int g = population[order[i]].genome.genes[d];
        lo = std::min(lo, g);
        hi = std::max(hi, g);
      }
      normative_lo[d] = lo;
      normative_hi[d] = hi;
    }

    // Influence: situational elite plus normative-interval sampling.
    std::vector<EvaluatedFrog> next;
    next.reserve(population.size());
    next.push_back(state.global_best);
    while (next.size() < population.size()) {
      Genome g;
      g.genes.reserve(dims);
      for (std::size_t d = 0; d < dims; ++d) {
        const std::size_t pool = problem.tasks[d].candidates.size();
        if (rng.uniform_real() < kCaExploration) {
          g.genes.push_back(static_cast<int>(rng.uniform_index(pool)));
        } else {
          const auto span = static_cast<std::size_t>(normative_hi[d] - normative_lo[d]) + 1;
          g.genes.push_back(normative_lo[d] + static_cast<int>(rng.uniform_index(span)));
        }
      }
      const double f = state.ctx.evaluate(g);
      state.observe(g, f);
      next.push_back({std::move(g), f});
    }
    population = std::move(next);
    state.trace.push_back(state.global_best.fitness);
  }
  return state.finish(problem, "ca", instance_label, config.seed, started);
}

RunRecord run_gapso(const CompositionProblem& problem, const BaselineConfig& config,
                    std::string_view instance_label) {
  check_baseline_config(config, problem);
  const auto started = std::chrono::steady_clock::now();

  RunState state(problem);
  Rng rng(config.seed);
  Swarm swarm = init_swarm(state, config, rng);
  state.trace.push_back(state.global_best.fitness);

  for (int gen = 0; gen < config.generations; ++gen) {
    if (budget_spent(state, config)) break;

    if (gen % 2 == 0) {
      pso_iteration(state, swarm, config, rng);
    } else {
      // GA phase on the decoded genomes; re-encode offspring as positions.
      std::vector<EvaluatedFrog> current;
      current.reserve(swarm.particles.size());
      for (const Particle& particle : swarm.particles) {
        current.push_back({particle.genome, particle.fitness});
      }
      const std::vector<EvaluatedFrog> offspring = ga_generation(state, current, config, rng);
      for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
        Particle& particle = swarm.particles[i];
        particle.genome = offspring[i].genome;
        particle.fitness = offspring[i].fitness;
        for (std::size_t d = 0; d < particle.position.size(); ++d) {
          particle.position[d] = static_cast<double>(particle.genome.genes[d]);
        }
        if (particle.fitness < particle.best_fitness) {
          particle.best_fitness = particle.fitness;
          particle.best_position = particle.position;
        }
        if (particle.fitness < swarm.gbest_fitness) {
          swarm.gbest_fitness = particle.fitness;
          swarm.gbest_position = particle.position;
        }
      }
    }
    state.trace.push_back(state.global_best.fitness);
  }
  return state.finish(problem, "gapso", instance_label, config.seed, started);
}

RunRecord run_baseline(const CompositionProblem& problem, const BaselineConfig& config,
                       std::string_view instance_label) {
  switch (config.algorithm) {
    case BaselineAlgorithm::Ga: return run_ga(problem, config, instance_label);
    case BaselineAlgorithm::Pso: return run_pso(problem, config, instance_label);
    case BaselineAlgorithm::Ca: return run_ca(problem, config, instance_label);
    case BaselineAlgorithm::Gapso: return run_gapso(problem, config, instance_label);
    case BaselineAlgorithm::Brute: {
      const auto started = std::chrono::steady_clock::now();
      const std::uint64_t cap =
          config.max_evaluations != 0 ? config.max_evaluations : std::uint64_t{1'000'000};
      const BruteForceResult result = brute_force_optimum(problem, cap);
      RunRecord record;
      record.algorithm = "brute";
      record.instance = std::string(instance_label);
      record.seed = config.seed;
      record.best_genome = result.best_genome;
      record.best_fitness = result.best_fitness;
      record.best_aggregate = aggregate_qos(problem.workflow, problem, result.best_genome);
      record.trace = {result.best_fitness};
      record.evaluation_count = result.combinations;
      record.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      return record;
    }
  }
  throw ConfigInvalid("unknown baseline algorithm");
}

BruteForceResult brute_force_optimum(const CompositionProblem& problem, std::uint64_t combo_cap) {
  if (problem.tasks.empty()) throw ConfigInvalid("problem has no tasks");

  std::uint64_t total = 1;
  for (const TaskClass& task : problem.tasks) {
    const auto pool = static_cast<std::uint64_t>(task.candidates.size());
    if (pool == 0) throw ConfigInvalid("task with empty candidate pool");
    if (total > std::numeric_limits<std::uint64_t>::max() / pool) {
      total = std::numeric_limits<std::uint64_t>::max();  // saturate; certainly above any cap
      break;
    }
    total *= pool;
  }
  if (total > combo_cap) throw TooLarge(total, combo_cap);

  const ObjectiveBounds bounds = objective_bounds(problem);
  const std::size_t m = problem.tasks.size();

  Genome current;
  current.genes.assign(m, 0);
  BruteForceResult result;
  result.best_genome = current;
  result.best_fitness = fitness(problem, current, bounds);
  result.combinations = 1;

  // Odometer over the genes, last gene fastest (lexicographic order).
  while (true) {
    std::size_t pos = m;
    while (pos > 0) {
      --pos;
      if (current.genes[pos] + 1 <
          static_cast<int>(problem.tasks[pos].candidates.size())) {
        ++current.genes[pos];
        std::fill(current.genes.begin() + static_cast<std::ptrdiff_t>(pos) + 1,
                  current.genes.end(), 0);
        break;
      }
      if (pos == 0) return result;
    }
    ++result.combinations;
    const double f = fitness(problem, current, bounds);
    if (f < result.best_fitness) {
      result.best_fitness = f;
      result.best_genome = current;
    }
  }
}

}  // namespace qoscompose
