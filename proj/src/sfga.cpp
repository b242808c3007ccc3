#include "qoscompose/sfga.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace qoscompose {

EvalContext::EvalContext(const CompositionProblem& p)
    : problem(&p), bounds(objective_bounds(p)) {}

double EvalContext::evaluate(const Genome& genome) {
  ++evaluations;
  return fitness(*problem, genome, bounds);
}

Genome EvalContext::random_genome(Rng& rng) const {
  Genome g;
  g.genes.reserve(problem->tasks.size());
  for (const TaskClass& task : problem->tasks) {
    g.genes.push_back(static_cast<int>(rng.uniform_index(task.candidates.size())));
  }
  return g;
}

void check_config(const SfgaConfig& config, const CompositionProblem& problem) {
  if (problem.tasks.empty()) throw ConfigInvalid("problem has no tasks");
  if (config.population_size < 1) throw ConfigInvalid("population_size must be positive");
  if (config.memeplex_count < 1) throw ConfigInvalid("memeplex_count must be positive");
  if (config.generations < 1) throw ConfigInvalid("generations must be positive");
  if (config.population_size % config.memeplex_count != 0) {
    throw ConfigInvalid("population_size must be divisible by memeplex_count");
  }
  if (config.population_size / config.memeplex_count < 2) {
    throw ConfigInvalid("each memeplex needs at least 2 frogs");
  }
  if (!(config.mutation_fraction >= 0.0 && config.mutation_fraction <= 1.0)) {
    throw ConfigInvalid("mutation_fraction must be in [0, 1]");
  }
  if (config.stall_limit && *config.stall_limit < 1) {
    throw ConfigInvalid("stall_limit must be positive when set");
  }
}

std::vector<EvaluatedFrog> init_population(EvalContext& ctx, const SfgaConfig& config, Rng& rng) {
  std::vector<EvaluatedFrog> population;
  population.reserve(static_cast<std::size_t>(config.population_size));
  for (int i = 0; i < config.population_size; ++i) {
    Genome g = ctx.random_genome(rng);
    const double f = ctx.evaluate(g);
    population.push_back({std::move(g), f});
  }
  return population;
}

std::vector<EvaluatedFrog> init_population(const CompositionProblem& problem,
                                           const SfgaConfig& config) {
  check_config(config, problem);
  EvalContext ctx(problem);
  Rng rng(config.seed);
  return init_population(ctx, config, rng);
}

std::vector<Memeplex> sort_and_partition(const std::vector<EvaluatedFrog>& population,
                                         int memeplex_count) {
  const std::size_t n = population.size();
  const std::size_t m = static_cast<std::size_t>(memeplex_count);
  if (m == 0 || n % m != 0) {
    throw ConfigInvalid("population size must be a positive multiple of memeplex_count");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (population[a].fitness != population[b].fitness) {
      return population[a].fitness < population[b].fitness;
    }
    return a < b;  // stable tie-break on original index
  });

  std::vector<Memeplex> memeplexes(m);
  for (Memeplex& mp : memeplexes) mp.members.reserve(n / m);
  for (std::size_t p = 0; p < n; ++p) {
    memeplexes[p % m].members.push_back(order[p]);
  }
  for (Memeplex& mp : memeplexes) {
    mp.best_index = mp.members.front();   // members are in ascending fitness order
    mp.worst_index = mp.members.back();
  }
  return memeplexes;
}

std::pair<Genome, Genome> two_point_crossover(const Genome& parent1, const Genome& parent2,
                                              std::size_t r1, std::size_t r2) {
  const std::size_t len = parent1.genes.size();
  if (parent2.genes.size() != len) throw BadCutPoints("parents have different lengths");
  if (r1 > r2 || r2 >= len) throw BadCutPoints("cut points must satisfy r1 <= r2 < genome length");

  Genome child1 = parent1;
  Genome child2 = parent2;
  for (std::size_t i = r1; i <= r2; ++i) {
    std::swap(child1.genes[i], child2.genes[i]);
  }
  return {std::move(child1), std::move(child2)};
}

Genome one_point_mutation(const Genome& genome, std::size_t position, int replacement,
                          const CompositionProblem& problem) {
  if (position >= genome.genes.size()) throw InvalidReplacement("mutation position out of range");
  const std::size_t pool = problem.tasks[position].candidates.size();
  if (replacement < 0 || static_cast<std::size_t>(replacement) >= pool) {
    throw InvalidReplacement("replacement candidate out of range");
  }
  Genome mutant = genome;
  mutant.genes[position] = replacement;
  return mutant;
}

namespace {

void track_best(EvaluatedFrog& global_best, const Genome& genome, double fitness_value) {
  if (fitness_value < global_best.fitness) {
    global_best.genome = genome;
    global_best.fitness = fitness_value;
  }
}

// Two cut points: two independent position draws, ordered. r1 == r2 allowed.
std::pair<std::size_t, std::size_t> draw_cut_points(Rng& rng, std::size_t len) {
  const std::size_t a = rng.uniform_index(len);
  const std::size_t b = rng.uniform_index(len);
  return {std::min(a, b), std::max(a, b)};
}

// Crosses parent with the worst frog; returns true (and replaces the worst)
// when the better child strictly improves on it.
bool try_crossover_replace(EvalContext& ctx, const Genome& parent,
                           std::vector<EvaluatedFrog>& population, std::size_t worst,
                           EvaluatedFrog& global_best, Rng& rng) {
  const auto [r1, r2] = draw_cut_points(rng, parent.genes.size());
  auto [child1, child2] = two_point_crossover(parent, population[worst].genome, r1, r2);
  const double f1 = ctx.evaluate(child1);
  const double f2 = ctx.evaluate(child2);
  track_best(global_best, child1, f1);
  track_best(global_best, child2, f2);

  Genome& better = f1 <= f2 ? child1 : child2;
  const double better_fitness = std::min(f1, f2);
  if (better_fitness < population[worst].fitness) {
    population[worst] = {std::move(better), better_fitness};
    return true;
  }
  return false;
}

}  // namespace

void memeplex_crossover_step(EvalContext& ctx, const Memeplex& memeplex,
                             std::vector<EvaluatedFrog>& population, EvaluatedFrog& global_best,
                             Rng& rng) {
  const std::size_t worst = memeplex.worst_index;

  if (try_crossover_replace(ctx, population[memeplex.best_index].genome, population, worst,
                            global_best, rng)) {
    return;
  }
  if (try_crossover_replace(ctx, global_best.genome, population, worst, global_best, rng)) {
    return;
  }
  Genome fresh = ctx.random_genome(rng);
  const double f = ctx.evaluate(fresh);
  track_best(global_best, fresh, f);
  population[worst] = {std::move(fresh), f};
}

void memeplex_mutation_step(EvalContext& ctx, const Memeplex& memeplex,
                            std::vector<EvaluatedFrog>& population, EvaluatedFrog& global_best,
                            double mutation_fraction, Rng& rng) {
  const std::size_t size = memeplex.members.size();
  const auto events =
      static_cast<std::size_t>(std::floor(static_cast<double>(size) * mutation_fraction));
  if (events == 0) return;

  // The protected slot is the memeplex's best at step start; the crossover
  // step may have moved the actual best into the worst slot.
  std::size_t protected_pos = 0;
  for (std::size_t p = 1; p < size; ++p) {
    if (population[memeplex.members[p]].fitness <
        population[memeplex.members[protected_pos]].fitness) {
      protected_pos = p;
    }
  }

  for (std::size_t e = 0; e < events; ++e) {
    std::size_t pos = rng.uniform_index(size - 1);
    if (pos >= protected_pos) ++pos;
    const std::size_t member = memeplex.members[pos];

    const Genome& current = population[member].genome;
    const std::size_t position = rng.uniform_index(current.genes.size());
    const std::size_t pool = ctx.problem->tasks[position].candidates.size();
    int replacement = current.genes[position];
    if (pool > 1) {
      auto v = static_cast<int>(rng.uniform_index(pool - 1));
      if (v >= replacement) ++v;
      replacement = v;
    }

    Genome mutant = one_point_mutation(current, position, replacement, *ctx.problem);
    const double f = ctx.evaluate(mutant);
    track_best(global_best, mutant, f);
    population[member] = {std::move(mutant), f};
  }
}

RunRecord run_sfga(const CompositionProblem& problem, const SfgaConfig& config,
                   std::string_view instance_label) {
  check_config(config, problem);
  const auto started = std::chrono::steady_clock::now();

  EvalContext ctx(problem);
  Rng rng(config.seed);
  std::vector<EvaluatedFrog> population = init_population(ctx, config, rng);

  EvaluatedFrog global_best = population.front();
  for (const EvaluatedFrog& frog : population) {
    if (frog.fitness < global_best.fitness) global_best = frog;
  }

  RunRecord record;
  record.algorithm = "sfga";
  record.instance = std::string(instance_label);
  record.seed = config.seed;
  record.trace.push_back(global_best.fitness);

  int stall = 0;
  for (int gen = 0; gen < config.generations; ++gen) {
    if (config.max_evaluations != 0 && ctx.evaluations >= config.max_evaluations) break;

    const double previous_best = global_best.fitness;
    const std::vector<Memeplex> memeplexes = sort_and_partition(population, config.memeplex_count);
    for (const Memeplex& mp : memeplexes) {
      memeplex_crossover_step(ctx, mp, population, global_best, rng);
    }
    for (const Memeplex& mp : memeplexes) {
      memeplex_mutation_step(ctx, mp, population, global_best, config.mutation_fraction, rng);
    }
    record.trace.push_back(global_best.fitness);

    if (global_best.fitness < previous_best) {
      stall = 0;
    } else if (config.stall_limit && ++stall >= *config.stall_limit) {
      break;
    }
  }

  record.best_genome = global_best.genome;
  record.best_fitness = global_best.fitness;
  record.best_aggregate = aggregate_qos(problem.workflow, problem, global_best.genome);
  record.evaluation_count = ctx.evaluations;
  record.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return record;
}

}  // namespace qoscompose
