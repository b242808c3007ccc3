#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qoscompose/aggregate.hpp"
#include "qoscompose/qos_model.hpp"
#include "qoscompose/rng.hpp"

namespace qoscompose {

struct ConfigInvalid : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BadCutPoints : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidReplacement : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SfgaConfig {
  int population_size = 50;   // must be divisible by memeplex_count, quotient >= 2
  int memeplex_count = 5;
  int generations = 100;
  double mutation_fraction = 0.3;  // share of each memeplex mutated per generation
  std::uint64_t seed = 0;
  std::optional<int> stall_limit;  // stop after this many generations without improvement
  std::uint64_t max_evaluations = 0;  // 0 = unbounded; checked at generation boundaries
};

struct EvaluatedFrog {
  Genome genome;
  double fitness = 0.0;
};

// One partition cell. Members are population indices in ascending fitness
// order; best_index/worst_index are population indices too.
struct Memeplex {
  std::vector<std::size_t> members;
  std::size_t best_index = 0;
  std::size_t worst_index = 0;
};

// Outcome of one seeded run. The trace holds the best-so-far fitness after
// initialization and after each completed generation, so it is non-increasing
// and its last entry equals best_fitness.
struct RunRecord {
  std::string algorithm;
  std::string instance;
  int level = 0;  // scenario services-per-task level; 0 outside scenarios
  std::uint64_t seed = 0;
  Genome best_genome;
  double best_fitness = 0.0;
  QosTriple best_aggregate;  // raw (T, E, C) of best_genome
  std::vector<double> trace;
  std::uint64_t evaluation_count = 0;
  double wall_time_s = 0.0;
};

// Shared per-run evaluation state: fixed normalization bounds plus the
// evaluation counter every optimizer reports in its RunRecord.
struct EvalContext {
  explicit EvalContext(const CompositionProblem& problem);

  const CompositionProblem* problem;
  ObjectiveBounds bounds;
  std::uint64_t evaluations = 0;

  double evaluate(const Genome& genome);

  // Uniform genome, genes drawn in task order.
  Genome random_genome(Rng& rng) const;
};

// Throws ConfigInvalid on divisibility/size violations.
void check_config(const SfgaConfig& config, const CompositionProblem& problem);

// population_size uniform genomes (task-major draw order), each evaluated.
std::vector<EvaluatedFrog> init_population(const CompositionProblem& problem,
                                           const SfgaConfig& config);
std::vector<EvaluatedFrog> init_population(EvalContext& ctx, const SfgaConfig& config, Rng& rng);

// Ranks the population best-first (ascending fitness, ties by original index)
// and deals sorted position p to memeplex p mod memeplex_count.
std::vector<Memeplex> sort_and_partition(const std::vector<EvaluatedFrog>& population,
                                         int memeplex_count);

// Children equal the parents with genes in the inclusive interval [r1, r2]
// exchanged. Throws BadCutPoints if r1 > r2 or r2 is out of range.
std::pair<Genome, Genome> two_point_crossover(const Genome& parent1, const Genome& parent2,
                                              std::size_t r1, std::size_t r2);

// Copy of the genome with genes[position] set to replacement. Throws
// InvalidReplacement when the position or replacement is out of range.
Genome one_point_mutation(const Genome& genome, std::size_t position, int replacement,
                          const CompositionProblem& problem);

// Crossover fallback chain for one memeplex:
//   stage 1: cross the memeplex best with its worst at two random cut points;
//            if the better child strictly improves on the worst, it replaces it.
//   stage 2: otherwise cross the tracked global best with the worst, same rule.
//   stage 3: otherwise replace the worst with a fresh random frog, always.
// Draws, in order: stage-1 cuts (2), then stage-2 cuts (2) if reached, then
// stage-3 genes (task-major) if reached. global_best is updated by every
// evaluation made here.
void memeplex_crossover_step(EvalContext& ctx, const Memeplex& memeplex,
                             std::vector<EvaluatedFrog>& population, EvaluatedFrog& global_best,
                             Rng& rng);

// floor(|memeplex| * mutation_fraction) one-point mutations. Each event draws
// a member (uniform, excluding the memeplex's current best, fixed at step
// start), a gene position, and a replacement candidate excluding the current
// value when the pool has more than one entry (no replacement draw otherwise).
// Mutants replace their originals unconditionally and are re-evaluated.
void memeplex_mutation_step(EvalContext& ctx, const Memeplex& memeplex,
                            std::vector<EvaluatedFrog>& population, EvaluatedFrog& global_best,
                            double mutation_fraction, Rng& rng);

// The full hybrid loop: init, then per generation sort/partition, the
// crossover step for every memeplex in index order, the mutation step for
// every memeplex in index order, and an implicit shuffle (memeplexes are index
// views over the single population, re-dealt next generation). The global
// best is tracked across all generations in the record even when the
// population drifts away from it.
RunRecord run_sfga(const CompositionProblem& problem, const SfgaConfig& config,
                   std::string_view instance_label = {});

}  // namespace qoscompose
