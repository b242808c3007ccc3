#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qoscompose/sfga.hpp"

namespace qoscompose {

enum class BaselineAlgorithm { Ga, Pso, Ca, Gapso, Brute };

std::string to_string(BaselineAlgorithm algorithm);

struct BaselineConfig {
  BaselineAlgorithm algorithm = BaselineAlgorithm::Ga;
  int population_size = 50;
  int generations = 100;
  std::uint64_t seed = 0;
  std::uint64_t max_evaluations = 0;  // 0 = unbounded; checked at generation boundaries

  // GA knobs (also used by the GA phase of GAPSO)
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;
  int tournament_size = 2;

  // PSO knobs (also used by the PSO phase of GAPSO)
  double inertia = 0.7;
  double cognitive = 1.4;
  double social = 1.4;

  // CA knob
  double acceptance_fraction = 0.2;
};

// Generational GA: one-elite survival, tournament selection, the same
// two-point crossover and one-point mutation operators as the hybrid engine.
RunRecord run_ga(const CompositionProblem& problem, const BaselineConfig& config,
                 std::string_view instance_label = {});

// Discrete PSO: one real-valued position per gene in [0, pool-1], classic
// inertia/cognitive/social velocity update, decode by round-and-clamp,
// global-best topology with asynchronous best updates.
RunRecord run_pso(const CompositionProblem& problem, const BaselineConfig& config,
                  std::string_view instance_label = {});

// Cultural algorithm: situational knowledge (best genome) plus per-gene
// normative index intervals from the top acceptance fraction; new individuals
// sample genes inside the normative interval, with a small fixed exploration
// probability of drawing from the full pool.
RunRecord run_ca(const CompositionProblem& problem, const BaselineConfig& config,
                 std::string_view instance_label = {});

// Alternates one PSO iteration and one GA generation on a shared
// position-encoded population.
RunRecord run_gapso(const CompositionProblem& problem, const BaselineConfig& config,
                    std::string_view instance_label = {});

RunRecord run_baseline(const CompositionProblem& problem, const BaselineConfig& config,
                       std::string_view instance_label = {});

struct TooLarge : std::runtime_error {
  TooLarge(std::uint64_t total_combinations, std::uint64_t cap);
  std::uint64_t total = 0;
  std::uint64_t cap = 0;
};

struct BruteForceResult {
  Genome best_genome;  // first optimum in lexicographic enumeration order
  double best_fitness = 0.0;
  std::uint64_t combinations = 0;
};

// Exhaustive enumeration of every genome, lexicographic (last gene fastest).
// Throws TooLarge when the product of pool sizes exceeds combo_cap.
BruteForceResult brute_force_optimum(const CompositionProblem& problem,
                                     std::uint64_t combo_cap = 1'000'000);

}  // namespace qoscompose
