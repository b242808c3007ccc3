#pragma once

#include <stdexcept>

#include "qoscompose/qos_model.hpp"

namespace qoscompose {

struct InvalidGenome : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raw workflow aggregation of the selected services, before normalization.
// Sequence: T and E sum, C multiplies. Loop(k): T and E scale by k, C is the
// child cost to the k-th power. Branch: probability-weighted sum of all three.
// Fork: max T, max E, min C.
QosTriple aggregate_qos(const WorkflowNode& workflow, const CompositionProblem& problem,
                        const Genome& genome);

// Aggregates computed from per-task component-wise extreme candidate values.
// Every aggregation operator is monotone non-decreasing per component, so all
// achievable aggregates lie within [lower, upper]; the bounds themselves may
// be jointly unattainable.
ObjectiveBounds objective_bounds(const CompositionProblem& problem);

// Min-max normalization of each component against the bounds, clamped to
// [0, 1]. A degenerate component (upper == lower) normalizes to 0.
QosTriple normalize_objectives(const QosTriple& raw, const ObjectiveBounds& bounds);

// Scalar objective: weighted sum of the normalized aggregate components.
// Always in [0, 1]; lower is better. Throws InvalidGenome on out-of-range genes.
double fitness(const CompositionProblem& problem, const Genome& genome,
               const ObjectiveBounds& bounds);

}  // namespace qoscompose
