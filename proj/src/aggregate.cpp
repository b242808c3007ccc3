#include "qoscompose/aggregate.hpp"

#include <algorithm>
#include <limits>

namespace qoscompose {

namespace {

// Integer power by squaring; exact for small integer results, unlike
// std::pow, and bounded-cost for arbitrary loop counts.
double pow_int(double base, int exponent) {
  double result = 1.0;
  double factor = base;
  for (auto e = static_cast<unsigned>(exponent); e != 0; e >>= 1) {
    if (e & 1u) result *= factor;
    factor *= factor;
  }
  return result;
}

// Walks the tree once; `leaf` supplies the triple contributed by a task.
template <typename LeafFn>
QosTriple aggregate_over(const WorkflowNode& node, const LeafFn& leaf) {
  switch (node.kind) {
    case WorkflowNode::Kind::Atomic:
      return leaf(node.task_index);
    case WorkflowNode::Kind::Sequence: {
      QosTriple acc{0.0, 0.0, 1.0};
      for (const WorkflowNode& child : node.children) {
        const QosTriple c = aggregate_over(child, leaf);
        acc.response_time += c.response_time;
        acc.energy += c.energy;
        acc.cost *= c.cost;
      }
      return acc;
    }
    case WorkflowNode::Kind::Loop: {
      const QosTriple c = aggregate_over(node.children.front(), leaf);
      const double k = static_cast<double>(node.loop_count);
      return {k * c.response_time, k * c.energy, pow_int(c.cost, node.loop_count)};
    }
    case WorkflowNode::Kind::Branch: {
      QosTriple acc{0.0, 0.0, 0.0};
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        const QosTriple c = aggregate_over(node.children[i], leaf);
        const double p = node.probabilities[i];
        acc.response_time += p * c.response_time;
        acc.energy += p * c.energy;
        acc.cost += p * c.cost;
      }
      return acc;
    }
    case WorkflowNode::Kind::Fork: {
      QosTriple acc{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
                    std::numeric_limits<double>::max()};
      for (const WorkflowNode& child : node.children) {
        const QosTriple c = aggregate_over(child, leaf);
        acc.response_time = std::max(acc.response_time, c.response_time);
        acc.energy = std::max(acc.energy, c.energy);
        acc.cost = std::min(acc.cost, c.cost);
      }
      return acc;
    }
  }
  return {};
}

}  // namespace

QosTriple aggregate_qos(const WorkflowNode& workflow, const CompositionProblem& problem,
                        const Genome& genome) {
  if (!genome_in_range(problem, genome)) {
    throw InvalidGenome("genome does not match the problem's task/candidate ranges");
  }
  return aggregate_over(workflow, [&](int task) {
    return problem.tasks[static_cast<std::size_t>(task)]
        .candidates[static_cast<std::size_t>(genome.genes[static_cast<std::size_t>(task)])]
        .qos;
  });
}

ObjectiveBounds objective_bounds(const CompositionProblem& problem) {
  const std::size_t m = problem.tasks.size();
  std::vector<QosTriple> lows(m), highs(m);
  for (std::size_t t = 0; t < m; ++t) {
    QosTriple lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
                 std::numeric_limits<double>::max()};
    QosTriple hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
                 std::numeric_limits<double>::lowest()};
    for (const CandidateService& cand : problem.tasks[t].candidates) {
      lo.response_time = std::min(lo.response_time, cand.qos.response_time);
      lo.energy = std::min(lo.energy, cand.qos.energy);
      lo.cost = std::min(lo.cost, cand.qos.cost);
      hi.response_time = std::max(hi.response_time, cand.qos.response_time);
      hi.energy = std::max(hi.energy, cand.qos.energy);
      hi.cost = std::max(hi.cost, cand.qos.cost);
    }
    lows[t] = lo;
    highs[t] = hi;
  }
  ObjectiveBounds bounds;
  bounds.lower = aggregate_over(problem.workflow, [&](int task) { return lows[static_cast<std::size_t>(task)]; });
  bounds.upper = aggregate_over(problem.workflow, [&](int task) { return highs[static_cast<std::size_t>(task)]; });
  return bounds;
}

namespace {

double normalize_component(double v, double lo, double hi) {
  if (hi == lo) return 0.0;
  return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
}

}  // namespace

QosTriple normalize_objectives(const QosTriple& raw, const ObjectiveBounds& bounds) {
  return {normalize_component(raw.response_time, bounds.lower.response_time, bounds.upper.response_time),
          normalize_component(raw.energy, bounds.lower.energy, bounds.upper.energy),
          normalize_component(raw.cost, bounds.lower.cost, bounds.upper.cost)};
}

double fitness(const CompositionProblem& problem, const Genome& genome,
               const ObjectiveBounds& bounds) {
  const QosTriple normalized = normalize_objectives(aggregate_qos(problem.workflow, problem, genome), bounds);
  return problem.weights[0] * normalized.response_time + problem.weights[1] * normalized.energy +
         problem.weights[2] * normalized.cost;
}

}  // namespace qoscompose
