#pragma once

#include <array>
#include <compare>
#include <string>
#include <vector>

namespace qoscompose {

inline constexpr double kWeightTolerance = 1e-9;
inline constexpr double kProbabilityTolerance = 1e-9;

// One (response time, energy, cost) measurement. All three attributes are
// negative QoS factors: lower is better.
struct QosTriple {
  double response_time = 0.0;  // milliseconds
  double energy = 0.0;         // abstract energy units
  double cost = 0.0;           // abstract currency units

  friend bool operator==(const QosTriple&, const QosTriple&) = default;
};

// Concrete service fulfilling one abstract task.
struct CandidateService {
  int task_index = 0;
  int candidate_index = 0;
  QosTriple qos;
  std::string service_id;

  friend bool operator==(const CandidateService&, const CandidateService&) = default;
};

// Abstract task with its interchangeable candidate pool.
struct TaskClass {
  int index = 0;
  std::vector<CandidateService> candidates;  // non-empty, indexed 0..len-1

  friend bool operator==(const TaskClass&, const TaskClass&) = default;
};

// Workflow structure over the tasks. A single tagged node type keeps the tree
// a plain value; fields not used by a node's kind stay at their defaults.
struct WorkflowNode {
  enum class Kind { Atomic, Sequence, Loop, Branch, Fork };

  Kind kind = Kind::Atomic;
  int task_index = 0;                  // Atomic
  int loop_count = 1;                  // Loop, k >= 1
  std::vector<double> probabilities;   // Branch, one per child, sums to 1
  std::vector<WorkflowNode> children;  // Sequence/Branch/Fork; Loop has exactly one

  static WorkflowNode atomic(int task_index);
  static WorkflowNode sequence(std::vector<WorkflowNode> children);
  static WorkflowNode loop(WorkflowNode child, int k);
  static WorkflowNode branch(std::vector<WorkflowNode> children, std::vector<double> probabilities);
  static WorkflowNode fork(std::vector<WorkflowNode> children);

  friend bool operator==(const WorkflowNode&, const WorkflowNode&) = default;
};

// A full service-composition instance: one candidate pool per task, a
// workflow tree referencing every task exactly once, and objective weights
// summing to 1.
struct CompositionProblem {
  std::vector<TaskClass> tasks;
  WorkflowNode workflow;
  std::array<double, 3> weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  friend bool operator==(const CompositionProblem&, const CompositionProblem&) = default;
};

// One candidate selection per task; the unit of search ("frog").
struct Genome {
  std::vector<int> genes;

  friend auto operator<=>(const Genome&, const Genome&) = default;
};

// Fixed per-problem normalization reference. lower <= upper component-wise;
// every achievable aggregate lies inside.
struct ObjectiveBounds {
  QosTriple lower;
  QosTriple upper;

  friend bool operator==(const ObjectiveBounds&, const ObjectiveBounds&) = default;
};

enum class ViolationKind {
  EmptyCandidates,
  BadProbabilitySum,
  WeightSumMismatch,
  DanglingTaskIndex,
  DuplicateTask,
  MissingTask,
  BadProbability,
  BadLoopCount,
  BadQos,
  BadCandidateIndex,
  BadTaskIndex,
  BadWeight,
  EmptyNode,
};

struct Violation {
  ViolationKind kind;
  std::string field;  // the offending field, e.g. "tasks[2]" or "workflow.branch"
  double value = 0.0; // numeric payload where meaningful (a sum, an index, ...)
};

std::string to_string(ViolationKind kind);
std::string describe(const Violation& violation);

// Checks every structural invariant; an empty result means the problem is valid.
std::vector<Violation> validate_problem(const CompositionProblem& problem);
bool is_valid_problem(const CompositionProblem& problem);

// True iff the genome has one in-range gene per task.
bool genome_in_range(const CompositionProblem& problem, const Genome& genome);

}  // namespace qoscompose
