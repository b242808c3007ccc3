#include "qoscompose/qos_model.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>

namespace qoscompose {

WorkflowNode WorkflowNode::atomic(int task_index) {
  WorkflowNode node;
  node.kind = Kind::Atomic;
  node.task_index = task_index;
  return node;
}

WorkflowNode WorkflowNode::sequence(std::vector<WorkflowNode> children) {
  WorkflowNode node;
  node.kind = Kind::Sequence;
  node.children = std::move(children);
  return node;
}

WorkflowNode WorkflowNode::loop(WorkflowNode child, int k) {
  WorkflowNode node;
  node.kind = Kind::Loop;
  node.loop_count = k;
  node.children.push_back(std::move(child));
  return node;
}

WorkflowNode WorkflowNode::branch(std::vector<WorkflowNode> children, std::vector<double> probabilities) {
  WorkflowNode node;
  node.kind = Kind::Branch;
  node.children = std::move(children);
  node.probabilities = std::move(probabilities);
  return node;
}

WorkflowNode WorkflowNode::fork(std::vector<WorkflowNode> children) {
  WorkflowNode node;
  node.kind = Kind::Fork;
  node.children = std::move(children);
  return node;
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::EmptyCandidates: return "EmptyCandidates";
    case ViolationKind::BadProbabilitySum: return "BadProbabilitySum";
    case ViolationKind::WeightSumMismatch: return "WeightSumMismatch";
    case ViolationKind::DanglingTaskIndex: return "DanglingTaskIndex";
    case ViolationKind::DuplicateTask: return "DuplicateTask";
    case ViolationKind::MissingTask: return "MissingTask";
    case ViolationKind::BadProbability: return "BadProbability";
    case ViolationKind::BadLoopCount: return "BadLoopCount";
    case ViolationKind::BadQos: return "BadQos";
    case ViolationKind::BadCandidateIndex: return "BadCandidateIndex";
    case ViolationKind::BadTaskIndex: return "BadTaskIndex";
    case ViolationKind::BadWeight: return "BadWeight";
    case ViolationKind::EmptyNode: return "EmptyNode";
  }
  return "Unknown";
}

std::string describe(const Violation& violation) {
  return to_string(violation.kind) + " at " + violation.field + " (value " +
         std::to_string(violation.value) + ")";
}

namespace {

bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

void check_node(const WorkflowNode& node, const std::string& path, std::size_t task_count,
                std::vector<int>& tree_uses, std::vector<Violation>& out) {
  switch (node.kind) {
    case WorkflowNode::Kind::Atomic: {
      if (node.task_index < 0 || static_cast<std::size_t>(node.task_index) >= task_count) {
        out.push_back({ViolationKind::DanglingTaskIndex, path, static_cast<double>(node.task_index)});
      } else {
        ++tree_uses[static_cast<std::size_t>(node.task_index)];
      }
      return;
    }
    case WorkflowNode::Kind::Loop: {
      if (node.loop_count < 1) {
        out.push_back({ViolationKind::BadLoopCount, path, static_cast<double>(node.loop_count)});
      }
      if (node.children.size() != 1) {
        out.push_back({ViolationKind::EmptyNode, path, static_cast<double>(node.children.size())});
      } else {
        check_node(node.children[0], path + ".loop", task_count, tree_uses, out);
      }
      return;
    }
    case WorkflowNode::Kind::Branch: {
      if (node.children.empty()) {
        out.push_back({ViolationKind::EmptyNode, path, 0.0});
        return;
      }
      if (node.probabilities.size() != node.children.size()) {
        out.push_back({ViolationKind::BadProbability, path,
                       static_cast<double>(node.probabilities.size())});
      } else {
        double sum = 0.0;
        for (std::size_t i = 0; i < node.probabilities.size(); ++i) {
          const double p = node.probabilities[i];
          if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            out.push_back({ViolationKind::BadProbability, path + ".p[" + std::to_string(i) + "]", p});
          }
          sum += p;
        }
        if (std::abs(sum - 1.0) > kProbabilityTolerance) {
          out.push_back({ViolationKind::BadProbabilitySum, path, sum});
        }
      }
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        check_node(node.children[i], path + ".branch[" + std::to_string(i) + "]", task_count,
                   tree_uses, out);
      }
      return;
    }
    case WorkflowNode::Kind::Sequence:
    case WorkflowNode::Kind::Fork: {
      const char* tag = node.kind == WorkflowNode::Kind::Sequence ? ".seq[" : ".fork[";
      if (node.children.empty()) {
        out.push_back({ViolationKind::EmptyNode, path, 0.0});
        return;
      }
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        check_node(node.children[i], path + tag + std::to_string(i) + "]", task_count, tree_uses, out);
      }
      return;
    }
  }
}

}  // namespace

std::vector<Violation> validate_problem(const CompositionProblem& problem) {
  std::vector<Violation> out;

  for (std::size_t t = 0; t < problem.tasks.size(); ++t) {
    const TaskClass& task = problem.tasks[t];
    const std::string where = "tasks[" + std::to_string(t) + "]";
    if (task.index != static_cast<int>(t)) {
      out.push_back({ViolationKind::BadTaskIndex, where, static_cast<double>(task.index)});
    }
    if (task.candidates.empty()) {
      out.push_back({ViolationKind::EmptyCandidates, where, static_cast<double>(t)});
      continue;
    }
    for (std::size_t c = 0; c < task.candidates.size(); ++c) {
      const CandidateService& cand = task.candidates[c];
      const std::string cwhere = where + ".candidates[" + std::to_string(c) + "]";
      if (cand.task_index != static_cast<int>(t) || cand.candidate_index != static_cast<int>(c)) {
        out.push_back({ViolationKind::BadCandidateIndex, cwhere, static_cast<double>(cand.candidate_index)});
      }
      if (!finite_non_negative(cand.qos.response_time) || !finite_non_negative(cand.qos.energy) ||
          !finite_non_negative(cand.qos.cost)) {
        out.push_back({ViolationKind::BadQos, cwhere, 0.0});
      }
    }
  }

  double weight_sum = 0.0;
  for (std::size_t i = 0; i < problem.weights.size(); ++i) {
    const double w = problem.weights[i];
    if (!finite_non_negative(w)) {
      out.push_back({ViolationKind::BadWeight, "weights[" + std::to_string(i) + "]", w});
    }
    weight_sum += w;
  }
  if (std::abs(weight_sum - 1.0) > kWeightTolerance) {
    out.push_back({ViolationKind::WeightSumMismatch, "weights", weight_sum});
  }

  std::vector<int> tree_uses(problem.tasks.size(), 0);
  check_node(problem.workflow, "workflow", problem.tasks.size(), tree_uses, out);
  for (std::size_t t = 0; t < tree_uses.size(); ++t) {
    if (tree_uses[t] > 1) {
      out.push_back({ViolationKind::DuplicateTask, "tasks[" + std::to_string(t) + "]",
                     static_cast<double>(tree_uses[t])});
    } else if (tree_uses[t] == 0) {
      out.push_back({ViolationKind::MissingTask, "tasks[" + std::to_string(t) + "]",
                     static_cast<double>(t)});
    }
  }

  return out;
}

bool is_valid_problem(const CompositionProblem& problem) {
  return validate_problem(problem).empty();
}

bool genome_in_range(const CompositionProblem& problem, const Genome& genome) {
  if (genome.genes.size() != problem.tasks.size()) return false;
  for (std::size_t t = 0; t < genome.genes.size(); ++t) {
    const int g = genome.genes[t];
    if (g < 0 || static_cast<std::size_t>(g) >= problem.tasks[t].candidates.size()) return false;
  }
  return true;
}

}  // namespace qoscompose
