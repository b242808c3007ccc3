#include "qoscompose/instance_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "qoscompose/rng.hpp"

namespace qoscompose {

using nlohmann::json;

MissingColumn::MissingColumn(const std::string& column_name)
    : std::runtime_error("missing column: " + column_name), name(column_name) {}

BadNumber::BadNumber(std::size_t row_number, std::size_t column_index, const std::string& text)
    : std::runtime_error("bad number '" + text + "' at row " + std::to_string(row_number) +
                         ", column " + std::to_string(column_index)),
      row(row_number),
      column(column_index) {}

ParseError::ParseError(std::size_t byte_position, const std::string& message)
    : std::runtime_error("parse error at byte " + std::to_string(byte_position) + ": " + message),
      position(byte_position) {}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::string display_name(const ColumnRef& ref) {
  if (std::holds_alternative<std::size_t>(ref)) return std::to_string(std::get<std::size_t>(ref));
  return std::get<std::string>(ref);
}

std::size_t resolve_column(const ColumnRef& ref, const std::vector<std::string_view>& header,
                           bool has_header) {
  if (std::holds_alternative<std::size_t>(ref)) return std::get<std::size_t>(ref);
  const std::string& name = std::get<std::string>(ref);
  if (!has_header) throw MissingColumn(name);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw MissingColumn(name);
}

double parse_real(std::string_view text, std::size_t row, std::size_t column) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || text.empty() || !std::isfinite(value) || value < 0.0) {
    throw BadNumber(row, column, std::string(text));
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return std::move(out).str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << text;
}

}  // namespace

ServicePool parse_service_pool_csv(std::string_view text, const ColumnMap& columns,
                                   bool has_header, std::string source_label) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    const std::string_view line =
        nl == std::string_view::npos ? text.substr(start) : text.substr(start, nl - start);
    if (!trim(line).empty()) lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }

  std::vector<std::string_view> header;
  std::size_t first_data = 0;
  if (has_header) {
    if (lines.empty()) throw EmptyFile("file has no rows");
    header = split_fields(lines[0]);
    first_data = 1;
  }
  if (lines.size() <= first_data) throw EmptyFile("file has no data rows");

  const std::size_t rt_col = resolve_column(columns.response_time, header, has_header);
  const std::size_t en_col = resolve_column(columns.energy, header, has_header);
  const std::size_t co_col = resolve_column(columns.cost, header, has_header);
  std::optional<std::size_t> id_col;
  if (columns.service_id) id_col = resolve_column(*columns.service_id, header, has_header);

  // Value columns checked in ascending index order so the first offending
  // column of a row is the one reported.
  std::array<std::pair<std::size_t, const ColumnRef*>, 3> value_cols{
      {{rt_col, &columns.response_time}, {en_col, &columns.energy}, {co_col, &columns.cost}}};
  std::sort(value_cols.begin(), value_cols.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  ServicePool pool;
  pool.source = std::move(source_label);
  for (std::size_t r = first_data; r < lines.size(); ++r) {
    const std::size_t row_number = r - first_data + 1;  // 1-based data row
    const std::vector<std::string_view> fields = split_fields(lines[r]);

    for (const auto& [col, ref] : value_cols) {
      if (col >= fields.size()) throw MissingColumn(display_name(*ref));
    }
    if (id_col && *id_col >= fields.size()) throw MissingColumn(display_name(*columns.service_id));

    QosTriple qos;
    for (const auto& [col, ref] : value_cols) {
      const double v = parse_real(fields[col], row_number, col);
      if (ref == &columns.response_time) qos.response_time = v;
      else if (ref == &columns.energy) qos.energy = v;
      else qos.cost = v;
    }
    const std::string id =
        id_col ? std::string(fields[*id_col]) : std::to_string(row_number);
    pool.services.push_back({id, qos});
  }
  return pool;
}

ServicePool load_service_pool_csv(const std::filesystem::path& path, const ColumnMap& columns,
                                  bool has_header) {
  return parse_service_pool_csv(read_file(path), columns, has_header, path.string());
}

std::string pool_to_csv(const ServicePool& pool) {
  std::string out = "id,response_time,energy,cost\n";
  for (const ServicePool::Entry& entry : pool.services) {
    out += entry.service_id;
    out += ',';
    out += format_double(entry.qos.response_time);
    out += ',';
    out += format_double(entry.qos.energy);
    out += ',';
    out += format_double(entry.qos.cost);
    out += '\n';
  }
  return out;
}

ServicePool generate_synthetic_pool(const SyntheticSpec& spec) {
  if (spec.size == 0) throw InvalidSpec("pool size must be positive");
  for (const AttributeRange& range : {spec.response_time, spec.energy, spec.cost}) {
    if (!(std::isfinite(range.lo) && std::isfinite(range.hi)) || range.lo < 0.0 ||
        range.lo > range.hi) {
      throw InvalidSpec("attribute range must satisfy 0 <= lo <= hi");
    }
  }

  Rng rng(spec.seed);
  ServicePool pool;
  pool.source = "synthetic";
  pool.services.reserve(spec.size);
  for (std::size_t i = 0; i < spec.size; ++i) {
    QosTriple qos{rng.uniform_range(spec.response_time.lo, spec.response_time.hi),
                  rng.uniform_range(spec.energy.lo, spec.energy.hi),
                  rng.uniform_range(spec.cost.lo, spec.cost.hi)};
    pool.services.push_back({"syn-" + std::to_string(i), qos});
  }
  return pool;
}

WorkflowShape parse_workflow_shape(std::string_view name) {
  if (name == "sequence") return WorkflowShape::Sequence;
  if (name == "mixed") return WorkflowShape::Mixed;
  throw InvalidShape("unknown workflow shape: " + std::string(name));
}

WorkflowNode build_workflow(WorkflowShape shape, int task_count) {
  if (task_count < 1) throw InvalidSpec("task_count must be positive");
  if (task_count == 1) return WorkflowNode::atomic(0);

  if (shape == WorkflowShape::Sequence) {
    std::vector<WorkflowNode> children;
    children.reserve(static_cast<std::size_t>(task_count));
    for (int t = 0; t < task_count; ++t) children.push_back(WorkflowNode::atomic(t));
    return WorkflowNode::sequence(std::move(children));
  }

  // Mixed: pair tasks into fork / branch / loop groups, cycling the patterns.
  std::vector<WorkflowNode> chunks;
  int t = 0;
  for (int c = 0; t + 1 < task_count; ++c, t += 2) {
    switch (c % 3) {
      case 0:
        chunks.push_back(WorkflowNode::fork({WorkflowNode::atomic(t), WorkflowNode::atomic(t + 1)}));
        break;
      case 1:
        chunks.push_back(WorkflowNode::branch(
            {WorkflowNode::atomic(t), WorkflowNode::atomic(t + 1)}, {0.6, 0.4}));
        break;
      default:
        chunks.push_back(WorkflowNode::sequence(
            {WorkflowNode::atomic(t), WorkflowNode::loop(WorkflowNode::atomic(t + 1), 2)}));
        break;
    }
  }
  if (t < task_count) chunks.push_back(WorkflowNode::atomic(t));
  if (chunks.size() == 1) return std::move(chunks.front());
  return WorkflowNode::sequence(std::move(chunks));
}

CompositionProblem sample_instance(const ServicePool& pool, int task_count,
                                   int candidates_per_task, WorkflowShape shape,
                                   std::array<double, 3> weights, std::uint64_t seed) {
  if (pool.services.empty()) throw InvalidSpec("service pool is empty");
  if (task_count < 1 || candidates_per_task < 1) {
    throw InvalidSpec("task_count and candidates_per_task must be positive");
  }
  double weight_sum = 0.0;
  for (const double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw InvalidWeights("weights must be non-negative");
    weight_sum += w;
  }
  if (std::abs(weight_sum - 1.0) > kWeightTolerance) {
    throw InvalidWeights("weights must sum to 1, got " + std::to_string(weight_sum));
  }

  Rng rng(seed);
  const std::size_t need =
      static_cast<std::size_t>(task_count) * static_cast<std::size_t>(candidates_per_task);
  std::vector<std::size_t> picks;
  picks.reserve(need);
  if (pool.services.size() >= need) {
    // Without replacement: partial Fisher-Yates over the pool indices.
    std::vector<std::size_t> indices(pool.services.size());
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    for (std::size_t i = 0; i < need; ++i) {
      const std::size_t j = i + rng.uniform_index(indices.size() - i);
      std::swap(indices[i], indices[j]);
      picks.push_back(indices[i]);
    }
  } else {
    for (std::size_t i = 0; i < need; ++i) picks.push_back(rng.uniform_index(pool.services.size()));
  }

  CompositionProblem problem;
  problem.weights = weights;
  problem.tasks.resize(static_cast<std::size_t>(task_count));
  for (int t = 0; t < task_count; ++t) {
    TaskClass& task = problem.tasks[static_cast<std::size_t>(t)];
    task.index = t;
    task.candidates.reserve(static_cast<std::size_t>(candidates_per_task));
    for (int c = 0; c < candidates_per_task; ++c) {
      const ServicePool::Entry& entry =
          pool.services[picks[static_cast<std::size_t>(t) * candidates_per_task + c]];
      task.candidates.push_back({t, c, entry.qos, entry.service_id});
    }
  }
  problem.workflow = build_workflow(shape, task_count);
  return problem;
}

namespace {

json node_to_json(const WorkflowNode& node) {
  json j;
  switch (node.kind) {
    case WorkflowNode::Kind::Atomic:
      j["kind"] = "atomic";
      j["task"] = node.task_index;
      break;
    case WorkflowNode::Kind::Sequence: {
      j["kind"] = "sequence";
      json children = json::array();
      for (const WorkflowNode& child : node.children) children.push_back(node_to_json(child));
      j["children"] = std::move(children);
      break;
    }
    case WorkflowNode::Kind::Loop:
      j["kind"] = "loop";
      j["k"] = node.loop_count;
      j["child"] = node_to_json(node.children.front());
      break;
    case WorkflowNode::Kind::Branch: {
      j["kind"] = "branch";
      j["probabilities"] = node.probabilities;
      json children = json::array();
      for (const WorkflowNode& child : node.children) children.push_back(node_to_json(child));
      j["children"] = std::move(children);
      break;
    }
    case WorkflowNode::Kind::Fork: {
      j["kind"] = "fork";
      json children = json::array();
      for (const WorkflowNode& child : node.children) children.push_back(node_to_json(child));
      j["children"] = std::move(children);
      break;
    }
  }
  return j;
}

WorkflowNode node_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "atomic") {
    return WorkflowNode::atomic(j.at("task").get<int>());
  }
  if (kind == "loop") {
    return WorkflowNode::loop(node_from_json(j.at("child")), j.at("k").get<int>());
  }
  std::vector<WorkflowNode> children;
  for (const json& child : j.at("children")) children.push_back(node_from_json(child));
  if (kind == "sequence") return WorkflowNode::sequence(std::move(children));
  if (kind == "fork") return WorkflowNode::fork(std::move(children));
  if (kind == "branch") {
    return WorkflowNode::branch(std::move(children),
                                j.at("probabilities").get<std::vector<double>>());
  }
  throw ParseError(0, "unknown workflow node kind: " + kind);
}

}  // namespace

std::string write_instance(const CompositionProblem& problem, std::string_view name) {
  json doc;
  doc["schema"] = kInstanceSchema;
  if (!name.empty()) doc["name"] = name;
  doc["weights"] = problem.weights;

  json tasks = json::array();
  for (const TaskClass& task : problem.tasks) {
    json candidates = json::array();
    for (const CandidateService& cand : task.candidates) {
      candidates.push_back(
          {{"id", cand.service_id},
           {"qos", {cand.qos.response_time, cand.qos.energy, cand.qos.cost}}});
    }
    tasks.push_back({{"candidates", std::move(candidates)}});
  }
  doc["tasks"] = std::move(tasks);
  doc["workflow"] = node_to_json(problem.workflow);
  return doc.dump(2) + "\n";
}

CompositionProblem read_instance(std::string_view text, std::string* name_out) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.byte, e.what());
  }

  try {
    if (!doc.is_object() || !doc.contains("schema") || !doc["schema"].is_string()) {
      throw SchemaVersionMismatch("missing schema tag");
    }
    if (doc["schema"].get<std::string>() != kInstanceSchema) {
      throw SchemaVersionMismatch("unsupported schema '" + doc["schema"].get<std::string>() +
                                  "', expected '" + std::string(kInstanceSchema) + "'");
    }
    if (name_out) {
      *name_out = doc.contains("name") ? doc["name"].get<std::string>() : std::string{};
    }

    CompositionProblem problem;
    const auto weights = doc.at("weights").get<std::vector<double>>();
    if (weights.size() != 3) throw ParseError(0, "weights must have exactly 3 entries");
    std::copy(weights.begin(), weights.end(), problem.weights.begin());

    int t = 0;
    for (const json& jtask : doc.at("tasks")) {
      TaskClass task;
      task.index = t;
      int c = 0;
      for (const json& jcand : jtask.at("candidates")) {
        const auto qos = jcand.at("qos").get<std::vector<double>>();
        if (qos.size() != 3) throw ParseError(0, "qos must have exactly 3 entries");
        task.candidates.push_back(
            {t, c, QosTriple{qos[0], qos[1], qos[2]}, jcand.at("id").get<std::string>()});
        ++c;
      }
      problem.tasks.push_back(std::move(task));
      ++t;
    }
    problem.workflow = node_from_json(doc.at("workflow"));
    return problem;
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
}

void save_instance(const CompositionProblem& problem, const std::filesystem::path& path,
                   std::string_view name) {
  write_file(path, write_instance(problem, name));
}

CompositionProblem load_instance(const std::filesystem::path& path, std::string* name_out) {
  return read_instance(read_file(path), name_out);
}

}  // namespace qoscompose
