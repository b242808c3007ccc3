#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qoscompose/qos_model.hpp"

namespace qoscompose {

inline constexpr std::string_view kInstanceSchema = "qoscompose/1";

// Flat list of measured services an instance can be sampled from.
struct ServicePool {
  struct Entry {
    std::string service_id;
    QosTriple qos;
  };
  std::vector<Entry> services;
  std::string source;
};

// A column named either by 0-based index or by header name.
using ColumnRef = std::variant<std::size_t, std::string>;

struct ColumnMap {
  ColumnRef response_time{std::size_t{1}};
  ColumnRef energy{std::size_t{2}};
  ColumnRef cost{std::size_t{3}};
  std::optional<ColumnRef> service_id;  // default: the 1-based row number
};

struct AttributeRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Uniform generation ranges; defaults are the extremes of the worked example
// quality matrix this project's tests are built around.
struct SyntheticSpec {
  AttributeRange response_time{19.0, 90.0};
  AttributeRange energy{33.0, 147.0};
  AttributeRange cost{28.0, 106.0};
  std::size_t size = 0;
  std::uint64_t seed = 0;
};

struct MissingColumn : std::runtime_error {
  explicit MissingColumn(const std::string& column_name);
  std::string name;
};

struct BadNumber : std::runtime_error {
  BadNumber(std::size_t row, std::size_t column, const std::string& text);
  std::size_t row = 0;     // 1-based data row
  std::size_t column = 0;  // 0-based column index
};

struct EmptyFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidSpec : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidShape : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidWeights : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  ParseError(std::size_t position, const std::string& message);
  std::size_t position = 0;  // byte offset where parsing failed
};

struct SchemaVersionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Comma-separated, UTF-8, decimal reals, optional header line.
ServicePool parse_service_pool_csv(std::string_view text, const ColumnMap& columns,
                                   bool has_header, std::string source_label = {});
ServicePool load_service_pool_csv(const std::filesystem::path& path, const ColumnMap& columns,
                                  bool has_header);
std::string pool_to_csv(const ServicePool& pool);

ServicePool generate_synthetic_pool(const SyntheticSpec& spec);

enum class WorkflowShape { Sequence, Mixed };

WorkflowShape parse_workflow_shape(std::string_view name);  // throws InvalidShape

// Deterministic workflow over task_count tasks. Sequence chains all tasks;
// Mixed cycles fork / branch / sequence-with-loop groups so every node kind
// appears on larger instances.
WorkflowNode build_workflow(WorkflowShape shape, int task_count);

// task_count tasks of candidates_per_task services each, drawn from the pool
// without replacement when it is large enough, with replacement otherwise.
CompositionProblem sample_instance(const ServicePool& pool, int task_count,
                                   int candidates_per_task, WorkflowShape shape,
                                   std::array<double, 3> weights, std::uint64_t seed);

// Self-describing JSON document, schema "qoscompose/1"; reals are serialized
// with shortest round-trip precision so read-back is bit-exact.
std::string write_instance(const CompositionProblem& problem, std::string_view name = {});
CompositionProblem read_instance(std::string_view text, std::string* name_out = nullptr);

void save_instance(const CompositionProblem& problem, const std::filesystem::path& path,
                   std::string_view name = {});
CompositionProblem load_instance(const std::filesystem::path& path,
                                 std::string* name_out = nullptr);

}  // namespace qoscompose
