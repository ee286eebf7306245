#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fluxq/flux.hpp"
#include "fluxq/projection.hpp"
#include "fluxq/schema.hpp"
#include "fluxq/xml.hpp"

namespace fluxq {

/// High-water marks and lifecycle counts of one buffer owner.
struct BufferRecord {
  std::string var;
  std::size_t events_hwm = 0;
  std::size_t bytes_hwm = 0;
  std::size_t fills = 0;   // scopes in which the buffer was initialized
  std::size_t frees = 0;
  std::size_t appended = 0;  // events ever appended
};

struct RunStats {
  std::vector<BufferRecord> buffers;
  /// Largest number of events (bytes) held by all live buffers together.
  std::size_t total_events_hwm = 0;
  std::size_t total_bytes_hwm = 0;
  std::size_t fills = 0;
  std::size_t frees = 0;
  std::size_t input_events = 0;
  std::size_t output_bytes = 0;
  double elapsed_seconds = 0;

  const BufferRecord* find(const std::string& var) const;
  /// One JSON object per line: each buffer, then a totals record.
  std::string to_json_lines() const;
};

struct EngineOptions {
  /// Skip on-handlers for symbols the element can never have.
  bool allow_dead_handlers = false;
};

struct PlanData;

/// Static part of an execution: buffer trees with flag annotations,
/// punctuation tables and the handler tables of each stream block.
class ExecutionPlan {
 public:
  /// Throws SafetyError for unsafe queries.
  ExecutionPlan(FPtr query, const Schema& schema, EngineOptions options = {});
  ~ExecutionPlan();
  ExecutionPlan(ExecutionPlan&&) noexcept;
  ExecutionPlan& operator=(ExecutionPlan&&) noexcept;

  const FluxExpr& query() const;
  const Schema& schema() const;
  /// Buffer trees of all variables that own a buffer.
  const std::map<std::string, BufferTree>& trees() const;
  /// Buffer trees with flag annotations, one block per variable.
  std::string dump() const;

  const PlanData& data() const { return *data_; }

 private:
  std::unique_ptr<PlanData> data_;
};

/// Single pass over the events; output is written incrementally.
RunStats run(const ExecutionPlan& plan, EventSource& events, std::ostream& out);
RunStats run(const ExecutionPlan& plan, std::istream& xml, std::ostream& out);
std::string run_to_string(const ExecutionPlan& plan, std::string_view xml, RunStats* stats = nullptr);

}  // namespace fluxq
