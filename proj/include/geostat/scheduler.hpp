#pragma once

// Sequential task flow: tasks are submitted in program order together with the
// tiles they read and write; the runtime infers the dependency DAG and runs it
// on a work-stealing worker pool.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "geostat/tile_matrix.hpp"

namespace geostat::sched {

struct Task {
  std::string kernel;
  std::vector<TileId> reads;
  std::vector<TileId> writes;
  std::function<void()> run;
  std::size_t seq = 0;
};

/// Ordered task stream; `seq` is assigned on submission.
class TaskStream {
 public:
  std::size_t submit(std::string kernel, std::initializer_list<TileId> reads,
                     std::initializer_list<TileId> writes, std::function<void()> run);
  std::size_t submit(Task task);

  std::size_t size() const noexcept { return tasks_.size(); }
  bool empty() const noexcept { return tasks_.empty(); }
  const std::vector<Task>& tasks() const noexcept { return tasks_; }
  /// Number of submitted tasks with the given kernel name.
  std::size_t count(std::string_view kernel) const;

  std::vector<Task> take() && { return std::move(tasks_); }

 private:
  std::vector<Task> tasks_;
};

struct Edge {
  std::size_t from;
  std::size_t to;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// DAG over a task stream. An edge i -> j means j waits for i; edges always
/// point from lower to higher submission index.
class TaskGraph {
 public:
  TaskGraph() = default;

  const std::vector<Task>& tasks() const noexcept { return tasks_; }
  std::size_t size() const noexcept { return tasks_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::span<const std::size_t> successors(std::size_t task) const;
  std::size_t predecessor_count(std::size_t task) const { return in_degree_[task]; }

  /// Number of tasks on the longest dependency chain.
  std::size_t critical_path_length() const;

 private:
  friend TaskGraph build_dag(std::vector<Task> stream);

  std::vector<Task> tasks_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> succ_offsets_;
  std::vector<std::size_t> succ_;
  std::vector<std::size_t> in_degree_;
};

/// Infers dependencies with last-writer / readers-since-last-write tracking per
/// tile: read-after-write, write-after-write and write-after-read each produce
/// an edge. The result has the same transitive closure as the all-pairs
/// conflict relation.
TaskGraph build_dag(std::vector<Task> stream);

struct TraceEvent {
  std::size_t task;
  std::string kernel;
  std::int64_t begin_ns;
  std::int64_t end_ns;
  std::size_t worker;
};

struct ExecutionOptions {
  std::size_t workers = 1;
  /// When set, receives one event per executed task.
  std::vector<TraceEvent>* trace = nullptr;
};

/// Workers from GEOSTAT_WORKERS when set, else the host's hardware threads.
std::size_t default_workers();

/// Runs every task exactly once after all of its predecessors. If a task
/// throws, its descendants are skipped, the pool drains, and the first
/// exception is rethrown.
void execute(const TaskGraph& graph, const ExecutionOptions& options);

/// build_dag + execute.
void run(TaskStream&& stream, const ExecutionOptions& options);

/// CSV `task_id,kernel,begin_ns,end_ns,worker`.
void write_trace_csv(std::ostream& out, std::span<const TraceEvent> trace);

}  // namespace geostat::sched
