#include "geostat/scheduler.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>
#include <unordered_map>

namespace geostat::sched {

std::size_t TaskStream::submit(std::string kernel, std::initializer_list<TileId> reads,
                               std::initializer_list<TileId> writes,
                               std::function<void()> run) {
  return submit(Task{std::move(kernel), reads, writes, std::move(run), 0});
}

std::size_t TaskStream::submit(Task task) {
  task.seq = tasks_.size();
  tasks_.push_back(std::move(task));
  return tasks_.back().seq;
}

std::size_t TaskStream::count(std::string_view kernel) const {
  return static_cast<std::size_t>(std::count_if(
      tasks_.begin(), tasks_.end(), [&](const Task& t) { return t.kernel == kernel; }));
}

std::span<const std::size_t> TaskGraph::successors(std::size_t task) const {
  return std::span<const std::size_t>(succ_).subspan(
      succ_offsets_[task], succ_offsets_[task + 1] - succ_offsets_[task]);
}

std::size_t TaskGraph::critical_path_length() const {
  // Edges point forward in submission order, so one pass suffices.
  std::vector<std::size_t> depth(tasks_.size(), 1);
  std::size_t best = 0;
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    for (auto s : successors(i)) depth[s] = std::max(depth[s], depth[i] + 1);
    best = std::max(best, depth[i]);
  }
  return best;
}

TaskGraph build_dag(std::vector<Task> stream) {
  TaskGraph g;
  g.tasks_ = std::move(stream);
  const std::size_t n = g.tasks_.size();
  for (std::size_t i = 0; i < n; ++i) g.tasks_[i].seq = i;

  struct TileState {
    std::size_t last_writer = SIZE_MAX;
    std::vector<std::size_t> readers;
  };
  std::unordered_map<TileId, TileState> tiles;
  std::vector<std::size_t> preds;
  for (std::size_t j = 0; j < n; ++j) {
    preds.clear();
    const auto& task = g.tasks_[j];
    for (auto tile : task.reads) {
      auto& st = tiles[tile];
      if (st.last_writer != SIZE_MAX) preds.push_back(st.last_writer);
      st.readers.push_back(j);
    }
    for (auto tile : task.writes) {
      auto& st = tiles[tile];
      if (st.last_writer != SIZE_MAX && st.last_writer != j) preds.push_back(st.last_writer);
      for (auto r : st.readers) {
        if (r != j) preds.push_back(r);
      }
      st.last_writer = j;
      st.readers.clear();
    }
    std::sort(preds.begin(), preds.end());
    preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
    for (auto p : preds) g.edges_.push_back({p, j});
  }

  std::sort(g.edges_.begin(), g.edges_.end());
  g.succ_offsets_.assign(n + 1, 0);
  g.in_degree_.assign(n, 0);
  for (const auto& e : g.edges_) {
    ++g.succ_offsets_[e.from + 1];
    ++g.in_degree_[e.to];
  }
  for (std::size_t i = 0; i < n; ++i) g.succ_offsets_[i + 1] += g.succ_offsets_[i];
  g.succ_.reserve(g.edges_.size());
  for (const auto& e : g.edges_) g.succ_.push_back(e.to);
  return g;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("GEOSTAT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

class Executor {
 public:
  Executor(const TaskGraph& graph, const ExecutionOptions& options)
      : graph_(graph),
        workers_(std::max<std::size_t>(1, options.workers)),
        trace_(options.trace),
        pending_(graph.size()),
        poisoned_(graph.size()),
        queues_(workers_),
        traces_(workers_),
        remaining_(graph.size()),
        start_(std::chrono::steady_clock::now()) {
    std::size_t next = 0;
    for (std::size_t t = 0; t < graph.size(); ++t) {
      pending_[t].store(graph.predecessor_count(t), std::memory_order_relaxed);
      if (graph.predecessor_count(t) == 0) {
        queues_[next++ % workers_].tasks.push_back(t);
        ready_.fetch_add(1, std::memory_order_relaxed);
      }
    }
  }

  void run() {
    std::vector<std::thread> pool;
    pool.reserve(workers_ - 1);
    for (std::size_t w = 1; w < workers_; ++w) pool.emplace_back([this, w] { work(w); });
    work(0);
    for (auto& t : pool) t.join();

    if (trace_) {
      for (auto& events : traces_) {
        trace_->insert(trace_->end(), std::make_move_iterator(events.begin()),
                       std::make_move_iterator(events.end()));
      }
      std::sort(trace_->begin(), trace_->end(), [](const auto& a, const auto& b) {
        return a.begin_ns < b.begin_ns || (a.begin_ns == b.begin_ns && a.task < b.task);
      });
    }
    if (error_) std::rethrow_exception(error_);
  }

 private:
  struct Queue {
    std::mutex mutex;
    std::deque<std::size_t> tasks;
  };

  std::int64_t now_ns() const {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

  bool try_pop(std::size_t w, std::size_t& task) {
    {
      auto& own = queues_[w];
      std::lock_guard lock(own.mutex);
      if (!own.tasks.empty()) {
        task = own.tasks.back();
        own.tasks.pop_back();
        return true;
      }
    }
    for (std::size_t i = 1; i < workers_; ++i) {
      auto& victim = queues_[(w + i) % workers_];
      std::lock_guard lock(victim.mutex);
      if (!victim.tasks.empty()) {
        task = victim.tasks.front();
        victim.tasks.pop_front();
        return true;
      }
    }
    return false;
  }

  void push(std::size_t w, std::size_t task) {
    {
      std::lock_guard lock(queues_[w].mutex);
      queues_[w].tasks.push_back(task);
    }
    {
      std::lock_guard lock(sleep_mutex_);
      ready_.fetch_add(1, std::memory_order_release);
    }
    sleep_cv_.notify_one();
  }

  void work(std::size_t w) {
    while (remaining_.load(std::memory_order_acquire) > 0) {
      std::size_t task = 0;
      if (!try_pop(w, task)) {
        std::unique_lock lock(sleep_mutex_);
        sleep_cv_.wait(lock, [this] {
          return ready_.load(std::memory_order_acquire) > 0 ||
                 remaining_.load(std::memory_order_acquire) == 0;
        });
        continue;
      }
      ready_.fetch_sub(1, std::memory_order_acq_rel);
      execute_one(w, task);
    }
  }

  void execute_one(std::size_t w, std::size_t task) {
    const Task& t = graph_.tasks()[task];
    bool failed = poisoned_[task].load(std::memory_order_acquire);
    if (!failed) {
      const auto begin = now_ns();
      try {
        if (t.run) t.run();
      } catch (...) {
        failed = true;
        std::lock_guard lock(error_mutex_);
        if (!error_) error_ = std::current_exception();
      }
      if (trace_) traces_[w].push_back({task, t.kernel, begin, now_ns(), w});
    }
    for (auto s : graph_.successors(task)) {
      if (failed) poisoned_[s].store(true, std::memory_order_release);
      if (pending_[s].fetch_sub(1, std::memory_order_acq_rel) == 1) push(w, s);
    }
    if (remaining_.fetch_sub(1, std::memory_order_acq_rel) == 1) {
      std::lock_guard lock(sleep_mutex_);
      sleep_cv_.notify_all();
    }
  }

  const TaskGraph& graph_;
  std::size_t workers_;
  std::vector<TraceEvent>* trace_;
  std::vector<std::atomic<std::size_t>> pending_;
  std::vector<std::atomic<bool>> poisoned_;
  std::vector<Queue> queues_;
  std::vector<std::vector<TraceEvent>> traces_;
  std::atomic<std::size_t> remaining_;
  std::atomic<std::size_t> ready_{0};
  std::mutex sleep_mutex_;
  std::condition_variable sleep_cv_;
  std::mutex error_mutex_;
  std::exception_ptr error_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

void execute(const TaskGraph& graph, const ExecutionOptions& options) {
  if (graph.size() == 0) return;
  Executor(graph, options).run();
}

void run(TaskStream&& stream, const ExecutionOptions& options) {
  execute(build_dag(std::move(stream).take()), options);
}

void write_trace_csv(std::ostream& out, std::span<const TraceEvent> trace) {
  out << "task_id,kernel,begin_ns,end_ns,worker\n";
  for (const auto& e : trace) {
    out << e.task << ',' << e.kernel << ',' << e.begin_ns << ',' << e.end_ns << ','
        << e.worker << '\n';
  }
}

}  // namespace geostat::sched
