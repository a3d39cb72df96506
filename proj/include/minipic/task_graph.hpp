#pragma once

#include <array>
#include <compare>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "minipic/trace.hpp"

namespace minipic {

class WorkerPool;

enum class TagKind : std::uint8_t {
  HasInterpolated,
  HasPushed,
  HasDoneBC,
  HasDoneDynamics,
  HasReducedDensities,
  User,
};

/// Dependence variable: a kind plus up to three indices, compared by value.
struct DepTag {
  TagKind kind = TagKind::User;
  std::array<int, 3> index{-1, -1, -1};

  friend auto operator<=>(const DepTag&, const DepTag&) = default;
};

inline DepTag tag(TagKind kind, int a = -1, int b = -1, int c = -1) { return {kind, {a, b, c}}; }

enum class Access : std::uint8_t { In, Out };

struct Dep {
  DepTag tag;
  Access access = Access::In;
};

inline Dep in(DepTag t) { return {t, Access::In}; }
inline Dep out(DepTag t) { return {t, Access::Out}; }

struct TaskMeta {
  OpKind op = OpKind::User;
  int ipatch = -1, ispec = -1, ibin = -1;
};

std::string describe(const TaskMeta& meta);

/// Graph mutation outside the submission phase.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A task body threw; execution was aborted.
class TaskFailure : public std::runtime_error {
 public:
  TaskFailure(TaskMeta meta, std::exception_ptr cause, const std::string& what)
      : std::runtime_error(what), meta_(meta), cause_(std::move(cause)) {}
  const TaskMeta& meta() const { return meta_; }
  const std::exception_ptr& cause() const { return cause_; }

 private:
  TaskMeta meta_;
  std::exception_ptr cause_;
};

class TaskGraph;
class TaskContext;

using TaskBody = std::function<void(TaskContext&)>;

/// Handle given to a running body; spawns child tasks whose dependences are
/// resolved among the siblings only. The parent completes once its body
/// returned and all children completed.
class TaskContext {
 public:
  std::size_t spawn(const TaskMeta& meta, const std::vector<Dep>& deps, TaskBody body);
  int worker() const { return worker_; }

 private:
  friend class TaskGraph;
  TaskContext(TaskGraph& g, std::size_t node, int worker) : graph_(g), node_(node), worker_(worker) {}
  TaskGraph& graph_;
  std::size_t node_;
  int worker_;
};

struct TaskRecord {
  TaskMeta meta;
  std::vector<int> path;  // submission ordinal, then child ordinals
  int parent = -1;
  int worker = -1;
  bool executed = false;
  std::int64_t start_ns = 0, end_ns = 0;  // body execution
  std::int64_t complete_ns = 0;           // body and all children done
};

/// Task set with OpenMP-style in/out dependences: an `in` waits for the last
/// writer of the tag, an `out` waits for the last writer and every reader since.
class TaskGraph {
 public:
  TaskGraph() = default;
  TaskGraph(const TaskGraph&) = delete;
  TaskGraph& operator=(const TaskGraph&) = delete;

  /// Throws UsageError once execute() has been called.
  std::size_t submit(const TaskMeta& meta, const std::vector<Dep>& deps, TaskBody body);

  /// Runs every task on the pool's workers and returns when all completed.
  /// Events go to tracer (if non-null) under pid; body times are added to
  /// (*busy)[worker][op] when busy is non-null. Throws TaskFailure.
  void execute(WorkerPool& pool, Tracer* tracer = nullptr, int pid = 0, std::vector<OpSeconds>* busy = nullptr);

  std::size_t size() const;
  std::size_t executed_count() const;
  /// Derived (predecessor, successor) node pairs, deduplicated.
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
  std::vector<TaskRecord> records() const;

 private:
  friend class TaskContext;

  struct TagState {
    std::int64_t writer = -1;
    std::vector<std::size_t> readers;  // since the last writer
  };
  using Scope = std::map<DepTag, TagState>;

  struct Node {
    TaskMeta meta;
    TaskBody body;
    std::vector<int> path;
    std::int64_t parent = -1;
    std::vector<std::size_t> successors;
    int pending_preds = 0;
    int pending_children = 0;
    int n_children = 0;
    bool body_done = false;
    bool completed = false;
    Scope scope;  // dependences among this node's children
    TaskRecord rec;
  };

  std::size_t add_node(std::int64_t parent, const TaskMeta& meta, const std::vector<Dep>& deps, TaskBody body);
  void worker_loop(int worker, Tracer* tracer, int pid, std::vector<OpSeconds>* busy);
  void complete(std::size_t n);
  void wake_one();

  mutable std::mutex m_;
  std::condition_variable cv_;
  std::deque<Node> nodes_;
  Scope root_scope_;
  int n_top_ = 0;
  std::deque<std::size_t> ready_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::size_t outstanding_ = 0;
  std::size_t waiting_ = 0;   // workers blocked on cv_
  std::size_t signaled_ = 0;  // notifications not yet consumed
  std::size_t executed_ = 0;
  bool executing_ = false;
  bool failed_ = false;
  std::exception_ptr error_;
  TaskMeta error_meta_;
};

}  // namespace minipic
