#include "minipic/task_graph.hpp"

#include <algorithm>

#include "minipic/worker_pool.hpp"

namespace minipic {

std::string describe(const TaskMeta& m) {
  return std::string(op_name(m.op)) + "(ipatch=" + std::to_string(m.ipatch) + ", ispec=" + std::to_string(m.ispec) +
         ", ibin=" + std::to_string(m.ibin) + ")";
}

std::size_t TaskContext::spawn(const TaskMeta& meta, const std::vector<Dep>& deps, TaskBody body) {
  return graph_.add_node(static_cast<std::int64_t>(node_), meta, deps, std::move(body));
}

std::size_t TaskGraph::submit(const TaskMeta& meta, const std::vector<Dep>& deps, TaskBody body) {
  {
    std::lock_guard lk(m_);
    if (executing_) throw UsageError("submit after execution started");
  }
  return add_node(-1, meta, deps, std::move(body));
}

std::size_t TaskGraph::add_node(std::int64_t parent, const TaskMeta& meta, const std::vector<Dep>& deps,
                                TaskBody body) {
  std::lock_guard lk(m_);
  const std::size_t id = nodes_.size();
  Node& n = nodes_.emplace_back();
  n.meta = meta;
  n.body = std::move(body);
  n.parent = parent;
  Scope* scope = &root_scope_;
  if (parent >= 0) {
    Node& p = nodes_[static_cast<std::size_t>(parent)];
    n.path = p.path;
    n.path.push_back(p.n_children++);
    ++p.pending_children;
    scope = &p.scope;
  } else {
    n.path = {n_top_++};
  }
  n.rec.meta = meta;
  n.rec.path = n.path;
  n.rec.parent = static_cast<int>(parent);

  // A tag listed both ways acts as out.
  std::vector<Dep> merged = deps;
  std::sort(merged.begin(), merged.end(), [](const Dep& a, const Dep& b) {
    return a.tag != b.tag ? a.tag < b.tag : a.access > b.access;
  });
  merged.erase(std::unique(merged.begin(), merged.end(), [](const Dep& a, const Dep& b) { return a.tag == b.tag; }),
               merged.end());

  std::vector<std::size_t> preds;
  for (const Dep& d : merged) {
    auto& [writer, readers] = (*scope)[d.tag];
    if (writer >= 0) preds.push_back(static_cast<std::size_t>(writer));
    if (d.access == Access::In) {
      readers.push_back(id);
    } else {
      preds.insert(preds.end(), readers.begin(), readers.end());
      readers.clear();
      writer = static_cast<std::int64_t>(id);
    }
  }
  std::sort(preds.begin(), preds.end());
  preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
  for (std::size_t p : preds) {
    edges_.emplace_back(p, id);
    Node& pn = nodes_[p];
    if (!pn.completed) {
      pn.successors.push_back(id);
      ++n.pending_preds;
    }
  }

  ++outstanding_;
  if (executing_ && n.pending_preds == 0) {
    ready_.push_back(id);
    wake_one();
  }
  return id;
}

void TaskGraph::complete(std::size_t id) {
  Node& n = nodes_[id];
  n.completed = true;
  n.rec.complete_ns = trace_clock_ns();
  n.body = nullptr;
  n.scope.clear();
  for (std::size_t s : n.successors) {
    if (--nodes_[s].pending_preds == 0) ready_.push_back(s);
  }
  --outstanding_;
  if (n.parent >= 0) {
    Node& p = nodes_[static_cast<std::size_t>(n.parent)];
    if (--p.pending_children == 0 && p.body_done) complete(static_cast<std::size_t>(n.parent));
  }
  if (outstanding_ == 0) cv_.notify_all();
}

// Completing workers pick up their own successors; sleepers are woken only
// while ready tasks outnumber pending notifications.
void TaskGraph::wake_one() {
  if (waiting_ > signaled_ && ready_.size() > signaled_) {
    ++signaled_;
    cv_.notify_one();
  }
}

void TaskGraph::execute(WorkerPool& pool, Tracer* tracer, int pid, std::vector<OpSeconds>* busy) {
  {
    std::lock_guard lk(m_);
    if (executing_) throw UsageError("graph already executed");
    executing_ = true;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].pending_preds == 0) ready_.push_back(i);
    if (outstanding_ == 0) return;
    if (busy && static_cast<int>(busy->size()) < pool.size()) throw UsageError("busy timers smaller than the pool");
  }
  pool.run([&](int w) { worker_loop(w, tracer, pid, busy); });
  if (failed_) {
    std::string what = "task " + describe(error_meta_) + " failed";
    try {
      std::rethrow_exception(error_);
    } catch (const std::exception& e) {
      what += ": ";
      what += e.what();
    } catch (...) {
    }
    throw TaskFailure(error_meta_, error_, what);
  }
}

void TaskGraph::worker_loop(int worker, Tracer* tracer, int pid, std::vector<OpSeconds>* busy) {
  std::unique_lock lk(m_);
  for (;;) {
    while (!failed_ && outstanding_ != 0 && ready_.empty()) {
      ++waiting_;
      cv_.wait(lk);
      --waiting_;
      if (signaled_ > 0) --signaled_;
    }
    if (failed_ || ready_.empty()) return;
    // Newest ready task first.
    const std::size_t id = ready_.back();
    ready_.pop_back();
    if (!ready_.empty()) wake_one();
    Node& n = nodes_[id];
    lk.unlock();

    TaskContext ctx(*this, id, worker);
    const std::int64_t t0 = trace_clock_ns();
    std::exception_ptr err;
    try {
      n.body(ctx);
    } catch (...) {
      err = std::current_exception();
    }
    const std::int64_t t1 = trace_clock_ns();
    if (tracer && tracer->enabled() && !err)
      tracer->record({n.meta.op, pid, worker, n.meta.ipatch, n.meta.ispec, n.meta.ibin, t0, t1});
    if (busy && !err) (*busy)[worker][static_cast<int>(n.meta.op)] += static_cast<double>(t1 - t0) * 1e-9;

    lk.lock();
    if (err) {
      if (!failed_) {
        failed_ = true;
        error_ = err;
        error_meta_ = n.meta;
      }
      cv_.notify_all();
      return;
    }
    n.rec.worker = worker;
    n.rec.executed = true;
    n.rec.start_ns = t0;
    n.rec.end_ns = t1;
    ++executed_;
    n.body_done = true;
    if (n.pending_children == 0) complete(id);
  }
}

std::size_t TaskGraph::size() const {
  std::lock_guard lk(m_);
  return nodes_.size();
}

std::size_t TaskGraph::executed_count() const {
  std::lock_guard lk(m_);
  return executed_;
}

std::vector<TaskRecord> TaskGraph::records() const {
  std::lock_guard lk(m_);
  std::vector<TaskRecord> out;
  out.reserve(nodes_.size());
  for (const auto& n : nodes_) out.push_back(n.rec);
  return out;
}

}  // namespace minipic
