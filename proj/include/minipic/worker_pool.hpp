#pragma once

#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace minipic {

/// Fixed set of persistent threads that all run the same job once per
/// start()/wait() round. Workers are numbered 0..size()-1.
class WorkerPool {
 public:
  using Job = std::function<void(int worker)>;

  explicit WorkerPool(int n_workers);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int size() const { return static_cast<int>(threads_.size()); }

  void start(Job job);
  /// Blocks until every worker returned from the current job; rethrows the
  /// first exception raised by a worker.
  void wait();
  void run(Job job) {
    start(std::move(job));
    wait();
  }

 private:
  void loop(int worker);

  std::vector<std::thread> threads_;
  std::mutex m_;
  std::condition_variable go_, done_;
  Job job_;
  std::uint64_t generation_ = 0;
  int active_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace minipic
