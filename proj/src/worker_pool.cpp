#include "minipic/worker_pool.hpp"

#include <stdexcept>

namespace minipic {

WorkerPool::WorkerPool(int n_workers) {
  if (n_workers < 1) throw std::invalid_argument("worker pool needs at least one worker");
  threads_.reserve(static_cast<std::size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w) threads_.emplace_back([this, w] { loop(w); });
}

WorkerPool::~WorkerPool() {
  {
    std::unique_lock lk(m_);
    done_.wait(lk, [&] { return active_ == 0; });
    stop_ = true;
  }
  go_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::start(Job job) {
  std::unique_lock lk(m_);
  done_.wait(lk, [&] { return active_ == 0; });
  job_ = std::move(job);
  error_ = nullptr;
  active_ = size();
  ++generation_;
  lk.unlock();
  go_.notify_all();
}

void WorkerPool::wait() {
  std::unique_lock lk(m_);
  done_.wait(lk, [&] { return active_ == 0; });
  if (error_) {
    auto e = error_;
    error_ = nullptr;
    std::rethrow_exception(e);
  }
}

void WorkerPool::loop(int worker) {
  std::uint64_t seen = 0;
  for (;;) {
    Job* job;
    {
      std::unique_lock lk(m_);
      go_.wait(lk, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      job = &job_;
    }
    std::exception_ptr err;
    try {
      (*job)(worker);
    } catch (...) {
      err = std::current_exception();
    }
    {
      std::lock_guard lk(m_);
      if (err && !error_) error_ = err;
      if (--active_ == 0) done_.notify_all();
    }
  }
}

}  // namespace minipic
