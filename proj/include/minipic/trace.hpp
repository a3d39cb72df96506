#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <string_view>
#include <vector>

namespace minipic {

enum class OpKind : std::uint8_t { Interpolation, Push, PreBC, Projection, Reduction, Dynamics, User };

inline constexpr int kOpKinds = 7;

/// Seconds per operator kind.
using OpSeconds = std::array<double, kOpKinds>;

/// Display name used in traces and reports ("Interpolation", "Push", "pre-BC", ...).
std::string_view op_name(OpKind op);

/// Monotonic nanoseconds since a per-process epoch.
std::int64_t trace_clock_ns();

struct TraceEvent {
  OpKind op = OpKind::User;
  int pid = 0;  // collection
  int tid = 0;  // worker within the collection
  int ipatch = -1, ispec = -1, ibin = -1;
  std::int64_t start_ns = 0, end_ns = 0;
};

/// Per-(collection, worker) event logs. A given (pid, tid) slot must only be
/// written by one thread at a time; distinct slots may be written concurrently.
class Tracer {
 public:
  Tracer() = default;
  Tracer(int n_pids, int n_tids);

  bool enabled() const { return !logs_.empty(); }
  void record(const TraceEvent& e) { logs_[static_cast<std::size_t>(e.pid) * n_tids_ + e.tid].push_back(e); }
  std::size_t size() const;
  /// Merged log ordered by (start, pid, tid).
  std::vector<TraceEvent> merged() const;
  void clear();

 private:
  int n_tids_ = 0;
  std::vector<std::vector<TraceEvent>> logs_;
};

}  // namespace minipic
