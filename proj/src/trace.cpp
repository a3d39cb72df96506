#include "minipic/trace.hpp"

#include <algorithm>
#include <tuple>

namespace minipic {

std::string_view op_name(OpKind op) {
  switch (op) {
    case OpKind::Interpolation: return "Interpolation";
    case OpKind::Push: return "Push";
    case OpKind::PreBC: return "pre-BC";
    case OpKind::Projection: return "Projection";
    case OpKind::Reduction: return "Reduction";
    case OpKind::Dynamics: return "Dynamics";
    case OpKind::User: return "User";
  }
  return "User";
}

std::int64_t trace_clock_ns() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point epoch = clock::now();
  return std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - epoch).count();
}

Tracer::Tracer(int n_pids, int n_tids)
    : n_tids_(n_tids), logs_(static_cast<std::size_t>(n_pids) * n_tids) {
  trace_clock_ns();
}

std::size_t Tracer::size() const {
  std::size_t n = 0;
  for (const auto& l : logs_) n += l.size();
  return n;
}

std::vector<TraceEvent> Tracer::merged() const {
  std::vector<TraceEvent> all;
  all.reserve(size());
  for (const auto& l : logs_) all.insert(all.end(), l.begin(), l.end());
  std::stable_sort(all.begin(), all.end(), [](const TraceEvent& a, const TraceEvent& b) {
    return std::tie(a.start_ns, a.pid, a.tid) < std::tie(b.start_ns, b.pid, b.tid);
  });
  return all;
}

void Tracer::clear() {
  for (auto& l : logs_) l.clear();
}

}  // namespace minipic
