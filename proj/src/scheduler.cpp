#include "minipic/scheduler.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "minipic/kernels.hpp"
#include "minipic/load_balance.hpp"

namespace minipic {

namespace {

double seconds(std::int64_t ns) { return static_cast<double>(ns) * 1e-9; }

void ensure_workers(CollectionTimers& t, int n) {
  if (static_cast<int>(t.per_worker.size()) < n) t.per_worker.resize(static_cast<std::size_t>(n), OpSeconds{});
}

/// Operator-major loop over the bins of one species, all on the calling worker.
template <class Kernel>
void all_bins(OpKind op, Patch& p, int s, int pid, int tid, Tracer* tracer, OpSeconds& acc, Kernel kernel) {
  const bool tracing = tracer && tracer->enabled();
  const std::int64_t t0 = trace_clock_ns();
  std::int64_t b0 = t0;
  for (int b = 0; b < p.geom.n_bins; ++b) {
    kernel(b);
    if (tracing) {
      const std::int64_t b1 = trace_clock_ns();
      tracer->record({op, pid, tid, p.geom.id, s, b, b0, b1});
      b0 = b1;
    }
  }
  acc[static_cast<int>(op)] += seconds(trace_clock_ns() - t0);
}

template <class Fn>
void single(OpKind op, Patch& p, int s, int pid, int tid, Tracer* tracer, OpSeconds& acc, Fn fn) {
  const std::int64_t t0 = trace_clock_ns();
  fn();
  const std::int64_t t1 = trace_clock_ns();
  if (tracer && tracer->enabled()) tracer->record({op, pid, tid, p.geom.id, s, -1, t0, t1});
  acc[static_cast<int>(op)] += seconds(t1 - t0);
}

void run_patch_off(Patch& p, double dt, int pid, int tid, Tracer* tracer, OpSeconds& acc) {
  for (int s = 0; s < static_cast<int>(p.arenas.size()); ++s) {
    single(OpKind::Dynamics, p, s, pid, tid, tracer, acc, [&] { p.gather[s].size_to(p.arenas[s].size()); });
    all_bins(OpKind::Interpolation, p, s, pid, tid, tracer, acc, [&](int b) { interpolate(p, s, b); });
    all_bins(OpKind::Push, p, s, pid, tid, tracer, acc, [&](int b) { push(p, s, b, dt); });
    all_bins(OpKind::PreBC, p, s, pid, tid, tracer, acc, [&](int b) { pre_bc(p, s, b); });
    all_bins(OpKind::Projection, p, s, pid, tid, tracer, acc, [&](int b) { project(p, s, b, dt); });
    single(OpKind::Reduction, p, s, pid, tid, tracer, acc, [&] {
      reduce_bin_currents(p, s);
      p.gather[s].release();
    });
  }
}

}  // namespace

OpSeconds SimulationReport::op_totals() const {
  OpSeconds t{};
  for (const auto& c : collection_op_s)
    for (int k = 0; k < kOpKinds; ++k) t[k] += c[k];
  return t;
}

void iterate_tasks_off(Domain& d, int c, WorkerPool& pool, Tracer* tracer, CollectionTimers& timers) {
  const std::vector<int>& ids = d.collection(c);
  const double dt = d.config().dt;
  ensure_workers(timers, pool.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::int64_t> finish(static_cast<std::size_t>(pool.size()), 0);
  pool.run([&](int w) {
    for (std::size_t k; (k = next.fetch_add(1, std::memory_order_relaxed)) < ids.size();)
      run_patch_off(d.patch(ids[k]), dt, c, w, tracer, timers.per_worker[w]);
    finish[w] = trace_clock_ns();
  });
  timers.finish_ns = *std::max_element(finish.begin(), finish.end());
}

std::size_t tasks_per_iteration(const Domain& d, int c) {
  std::size_t n = 0;
  for (int id : d.collection(c)) n += static_cast<std::size_t>(d.n_species()) * (2 + 4 * d.patch(id).geom.n_bins);
  return n;
}

std::size_t iterate_tasks_on(Domain& d, int c, WorkerPool& pool, Tracer* tracer, CollectionTimers& timers,
                             std::size_t* submitted) {
  const double dt = d.config().dt;
  ensure_workers(timers, pool.size());

  TaskGraph graph;
  for (int id : d.collection(c)) {
    Patch& p = d.patch(id);
    for (int s = 0; s < d.n_species(); ++s) {
      graph.submit({OpKind::Dynamics, id, s, -1}, {out(tag(TagKind::HasDoneDynamics, id, s))},
                   [&p, id, s, dt](TaskContext& ctx) {
                     p.gather[s].size_to(p.arenas[s].size());
                     for (int b = 0; b < p.geom.n_bins; ++b) {
                       ctx.spawn({OpKind::Interpolation, id, s, b}, {out(tag(TagKind::HasInterpolated, b))},
                                 [&p, s, b](TaskContext&) { interpolate(p, s, b); });
                       ctx.spawn({OpKind::Push, id, s, b},
                                 {in(tag(TagKind::HasInterpolated, b)), out(tag(TagKind::HasPushed, b))},
                                 [&p, s, b, dt](TaskContext&) { push(p, s, b, dt); });
                       ctx.spawn({OpKind::PreBC, id, s, b},
                                 {in(tag(TagKind::HasPushed, b)), out(tag(TagKind::HasDoneBC, b))},
                                 [&p, s, b](TaskContext&) { pre_bc(p, s, b); });
                       ctx.spawn({OpKind::Projection, id, s, b}, {in(tag(TagKind::HasDoneBC, b))},
                                 [&p, s, b, dt](TaskContext&) { project(p, s, b, dt); });
                     }
                   });
      graph.submit({OpKind::Reduction, id, s, -1},
                   {in(tag(TagKind::HasDoneDynamics, id, s)), out(tag(TagKind::HasReducedDensities, id))},
                   [&p, s](TaskContext&) {
                     reduce_bin_currents(p, s);
                     p.gather[s].release();
                   });
    }
  }
  graph.execute(pool, tracer, c, &timers.per_worker);
  timers.finish_ns = trace_clock_ns();
  if (submitted) *submitted = graph.size();
  return graph.executed_count();
}

std::size_t sized_buffer_count(const Domain& d) {
  std::size_t n = 0;
  for (int id = 0; id < d.n_patches(); ++id)
    for (const auto& g : d.patch(id).gather) n += g.state() == GatherBuffer::State::Sized;
  return n;
}

Simulation::Simulation(Domain& domain, RunOptions options) : domain_(domain), options_(options) {
  const SimConfig& cfg = domain_.config();
  for (int c = 0; c < domain_.n_collections(); ++c)
    pools_.push_back(std::make_unique<WorkerPool>(cfg.workers_per_collection));
  report_.mode = cfg.mode;
  report_.n_collections = cfg.n_collections;
  report_.workers_per_collection = cfg.workers_per_collection;
  report_.bin_x_size = cfg.bin_x_size;
  report_.collection_particle_s.assign(static_cast<std::size_t>(cfg.n_collections), 0.0);
  report_.collection_op_s.assign(static_cast<std::size_t>(cfg.n_collections), OpSeconds{});

  runner_ = [this](const PatchVisitor& visit) {
    const int nc = domain_.n_collections();
    std::vector<std::atomic<std::size_t>> next(static_cast<std::size_t>(nc));
    for (int c = 0; c < nc; ++c) {
      pools_[c]->start([this, c, &next, &visit](int) {
        const std::vector<int>& ids = domain_.collection(c);
        for (std::size_t k; (k = next[c].fetch_add(1, std::memory_order_relaxed)) < ids.size();) visit(ids[k]);
      });
    }
    std::exception_ptr first;
    for (auto& pool : pools_) {
      try {
        pool->wait();
      } catch (...) {
        if (!first) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
  };
}

Simulation::~Simulation() = default;

void Simulation::particle_phase() {
  const int nc = domain_.n_collections();
  std::vector<CollectionTimers> timers(static_cast<std::size_t>(nc));
  std::vector<std::size_t> executed(static_cast<std::size_t>(nc), 0), submitted(static_cast<std::size_t>(nc), 0);
  auto run_one = [&](int c) {
    if (domain_.config().mode == ExecutionMode::TasksOn)
      executed[c] = iterate_tasks_on(domain_, c, *pools_[c], options_.tracer, timers[c], &submitted[c]);
    else
      iterate_tasks_off(domain_, c, *pools_[c], options_.tracer, timers[c]);
  };

  const std::int64_t t0 = trace_clock_ns();
  if (nc == 1) {
    run_one(0);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nc));
    std::vector<std::thread> drivers;
    for (int c = 0; c < nc; ++c) {
      drivers.emplace_back([&, c] {
        try {
          run_one(c);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    }
    for (auto& t : drivers) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  for (int c = 0; c < nc; ++c) {
    report_.collection_particle_s[c] += seconds(timers[c].finish_ns - t0);
    for (const auto& w : timers[c].per_worker)
      for (int k = 0; k < kOpKinds; ++k) report_.collection_op_s[c][k] += w[k];
    report_.tasks_executed += executed[c];
    report_.tasks_submitted += submitted[c];
  }
}

void Simulation::step() {
  const SimConfig& cfg = domain_.config();
  const std::int64_t t_begin = trace_clock_ns();

  if (cfg.lb_period > 0 && iteration_ % cfg.lb_period == 0 && domain_.n_collections() > 1) {
    const std::vector<int> before = domain_.owners();
    rebalance(domain_, compute_loads(domain_, cfg.cell_load));
    if (domain_.owners() != before) ++report_.rebalances;
  }
  const std::int64_t t_lb = trace_clock_ns();

  particle_phase();
  report_.leaked_buffers += sized_buffer_count(domain_);

  const std::int64_t t_sync0 = trace_clock_ns();
  sum_current_ghosts(domain_, runner_);
  const MigrationStats m = apply_particle_bc_and_migrate(domain_, runner_);
  report_.migration.intra_collection += m.intra_collection;
  report_.migration.inter_collection += m.inter_collection;
  const std::int64_t t_sync1 = trace_clock_ns();

  maxwell_step(domain_, cfg.dt, runner_);
  const std::int64_t t_end = trace_clock_ns();

  report_.t_lb_s += seconds(t_lb - t_begin);
  report_.t_sync_s += seconds(t_sync1 - t_sync0);
  report_.t_maxwell_s += seconds(t_end - t_sync1);
  report_.t_total_s += seconds(t_end - t_begin);
  ++report_.iterations;
  ++iteration_;
}

SimulationReport Simulation::report() const {
  SimulationReport r = report_;
  double sum = 0;
  for (double t : r.collection_particle_s) sum += t;
  r.t_particle_ops_s = r.collection_particle_s.empty() ? 0.0 : sum / static_cast<double>(r.collection_particle_s.size());
  return r;
}

SimulationReport run_simulation(Domain& domain, const RunOptions& options) {
  Simulation sim(domain, options);
  for (int it = 0; it < domain.config().n_iterations; ++it) sim.step();
  return sim.report();
}

}  // namespace minipic
