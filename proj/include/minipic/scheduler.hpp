#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "minipic/domain.hpp"
#include "minipic/exchange.hpp"
#include "minipic/task_graph.hpp"
#include "minipic/trace.hpp"
#include "minipic/worker_pool.hpp"

namespace minipic {

struct SimulationReport {
  int iterations = 0;
  ExecutionMode mode = ExecutionMode::TasksOn;
  int n_collections = 1;
  int workers_per_collection = 1;
  int bin_x_size = 1;

  /// Particle-phase wall time of each collection, summed over iterations.
  std::vector<double> collection_particle_s;
  /// Coarse per-operator timers (summed over workers) of each collection.
  std::vector<OpSeconds> collection_op_s;

  double t_particle_ops_s = 0;  // collection_particle_s averaged over collections
  double t_maxwell_s = 0;
  double t_sync_s = 0;          // current ghost sums and particle migration
  double t_lb_s = 0;
  double t_total_s = 0;

  std::size_t tasks_executed = 0;
  std::size_t tasks_submitted = 0;
  MigrationStats migration;
  int rebalances = 0;            // partitions adopted with a changed owner map
  std::size_t leaked_buffers = 0;  // GatherBuffers found Sized after an iteration

  /// Coarse op timers summed over collections.
  OpSeconds op_totals() const;
};

struct CollectionTimers {
  std::vector<OpSeconds> per_worker;  // accumulated across calls
  std::int64_t finish_ns = 0;         // when the last worker of the latest call finished
};

/// Runs the particle phase of one collection on its pool.
/// OFF: workers claim whole patches from a shared queue and run every operator
/// bin-by-bin on that worker. ON: a fresh task graph of per-(patch, species)
/// dynamics tasks spawning per-bin chains, followed by ordered reductions.
void iterate_tasks_off(Domain& domain, int collection, WorkerPool& pool, Tracer* tracer,
                       CollectionTimers& timers);
/// Returns the number of executed tasks.
std::size_t iterate_tasks_on(Domain& domain, int collection, WorkerPool& pool, Tracer* tracer,
                             CollectionTimers& timers, std::size_t* submitted = nullptr);

/// Tasks in one ON iteration of one collection: per patch and species,
/// a dynamics task, a reduction task and four tasks per bin.
std::size_t tasks_per_iteration(const Domain& domain, int collection);

struct RunOptions {
  Tracer* tracer = nullptr;  // must be sized n_collections x workers_per_collection
};

/// Iteration driver over a built domain. One worker pool per collection; a
/// global barrier separates the particle, exchange and field phases.
class Simulation {
 public:
  explicit Simulation(Domain& domain, RunOptions options = {});
  ~Simulation();

  /// Advances one iteration: [load balance] -> particles -> exchange -> fields.
  void step();
  int iteration() const { return iteration_; }
  SimulationReport report() const;
  /// Runs each collection's patches on that collection's pool.
  const PatchRunner& runner() const { return runner_; }

 private:
  void particle_phase();

  Domain& domain_;
  RunOptions options_;
  std::vector<std::unique_ptr<WorkerPool>> pools_;
  PatchRunner runner_;
  SimulationReport report_;
  int iteration_ = 0;
};

/// Runs config().n_iterations iterations.
SimulationReport run_simulation(Domain& domain, const RunOptions& options = {});

/// Number of GatherBuffers currently Sized anywhere in the domain.
std::size_t sized_buffer_count(const Domain& domain);

}  // namespace minipic
