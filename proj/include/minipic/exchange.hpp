#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>

namespace minipic {

class Domain;

/// A particle's destination is not a patch reachable from its source.
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Applies a visitor to every patch id and returns once all calls finished.
/// Implementations may run the calls concurrently; visitors only write state
/// owned by the visited patch.
using PatchVisitor = std::function<void(int patch_id)>;
using PatchRunner = std::function<void(const PatchVisitor&)>;

/// Runs the visitor over all patches in id order on the calling thread.
PatchRunner sequential_runner(const Domain& domain);

struct MigrationStats {
  std::size_t intra_collection = 0;  // movers that stayed inside their collection
  std::size_t inter_collection = 0;  // movers delivered through another collection
};

/// Applies the particle boundary conditions to every flagged particle,
/// moves border-crossing particles to their destination patches and
/// re-sorts every arena into bins.
MigrationStats apply_particle_bc_and_migrate(Domain& domain, const PatchRunner& run = {});

/// Folds current ghosts across reflective walls, adds neighbor ghost layers into
/// owned cells, then publishes the totals to Jx/Jy/Jz and clears the accumulators.
void sum_current_ghosts(Domain& domain, const PatchRunner& run = {});

enum class FieldGroup { Electric, Magnetic, All };

/// Copies neighbor interiors into ghost layers; reflective walls are imaged as a
/// perfect conductor (tangential E and normal B odd, the rest even).
void sync_field_ghosts(Domain& domain, FieldGroup group = FieldGroup::All,
                       const PatchRunner& run = {});

/// Deposits rho from all particles (with the same ghost treatment as currents).
void deposit_charge(Domain& domain, const PatchRunner& run = {});

/// B half step, E full step with -J source, B half step, with ghost
/// synchronization between the sub-steps.
void maxwell_step(Domain& domain, double dt, const PatchRunner& run = {});

}  // namespace minipic
