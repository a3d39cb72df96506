#include "minipic/config.hpp"

#include <cmath>
#include <sstream>

namespace minipic {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

bool is_perfect_square(int n) {
  if (n <= 0) return false;
  const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  return r * r == n;
}

}  // namespace

double density_at(const DensityProfile& profile, double x) {
  if (const auto* u = std::get_if<UniformProfile>(&profile)) return u->n0;
  const auto& slab = std::get<SlabXProfile>(profile);
  return (x >= slab.x_min && x < slab.x_max) ? slab.n0 : 0.0;
}

double courant_limit(double dx, double dy) {
  return dx * dy / std::sqrt(dx * dx + dy * dy);
}

void validate(const SimConfig& c) {
  if (c.cells_x <= 0 || c.cells_y <= 0) fail("grid extents must be positive");
  if (!(c.dx > 0.0) || !(c.dy > 0.0)) fail("cell sizes dx, dy must be positive");
  if (!(c.dt > 0.0)) fail("timestep dt must be positive");
  if (c.patches_x <= 0 || c.patches_y <= 0) fail("patch counts must be positive");
  if (c.cells_x % c.patches_x != 0) fail("cells_x must be divisible by patches_x");
  if (c.cells_y % c.patches_y != 0) fail("cells_y must be divisible by patches_y");
  if (c.patch_cells_x() < kMinPatchCells || c.patch_cells_y() < kMinPatchCells) {
    std::ostringstream os;
    os << "patch extent " << c.patch_cells_x() << "x" << c.patch_cells_y()
       << " is below the minimum of " << kMinPatchCells << " cells per direction";
    fail(os.str());
  }
  if (c.bin_x_size <= 0 || c.patch_cells_x() % c.bin_x_size != 0) {
    std::ostringstream os;
    os << "bin_x_size " << c.bin_x_size << " does not divide the patch x-extent "
       << c.patch_cells_x();
    fail(os.str());
  }
  if (!(c.dt < courant_limit(c.dx, c.dy))) {
    std::ostringstream os;
    os << "dt " << c.dt << " violates the Courant condition dt < "
       << courant_limit(c.dx, c.dy);
    fail(os.str());
  }
  if (c.n_collections <= 0) fail("n_collections must be positive");
  if (c.n_collections > c.n_patches()) fail("n_collections exceeds the patch count");
  if (c.workers_per_collection <= 0) fail("workers_per_collection must be positive");
  if (c.n_iterations < 0) fail("n_iterations must be non-negative");
  if (c.lb_period < 0) fail("lb_period must be non-negative");
  if (c.cell_load < 0.0) fail("cell_load must be non-negative");
  for (const auto& s : c.species) {
    if (s.name.empty()) fail("species name must not be empty");
    if (!(s.mass > 0.0)) fail("species '" + s.name + "': mass must be positive");
    if (s.temperature < 0.0) fail("species '" + s.name + "': temperature must be non-negative");
    if (!is_perfect_square(s.particles_per_cell))
      fail("species '" + s.name + "': particles_per_cell must be a perfect square");
    if (const auto* slab = std::get_if<SlabXProfile>(&s.density); slab && slab->x_max < slab->x_min)
      fail("species '" + s.name + "': slab x_max < x_min");
  }
}

std::string_view to_string(ExecutionMode mode) {
  return mode == ExecutionMode::TasksOn ? "tasks_on" : "tasks_off";
}

std::string_view to_string(Boundary boundary) {
  return boundary == Boundary::Periodic ? "periodic" : "reflective";
}

ExecutionMode parse_mode(std::string_view text) {
  if (text == "tasks_on") return ExecutionMode::TasksOn;
  if (text == "tasks_off") return ExecutionMode::TasksOff;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected tasks_on or tasks_off)");
}

Boundary parse_boundary(std::string_view text) {
  if (text == "periodic") return Boundary::Periodic;
  if (text == "reflective") return Boundary::Reflective;
  throw ConfigError("unknown boundary '" + std::string(text) +
                    "' (expected periodic or reflective)");
}

}  // namespace minipic
