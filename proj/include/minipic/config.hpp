#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace minipic {

/// Raised for any configuration that violates a SimConfig/SpeciesSpec invariant.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExecutionMode { TasksOff, TasksOn };
enum class Boundary { Periodic, Reflective };
enum class InitLayout { Regular };

struct UniformProfile {
  double n0 = 1.0;  // [n_c]
};

/// Density n0 for x in [x_min, x_max), zero elsewhere. Lengths in c/omega_r.
struct SlabXProfile {
  double n0 = 1.0;
  double x_min = 0.0;
  double x_max = 0.0;
};

using DensityProfile = std::variant<UniformProfile, SlabXProfile>;

double density_at(const DensityProfile& profile, double x);

struct SpeciesSpec {
  std::string name;
  double charge = -1.0;       // [e]
  double mass = 1.0;          // [m_e]
  DensityProfile density = UniformProfile{};
  double temperature = 0.0;   // [m_e c^2]
  int particles_per_cell = 1;
  InitLayout init_layout = InitLayout::Regular;
};

struct SimConfig {
  int cells_x = 0;
  int cells_y = 0;
  double dx = 0.0;  // [c/omega_r]
  double dy = 0.0;
  double dt = 0.0;  // [1/omega_r]
  int patches_x = 1;
  int patches_y = 1;
  int bin_x_size = 1;
  int n_collections = 1;
  int workers_per_collection = 1;
  ExecutionMode mode = ExecutionMode::TasksOn;
  int n_iterations = 0;
  int lb_period = 0;  // 0 disables load balancing
  double cell_load = 0.0;
  Boundary boundary_x = Boundary::Periodic;
  Boundary boundary_y = Boundary::Periodic;
  std::vector<SpeciesSpec> species;
  std::uint64_t rng_seed = 0;

  int patch_cells_x() const { return patches_x > 0 ? cells_x / patches_x : 0; }
  int patch_cells_y() const { return patches_y > 0 ? cells_y / patches_y : 0; }
  int bins_per_patch() const { return bin_x_size > 0 ? patch_cells_x() / bin_x_size : 0; }
  int n_patches() const { return patches_x * patches_y; }
  double length_x() const { return cells_x * dx; }
  double length_y() const { return cells_y * dy; }
};

/// Smallest patch extent per direction: a 3-point stencil plus 3 ghost cells.
inline constexpr int kMinPatchCells = 6;

/// Throws ConfigError naming the first violated invariant.
void validate(const SimConfig& config);

/// Largest stable timestep of the 2D Yee scheme for this grid.
double courant_limit(double dx, double dy);

std::string_view to_string(ExecutionMode mode);
std::string_view to_string(Boundary boundary);
ExecutionMode parse_mode(std::string_view text);
Boundary parse_boundary(std::string_view text);

}  // namespace minipic
