#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "minipic/domain.hpp"

namespace minipic {

/// Decomposition-independent copy of the physical state: owned field values
/// on the global grid and every particle of every species ordered by id.
struct StateSnapshot {
  int cells_x = 0, cells_y = 0;
  std::vector<std::vector<double>> fields;            // ex ey ez bx by bz jx jy jz, row i*cells_y + j
  std::vector<std::vector<ParticleRecord>> particles;  // per species, ascending id
};

StateSnapshot snapshot(const Domain& domain);

/// Exact bit comparison; on mismatch describes the first difference.
bool bitwise_equal(const StateSnapshot& a, const StateSnapshot& b, std::string* why = nullptr);

/// Per-patch arena contents in storage order, for layout-level comparison.
bool arenas_bitwise_equal(const Domain& a, const Domain& b, std::string* why = nullptr);

/// Recomputes rho from the particles and returns div E - rho at every owned
/// node (global row-major). E ghosts must be synchronized.
std::vector<double> gauss_residual(Domain& domain);

struct EnergyReport {
  double electric = 0, magnetic = 0, kinetic = 0;
  double total() const { return electric + magnetic + kinetic; }
};

/// Field energy 1/2 (E^2 + B^2) dx dy over owned cells plus sum of w m (gamma - 1) dx dy.
EnergyReport energy(const Domain& domain);

/// Per (species, patch) particle counts.
struct DensityRow {
  int species = 0, patch_ix = 0, patch_iy = 0;
  std::size_t count = 0;
};
std::vector<DensityRow> density_histogram(const Domain& domain);

}  // namespace minipic
