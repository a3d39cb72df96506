#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "minipic/config.hpp"
#include "minipic/patch.hpp"

namespace minipic {

/// The decomposition hierarchy: collections (emulated ranks) own patches,
/// patches own per-species arenas partitioned into bins.
class Domain {
 public:
  explicit Domain(SimConfig config);

  const SimConfig& config() const { return config_; }
  int n_species() const { return static_cast<int>(config_.species.size()); }
  int n_patches() const { return static_cast<int>(patches_.size()); }
  int n_collections() const { return static_cast<int>(collections_.size()); }

  Patch& patch(int id) { return *patches_[id]; }
  const Patch& patch(int id) const { return *patches_[id]; }
  int patch_id(int ix, int iy) const { return iy * config_.patches_x + ix; }

  /// Neighbor at patch offset (ox, oy), wrapping periodic axes; -1 across a
  /// reflective wall.
  int neighbor(int id, int ox, int oy) const;
  /// Patch owning the cell that contains (x, y); -1 outside the domain.
  int patch_of(double x, double y) const;

  /// All patch ids along the Hilbert curve.
  const std::vector<int>& curve() const { return curve_; }
  /// Patch ids owned by collection c, in curve order.
  const std::vector<int>& collection(int c) const { return collections_[c]; }
  /// Reassigns ownership; owner[id] gives the new collection of patch id.
  void assign_owners(const std::vector<int>& owner);
  std::vector<int> owners() const;

  std::size_t particle_count() const;
  std::size_t particle_count(int ispec) const;

 private:
  SimConfig config_;
  std::vector<std::unique_ptr<Patch>> patches_;
  std::vector<int> curve_;
  std::vector<std::vector<int>> collections_;
};

/// Number of macro-particles build_domain creates for species ispec.
std::size_t initial_particle_count(const SimConfig& config, int ispec);

/// Validates the config, lays out particles on a regular per-cell lattice with
/// seeded thermal momenta, zeroes fields and deposits the initial charge.
Domain build_domain(const SimConfig& config);

}  // namespace minipic
