#pragma once

#include <cstdint>
#include <memory>
#include <new>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "minipic/grid.hpp"
#include "minipic/particles.hpp"

namespace minipic {

/// Yee-staggered fields of one patch. Index (i, j) addresses primal node
/// (i, j) for primal directions and the half-point (i + 1/2) for dual
/// directions:
///   Ex, Jx: dual x, primal y      Bx: primal x, dual y
///   Ey, Jy: primal x, dual y      By: dual x, primal y
///   Ez, Jz, rho: primal, primal   Bz: dual x, dual y
struct FieldSet {
  Grid2D<double> ex, ey, ez;
  Grid2D<double> bx, by, bz;
  Grid2D<double> jx, jy, jz;
  Grid2D<double> rho;
  // Fixed-point accumulators fed by the bin reductions and charge deposition.
  FixedGrid jx_acc, jy_acc, jz_acc;
  FixedGrid rho_acc;

  FieldSet() = default;
  FieldSet(int nx, int ny);
};

/// Per-(species, bin) current subgrid covering bin_size x ny cells plus ghosts.
struct BinSubgrid {
  FixedGrid jx, jy, jz;
  int x_shift = 0;  // ibin * bin_size

  BinSubgrid() = default;
  BinSubgrid(int bin_size, int ny, int shift);
  void zero();
};

/// Lifecycle misuse of a GatherBuffer.
class LifecycleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Leaves trivially constructible elements uninitialized on resize.
template <class T>
struct DefaultInitAllocator : std::allocator<T> {
  template <class U>
  struct rebind {
    using other = DefaultInitAllocator<U>;
  };
  DefaultInitAllocator() = default;
  template <class U>
  DefaultInitAllocator(const DefaultInitAllocator<U>&) noexcept {}

  template <class U>
  void construct(U* p) noexcept(std::is_nothrow_default_constructible_v<U>) {
    ::new (static_cast<void*>(p)) U;
  }
  template <class U, class... Args>
  void construct(U* p, Args&&... args) {
    ::new (static_cast<void*>(p)) U(std::forward<Args>(args)...);
  }
};

template <class T>
using ScratchVector = std::vector<T, DefaultInitAllocator<T>>;

/// Per-particle scratch produced by interpolation and consumed by push and
/// projection: pre-push nearest primal node, displacement from it, and the
/// gathered fields. Sized while a (patch, species) is in flight, then shrunk
/// back to a single element.
class GatherBuffer {
 public:
  enum class State { Released, Sized };

  ScratchVector<int> cell_ix, cell_iy;
  ScratchVector<double> delta_x, delta_y;
  ScratchVector<double> ex, ey, ez;
  ScratchVector<double> bx, by, bz;

  GatherBuffer() { release(); }

  void size_to(std::size_t n);
  void release();
  State state() const { return state_; }
  std::size_t size() const { return cell_ix.size(); }

 private:
  State state_ = State::Released;
};

struct PatchGeometry {
  int id = 0;
  int ix = 0, iy = 0;          // patch coordinates
  int cell_x0 = 0, cell_y0 = 0;  // global index of the first owned cell
  int nx = 0, ny = 0;          // owned cells
  int bin_size = 1;
  int n_bins = 1;
  double dx = 1.0, dy = 1.0;

  double x_min() const { return cell_x0 * dx; }
  double x_max() const { return (cell_x0 + nx) * dx; }
  double y_min() const { return cell_y0 * dy; }
  double y_max() const { return (cell_y0 + ny) * dy; }
  BinLayout bin_layout() const { return {cell_x0, nx, bin_size, 1.0 / dx}; }
};

/// Particle leaving its patch during the exchange phase.
struct Mover {
  int dest_patch = -1;
  int species = 0;
  ParticleRecord particle;
};

struct Patch {
  PatchGeometry geom;
  FieldSet fields;
  std::vector<ParticleArena> arenas;       // one per species
  std::vector<BinSubgrid> bin_subgrids;    // index ispec * n_bins + ibin
  std::vector<GatherBuffer> gather;        // one per species
  int owner_collection = 0;
  std::vector<Mover> outbox;

  Patch() = default;
  Patch(const PatchGeometry& geometry, int n_species);

  BinSubgrid& subgrid(int ispec, int ibin) { return bin_subgrids[ispec * geom.n_bins + ibin]; }
  const BinSubgrid& subgrid(int ispec, int ibin) const {
    return bin_subgrids[ispec * geom.n_bins + ibin];
  }
  std::size_t particle_count() const;
};

}  // namespace minipic
