#include "minipic/patch.hpp"

namespace minipic {

FieldSet::FieldSet(int nx, int ny)
    : ex(nx, ny), ey(nx, ny), ez(nx, ny),
      bx(nx, ny), by(nx, ny), bz(nx, ny),
      jx(nx, ny), jy(nx, ny), jz(nx, ny),
      rho(nx, ny),
      jx_acc(nx, ny), jy_acc(nx, ny), jz_acc(nx, ny),
      rho_acc(nx, ny) {}

BinSubgrid::BinSubgrid(int bin_size, int ny, int shift)
    : jx(bin_size, ny), jy(bin_size, ny), jz(bin_size, ny), x_shift(shift) {}

void BinSubgrid::zero() {
  jx.fill(0);
  jy.fill(0);
  jz.fill(0);
}

namespace {

template <class... V>
void resize_all(std::size_t n, V&... v) {
  (v.resize(n), ...);
}

template <class... V>
void shrink_all(V&... v) {
  ((v.resize(1), v.shrink_to_fit()), ...);
}

}  // namespace

void GatherBuffer::size_to(std::size_t n) {
  resize_all(n, cell_ix, cell_iy, delta_x, delta_y, ex, ey, ez, bx, by, bz);
  state_ = State::Sized;
}

void GatherBuffer::release() {
  shrink_all(cell_ix, cell_iy, delta_x, delta_y, ex, ey, ez, bx, by, bz);
  state_ = State::Released;
}

Patch::Patch(const PatchGeometry& geometry, int n_species)
    : geom(geometry), fields(geometry.nx, geometry.ny), arenas(n_species), gather(n_species) {
  bin_subgrids.reserve(static_cast<std::size_t>(n_species) * geom.n_bins);
  for (int s = 0; s < n_species; ++s)
    for (int b = 0; b < geom.n_bins; ++b)
      bin_subgrids.emplace_back(geom.bin_size, geom.ny, b * geom.bin_size);
  for (auto& arena : arenas) arena.bin_offsets.assign(static_cast<std::size_t>(geom.n_bins) + 1, 0);
}

std::size_t Patch::particle_count() const {
  std::size_t n = 0;
  for (const auto& a : arenas) n += a.size();
  return n;
}

}  // namespace minipic
