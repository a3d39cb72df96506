#include "minipic/domain.hpp"

#include <cmath>
#include <random>

#include "minipic/exchange.hpp"
#include "minipic/load_balance.hpp"

namespace minipic {

namespace {

int wrap_index(int i, int n) { return ((i % n) + n) % n; }

/// Sub-cell lattice coordinate of the a-th of k regularly spaced positions.
double lattice(int cell, int a, int k, double h) {
  return (cell + (a + 0.5) / k) * h;
}

}  // namespace

Domain::Domain(SimConfig config) : config_(std::move(config)) {
  validate(config_);
  const int nx = config_.patch_cells_x();
  const int ny = config_.patch_cells_y();
  patches_.reserve(static_cast<std::size_t>(config_.n_patches()));
  for (int iy = 0; iy < config_.patches_y; ++iy) {
    for (int ix = 0; ix < config_.patches_x; ++ix) {
      PatchGeometry g;
      g.id = patch_id(ix, iy);
      g.ix = ix;
      g.iy = iy;
      g.cell_x0 = ix * nx;
      g.cell_y0 = iy * ny;
      g.nx = nx;
      g.ny = ny;
      g.bin_size = config_.bin_x_size;
      g.n_bins = config_.bins_per_patch();
      g.dx = config_.dx;
      g.dy = config_.dy;
      auto patch = std::make_unique<Patch>(g, n_species());
      for (int s = 0; s < n_species(); ++s) {
        patch->arenas[s].charge = config_.species[s].charge;
        patch->arenas[s].mass = config_.species[s].mass;
      }
      patches_.push_back(std::move(patch));
    }
  }
  curve_ = hilbert_patch_order(config_.patches_x, config_.patches_y);
  const std::vector<double> unit(curve_.size(), 1.0);
  const std::vector<int> segment = greedy_prefix_partition(unit, config_.n_collections);
  std::vector<int> owner(curve_.size());
  for (std::size_t k = 0; k < curve_.size(); ++k) owner[curve_[k]] = segment[k];
  collections_.resize(static_cast<std::size_t>(config_.n_collections));
  assign_owners(owner);
}

int Domain::neighbor(int id, int ox, int oy) const {
  const Patch& p = patch(id);
  int ix = p.geom.ix + ox;
  int iy = p.geom.iy + oy;
  if (ix < 0 || ix >= config_.patches_x) {
    if (config_.boundary_x == Boundary::Reflective) return -1;
    ix = wrap_index(ix, config_.patches_x);
  }
  if (iy < 0 || iy >= config_.patches_y) {
    if (config_.boundary_y == Boundary::Reflective) return -1;
    iy = wrap_index(iy, config_.patches_y);
  }
  return patch_id(ix, iy);
}

int Domain::patch_of(double x, double y) const {
  const int cx = cell_of(x, 1.0 / config_.dx);
  const int cy = cell_of(y, 1.0 / config_.dy);
  if (cx < 0 || cx >= config_.cells_x || cy < 0 || cy >= config_.cells_y) return -1;
  return patch_id(cx / config_.patch_cells_x(), cy / config_.patch_cells_y());
}

void Domain::assign_owners(const std::vector<int>& owner) {
  for (auto& c : collections_) c.clear();
  for (int id : curve_) {
    patches_[id]->owner_collection = owner[id];
    collections_[owner[id]].push_back(id);
  }
}

std::vector<int> Domain::owners() const {
  std::vector<int> owner(patches_.size());
  for (std::size_t id = 0; id < patches_.size(); ++id) owner[id] = patches_[id]->owner_collection;
  return owner;
}

std::size_t Domain::particle_count() const {
  std::size_t n = 0;
  for (const auto& p : patches_) n += p->particle_count();
  return n;
}

std::size_t Domain::particle_count(int ispec) const {
  std::size_t n = 0;
  for (const auto& p : patches_) n += p->arenas[ispec].size();
  return n;
}

std::size_t initial_particle_count(const SimConfig& config, int ispec) {
  const SpeciesSpec& s = config.species.at(ispec);
  const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(s.particles_per_cell))));
  std::size_t columns = 0;
  for (int i = 0; i < config.cells_x; ++i)
    for (int a = 0; a < k; ++a)
      if (density_at(s.density, lattice(i, a, k, config.dx)) > 0.0) ++columns;
  return columns * static_cast<std::size_t>(config.cells_y) * k;
}

Domain build_domain(const SimConfig& config) {
  Domain domain(config);
  const int nx = config.patch_cells_x();
  const int ny = config.patch_cells_y();

  for (int ispec = 0; ispec < domain.n_species(); ++ispec) {
    const SpeciesSpec& s = config.species[ispec];
    const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(s.particles_per_cell))));
    // Momenta are stored per unit species mass (gamma v); p = m u then has variance m T.
    const double sigma = std::sqrt(s.temperature / s.mass);

    std::seed_seq seq{static_cast<std::uint32_t>(config.rng_seed),
                      static_cast<std::uint32_t>(config.rng_seed >> 32),
                      static_cast<std::uint32_t>(ispec)};
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> normal(0.0, 1.0);

    for (int id = 0; id < domain.n_patches(); ++id) {
      const Patch& p = domain.patch(id);
      const std::size_t estimate = static_cast<std::size_t>(p.geom.nx) * p.geom.ny * s.particles_per_cell;
      if (std::holds_alternative<UniformProfile>(s.density))
        domain.patch(id).arenas[ispec].reserve(estimate);
    }

    // Sequential walk in id order keeps the sampled momenta independent of the
    // decomposition.
    std::uint64_t next_id = 0;
    for (int j = 0; j < config.cells_y; ++j) {
      for (int b = 0; b < k; ++b) {
        const double y = lattice(j, b, k, config.dy);
        for (int i = 0; i < config.cells_x; ++i) {
          for (int a = 0; a < k; ++a) {
            const double x = lattice(i, a, k, config.dx);
            const double n0 = density_at(s.density, x);
            if (!(n0 > 0.0)) continue;
            ParticleRecord rec;
            rec.x = x;
            rec.y = y;
            rec.weight = n0 / s.particles_per_cell;
            rec.id = next_id++;
            if (s.temperature > 0.0) {
              rec.px = sigma * normal(engine);
              rec.py = sigma * normal(engine);
              rec.pz = sigma * normal(engine);
            }
            domain.patch(domain.patch_id(i / nx, j / ny)).arenas[ispec].push_back(rec);
          }
        }
      }
    }
  }

  for (int id = 0; id < domain.n_patches(); ++id) {
    Patch& p = domain.patch(id);
    for (auto& arena : p.arenas) sort_into_bins(arena, p.geom.bin_layout());
  }
  deposit_charge(domain);
  return domain;
}

}  // namespace minipic
