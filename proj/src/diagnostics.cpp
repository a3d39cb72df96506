#include "minipic/diagnostics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "minipic/exchange.hpp"

namespace minipic {

namespace {

constexpr Grid2D<double> FieldSet::*kComponents[] = {
    &FieldSet::ex, &FieldSet::ey, &FieldSet::ez, &FieldSet::bx, &FieldSet::by,
    &FieldSet::bz, &FieldSet::jx, &FieldSet::jy, &FieldSet::jz};
constexpr const char* kComponentNames[] = {"ex", "ey", "ez", "bx", "by", "bz", "jx", "jy", "jz"};

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

bool same_bits(const ParticleRecord& a, const ParticleRecord& b) {
  return a.id == b.id && same_bits(a.x, b.x) && same_bits(a.y, b.y) && same_bits(a.px, b.px) &&
         same_bits(a.py, b.py) && same_bits(a.pz, b.pz) && same_bits(a.weight, b.weight);
}

}  // namespace

StateSnapshot snapshot(const Domain& d) {
  const SimConfig& c = d.config();
  StateSnapshot s;
  s.cells_x = c.cells_x;
  s.cells_y = c.cells_y;
  for (auto member : kComponents) {
    std::vector<double> g(static_cast<std::size_t>(c.cells_x) * c.cells_y);
    for (int id = 0; id < d.n_patches(); ++id) {
      const Patch& p = d.patch(id);
      const Grid2D<double>& src = p.fields.*member;
      for (int i = 0; i < p.geom.nx; ++i)
        for (int j = 0; j < p.geom.ny; ++j)
          g[static_cast<std::size_t>(p.geom.cell_x0 + i) * c.cells_y + p.geom.cell_y0 + j] = src(i, j);
    }
    s.fields.push_back(std::move(g));
  }
  s.particles.resize(static_cast<std::size_t>(d.n_species()));
  for (int sp = 0; sp < d.n_species(); ++sp) {
    auto& v = s.particles[sp];
    v.reserve(d.particle_count(sp));
    for (int id = 0; id < d.n_patches(); ++id) {
      const ParticleArena& a = d.patch(id).arenas[sp];
      for (std::size_t k = 0; k < a.size(); ++k) v.push_back(a.record(k));
    }
    std::sort(v.begin(), v.end(), [](const ParticleRecord& a, const ParticleRecord& b) { return a.id < b.id; });
  }
  return s;
}

bool bitwise_equal(const StateSnapshot& a, const StateSnapshot& b, std::string* why) {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (a.cells_x != b.cells_x || a.cells_y != b.cells_y) return fail("grid size differs");
  for (std::size_t f = 0; f < a.fields.size(); ++f) {
    for (std::size_t k = 0; k < a.fields[f].size(); ++k) {
      if (!same_bits(a.fields[f][k], b.fields[f][k]))
        return fail(std::string(kComponentNames[f]) + " differs at cell (" + std::to_string(k / a.cells_y) + ", " +
                    std::to_string(k % a.cells_y) + ")");
    }
  }
  if (a.particles.size() != b.particles.size()) return fail("species count differs");
  for (std::size_t s = 0; s < a.particles.size(); ++s) {
    if (a.particles[s].size() != b.particles[s].size())
      return fail("species " + std::to_string(s) + " particle count differs");
    for (std::size_t k = 0; k < a.particles[s].size(); ++k)
      if (!same_bits(a.particles[s][k], b.particles[s][k]))
        return fail("species " + std::to_string(s) + " particle id " + std::to_string(a.particles[s][k].id) +
                    " differs");
  }
  return true;
}

bool arenas_bitwise_equal(const Domain& a, const Domain& b, std::string* why) {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (a.n_patches() != b.n_patches() || a.n_species() != b.n_species()) return fail("decomposition differs");
  for (int id = 0; id < a.n_patches(); ++id) {
    for (int s = 0; s < a.n_species(); ++s) {
      const ParticleArena& x = a.patch(id).arenas[s];
      const ParticleArena& y = b.patch(id).arenas[s];
      if (x.size() != y.size() || x.bin_offsets != y.bin_offsets)
        return fail("patch " + std::to_string(id) + " species " + std::to_string(s) + " layout differs");
      for (std::size_t k = 0; k < x.size(); ++k)
        if (!same_bits(x.record(k), y.record(k)))
          return fail("patch " + std::to_string(id) + " species " + std::to_string(s) + " slot " + std::to_string(k));
    }
  }
  return true;
}

std::vector<double> gauss_residual(Domain& d) {
  deposit_charge(d);
  const SimConfig& c = d.config();
  std::vector<double> r(static_cast<std::size_t>(c.cells_x) * c.cells_y);
  for (int id = 0; id < d.n_patches(); ++id) {
    const Patch& p = d.patch(id);
    const FieldSet& f = p.fields;
    for (int i = 0; i < p.geom.nx; ++i) {
      for (int j = 0; j < p.geom.ny; ++j) {
        const double div = (f.ex(i, j) - f.ex(i - 1, j)) / c.dx + (f.ey(i, j) - f.ey(i, j - 1)) / c.dy;
        r[static_cast<std::size_t>(p.geom.cell_x0 + i) * c.cells_y + p.geom.cell_y0 + j] = div - f.rho(i, j);
      }
    }
  }
  return r;
}

EnergyReport energy(const Domain& d) {
  const SimConfig& c = d.config();
  const double cell = c.dx * c.dy;
  EnergyReport e;
  for (int id = 0; id < d.n_patches(); ++id) {
    const Patch& p = d.patch(id);
    const FieldSet& f = p.fields;
    for (int i = 0; i < p.geom.nx; ++i) {
      for (int j = 0; j < p.geom.ny; ++j) {
        e.electric += 0.5 * (f.ex(i, j) * f.ex(i, j) + f.ey(i, j) * f.ey(i, j) + f.ez(i, j) * f.ez(i, j)) * cell;
        e.magnetic += 0.5 * (f.bx(i, j) * f.bx(i, j) + f.by(i, j) * f.by(i, j) + f.bz(i, j) * f.bz(i, j)) * cell;
      }
    }
    for (const ParticleArena& a : p.arenas) {
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double u2 = a.px[k] * a.px[k] + a.py[k] * a.py[k] + a.pz[k] * a.pz[k];
        // gamma - 1 without cancellation for small u
        e.kinetic += a.weight[k] * cell * a.mass * u2 / (std::sqrt(1.0 + u2) + 1.0);
      }
    }
  }
  return e;
}

std::vector<DensityRow> density_histogram(const Domain& d) {
  std::vector<DensityRow> rows;
  for (int s = 0; s < d.n_species(); ++s)
    for (int iy = 0; iy < d.config().patches_y; ++iy)
      for (int ix = 0; ix < d.config().patches_x; ++ix)
        rows.push_back({s, ix, iy, d.patch(d.patch_id(ix, iy)).arenas[s].size()});
  return rows;
}

}  // namespace minipic
