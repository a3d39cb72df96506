#include "minipic/exchange.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "minipic/domain.hpp"
#include "minipic/kernels.hpp"

namespace minipic {

namespace {

struct Range {
  int lo, hi;
};

Range side_range(int side, int n) {
  if (side < 0) return {-kGhost, 0};
  if (side > 0) return {n, n + kGhost};
  return {0, n};
}

struct Walls {
  bool x_lo = false, x_hi = false, y_lo = false, y_hi = false;
};

Walls walls_of(const Domain& d, const Patch& p) {
  const SimConfig& c = d.config();
  Walls w;
  if (c.boundary_x == Boundary::Reflective) {
    w.x_lo = p.geom.ix == 0;
    w.x_hi = p.geom.ix == c.patches_x - 1;
  }
  if (c.boundary_y == Boundary::Reflective) {
    w.y_lo = p.geom.iy == 0;
    w.y_hi = p.geom.iy == c.patches_y - 1;
  }
  return w;
}

constexpr std::array<std::array<int, 2>, 8> kOffsets{{
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}}};

std::int64_t negate(std::int64_t v) {
  return static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(v));
}

/// Grid view with the two axes optionally swapped so the wall logic is
/// written once for x.
template <class T>
struct AxisView {
  Grid2D<T>& g;
  bool swap;
  T& operator()(int a, int b) const { return swap ? g(b, a) : g(a, b); }
  int n_along() const { return swap ? g.ny() : g.nx(); }
  int n_across() const { return swap ? g.nx() : g.ny(); }
};

// Image-charge fold of accumulator ghosts through a conducting wall: components
// dual along the wall normal are even, primal ones odd (the wall node cancels).
void fold_wall(AxisView<std::int64_t> v, bool dual, bool low) {
  const int n = v.n_along();
  for (int b = -kGhost; b < v.n_across() + kGhost; ++b) {
    if (low) {
      if (dual) {
        for (int k = 1; k <= kGhost; ++k) {
          fixed::add(v(k - 1, b), v(-k, b));
          v(-k, b) = 0;
        }
      } else {
        for (int k = 1; k <= kGhost; ++k) {
          fixed::add(v(k, b), negate(v(-k, b)));
          v(-k, b) = 0;
        }
        v(0, b) = 0;
      }
    } else {
      if (dual) {
        for (int m = 0; m < kGhost; ++m) {
          fixed::add(v(n - 1 - m, b), v(n + m, b));
          v(n + m, b) = 0;
        }
      } else {
        for (int k = 1; k < kGhost; ++k) {
          fixed::add(v(n - k, b), negate(v(n + k, b)));
          v(n + k, b) = 0;
        }
        v(n, b) = 0;
      }
    }
  }
}

void mirror_wall(AxisView<double> v, bool dual, bool low) {
  const int n = v.n_along();
  for (int b = -kGhost; b < v.n_across() + kGhost; ++b) {
    if (low) {
      for (int k = 1; k <= kGhost; ++k) v(-k, b) = dual ? v(k - 1, b) : -v(k, b);
    } else if (dual) {
      for (int m = 0; m < kGhost; ++m) v(n + m, b) = v(n - 1 - m, b);
    } else {
      v(n, b) = 0.0;
      for (int k = 1; k < kGhost; ++k) v(n + k, b) = -v(n - k, b);
    }
  }
}

struct Stagger {
  bool dual_x, dual_y;
};

constexpr Stagger kJx{true, false}, kJy{false, true}, kJz{false, false}, kRho{false, false};
constexpr Stagger kEx{true, false}, kEy{false, true}, kEz{false, false};
constexpr Stagger kBx{false, true}, kBy{true, false}, kBz{true, true};

void fold_walls(FixedGrid& g, Stagger s, const Walls& w) {
  if (w.x_lo) fold_wall({g, false}, s.dual_x, true);
  if (w.x_hi) fold_wall({g, false}, s.dual_x, false);
  if (w.y_lo) fold_wall({g, true}, s.dual_y, true);
  if (w.y_hi) fold_wall({g, true}, s.dual_y, false);
}

void mirror_walls(Grid2D<double>& g, Stagger s, const Walls& w) {
  if (w.x_lo) mirror_wall({g, false}, s.dual_x, true);
  if (w.x_hi) mirror_wall({g, false}, s.dual_x, false);
  if (w.y_lo) mirror_wall({g, true}, s.dual_y, true);
  if (w.y_hi) mirror_wall({g, true}, s.dual_y, false);
}

/// Adds the ghost strip of neighbor q facing p into p's owned cells.
void pull_ghosts(FixedGrid& dst, const FixedGrid& src, int ox, int oy) {
  const int nx = dst.nx();
  const int ny = dst.ny();
  const Range rx = side_range(-ox, nx);
  const Range ry = side_range(-oy, ny);
  for (int i = rx.lo; i < rx.hi; ++i)
    for (int j = ry.lo; j < ry.hi; ++j) fixed::add(dst(i + ox * nx, j + oy * ny), src(i, j));
}

/// Copies the owned cells of neighbor q into p's ghost strip on side (ox, oy).
void copy_ghosts(Grid2D<double>& dst, const Grid2D<double>& src, int ox, int oy) {
  const int nx = dst.nx();
  const int ny = dst.ny();
  const Range rx = side_range(ox, nx);
  const Range ry = side_range(oy, ny);
  for (int i = rx.lo; i < rx.hi; ++i)
    for (int j = ry.lo; j < ry.hi; ++j) dst(i, j) = src(i - ox * nx, j - oy * ny);
}

void publish(Grid2D<double>& out, FixedGrid& acc) {
  for (int i = -kGhost; i < out.nx() + kGhost; ++i)
    for (int j = -kGhost; j < out.ny() + kGhost; ++j)
      out(i, j) = out.interior(i, j) ? fixed::decode(acc(i, j)) : 0.0;
  acc.fill(0);
}

const PatchRunner& resolve(const Domain& d, const PatchRunner& run, PatchRunner& fallback) {
  if (run) return run;
  fallback = sequential_runner(d);
  return fallback;
}

struct AccumulatorSet {
  Grid2D<double>* out;
  FixedGrid* acc;
  Stagger stagger;
};

template <class Select>
void reduce_accumulators(Domain& d, const PatchRunner& run, Select select) {
  run([&](int id) {
    Patch& p = d.patch(id);
    const Walls w = walls_of(d, p);
    for (const AccumulatorSet& a : select(p)) fold_walls(*a.acc, a.stagger, w);
  });
  run([&](int id) {
    Patch& p = d.patch(id);
    auto mine = select(p);
    for (const auto& o : kOffsets) {
      const int q = d.neighbor(id, o[0], o[1]);
      if (q < 0) continue;
      auto theirs = select(d.patch(q));
      for (std::size_t k = 0; k < mine.size(); ++k) pull_ghosts(*mine[k].acc, *theirs[k].acc, o[0], o[1]);
    }
  });
  run([&](int id) {
    for (const AccumulatorSet& a : select(d.patch(id))) publish(*a.out, *a.acc);
  });
}

std::array<AccumulatorSet, 3> current_set(Patch& p) {
  FieldSet& f = p.fields;
  return {{{&f.jx, &f.jx_acc, kJx}, {&f.jy, &f.jy_acc, kJy}, {&f.jz, &f.jz_acc, kJz}}};
}

std::array<AccumulatorSet, 1> charge_set(Patch& p) {
  return {{{&p.fields.rho, &p.fields.rho_acc, kRho}}};
}

struct FieldRef {
  Grid2D<double> FieldSet::*member;
  Stagger stagger;
};

constexpr std::array<FieldRef, 3> kElectric{{{&FieldSet::ex, kEx}, {&FieldSet::ey, kEy}, {&FieldSet::ez, kEz}}};
constexpr std::array<FieldRef, 3> kMagnetic{{{&FieldSet::bx, kBx}, {&FieldSet::by, kBy}, {&FieldSet::bz, kBz}}};

void sync_one_patch(Domain& d, int id, FieldGroup group) {
  Patch& p = d.patch(id);
  const Walls w = walls_of(d, p);
  std::array<int, 8> nbr;
  for (std::size_t k = 0; k < kOffsets.size(); ++k) nbr[k] = d.neighbor(id, kOffsets[k][0], kOffsets[k][1]);
  auto sync = [&](const std::array<FieldRef, 3>& refs) {
    for (const FieldRef& r : refs) {
      Grid2D<double>& g = p.fields.*r.member;
      for (std::size_t k = 0; k < kOffsets.size(); ++k)
        if (nbr[k] >= 0) copy_ghosts(g, d.patch(nbr[k]).fields.*r.member, kOffsets[k][0], kOffsets[k][1]);
      mirror_walls(g, r.stagger, w);
    }
  };
  if (group != FieldGroup::Magnetic) sync(kElectric);
  if (group != FieldGroup::Electric) sync(kMagnetic);
}

// Returns x inside [0, length) and flips p on reflection.
void apply_axis_bc(double& x, double& p, double length, Boundary b) {
  if (x >= 0.0 && x < length) return;
  if (b == Boundary::Periodic) {
    if (x < 0.0) x += length;
    else x -= length;
  } else {
    x = x < 0.0 ? -x : 2.0 * length - x;
    p = -p;
  }
  if (x >= length) x = std::nextafter(length, 0.0);
  if (x < 0.0) x = 0.0;
}

}  // namespace

PatchRunner sequential_runner(const Domain& domain) {
  const int n = domain.n_patches();
  return [n](const PatchVisitor& visit) {
    for (int id = 0; id < n; ++id) visit(id);
  };
}

MigrationStats apply_particle_bc_and_migrate(Domain& d, const PatchRunner& runner) {
  PatchRunner fallback;
  const PatchRunner& run = resolve(d, runner, fallback);
  const SimConfig& c = d.config();
  const double lx = c.length_x();
  const double ly = c.length_y();

  run([&](int id) {
    Patch& p = d.patch(id);
    p.outbox.clear();
    std::array<int, 9> reach;
    reach[0] = id;
    for (std::size_t k = 0; k < kOffsets.size(); ++k) reach[k + 1] = d.neighbor(id, kOffsets[k][0], kOffsets[k][1]);
    for (int s = 0; s < d.n_species(); ++s) {
      ParticleArena& a = p.arenas[s];
      std::vector<std::uint8_t> keep(a.size(), 1);
      bool any_left = false;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.flag[i] == ExchangeFlag::Stay) continue;
        apply_axis_bc(a.x[i], a.px[i], lx, c.boundary_x);
        apply_axis_bc(a.y[i], a.py[i], ly, c.boundary_y);
        a.flag[i] = ExchangeFlag::Stay;
        const int dest = d.patch_of(a.x[i], a.y[i]);
        if (dest == id) continue;
        if (dest < 0 || std::find(reach.begin(), reach.end(), dest) == reach.end())
          throw TopologyError("particle " + std::to_string(a.id[i]) + " of patch " + std::to_string(id) +
                              " targets non-neighbor patch " + std::to_string(dest));
        p.outbox.push_back({dest, s, a.record(i)});
        keep[i] = 0;
        any_left = true;
      }
      if (any_left) a.compact(keep);
    }
  });

  std::vector<MigrationStats> per_patch(static_cast<std::size_t>(d.n_patches()));
  run([&](int id) {
    Patch& p = d.patch(id);
    std::array<int, 9> sources;
    int n_src = 0;
    sources[n_src++] = id;
    for (const auto& o : kOffsets) {
      const int q = d.neighbor(id, o[0], o[1]);
      if (q >= 0 && std::find(sources.begin(), sources.begin() + n_src, q) == sources.begin() + n_src)
        sources[n_src++] = q;
    }
    std::sort(sources.begin(), sources.begin() + n_src);
    MigrationStats& st = per_patch[id];
    for (int k = 0; k < n_src; ++k) {
      const Patch& q = d.patch(sources[k]);
      for (const Mover& m : q.outbox) {
        if (m.dest_patch != id) continue;
        p.arenas[m.species].push_back(m.particle);
        if (q.owner_collection == p.owner_collection) ++st.intra_collection;
        else ++st.inter_collection;
      }
    }
    for (auto& a : p.arenas) sort_into_bins(a, p.geom.bin_layout());
  });

  MigrationStats total;
  for (const auto& st : per_patch) {
    total.intra_collection += st.intra_collection;
    total.inter_collection += st.inter_collection;
  }
  return total;
}

void sum_current_ghosts(Domain& d, const PatchRunner& runner) {
  PatchRunner fallback;
  reduce_accumulators(d, resolve(d, runner, fallback), current_set);
}

void sync_field_ghosts(Domain& d, FieldGroup group, const PatchRunner& runner) {
  PatchRunner fallback;
  resolve(d, runner, fallback)([&](int id) { sync_one_patch(d, id, group); });
}

void deposit_charge(Domain& d, const PatchRunner& runner) {
  PatchRunner fallback;
  const PatchRunner& run = resolve(d, runner, fallback);
  run([&](int id) {
    Patch& p = d.patch(id);
    p.fields.rho_acc.fill(0);
    for (const auto& a : p.arenas)
      deposit_charge(a, p.fields.rho_acc, p.geom.cell_x0, p.geom.cell_y0, 1.0 / p.geom.dx, 1.0 / p.geom.dy);
  });
  reduce_accumulators(d, run, charge_set);
}

void maxwell_step(Domain& d, double dt, const PatchRunner& runner) {
  PatchRunner fallback;
  const PatchRunner& run = resolve(d, runner, fallback);
  run([&](int id) { advance_b_half(d.patch(id), dt); });
  sync_field_ghosts(d, FieldGroup::Magnetic, run);
  run([&](int id) { advance_e(d.patch(id), dt); });
  sync_field_ghosts(d, FieldGroup::Electric, run);
  run([&](int id) { advance_b_half(d.patch(id), dt); });
  sync_field_ghosts(d, FieldGroup::Magnetic, run);
}

}  // namespace minipic
