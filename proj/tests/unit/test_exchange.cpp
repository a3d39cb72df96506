#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "minipic/diagnostics.hpp"
#include "minipic/domain.hpp"
#include "minipic/exchange.hpp"
#include "minipic/kernels.hpp"
#include "minipic/scheduler.hpp"

using namespace minipic;

namespace {

void flag_all(Domain& d) {
  for (int id = 0; id < d.n_patches(); ++id)
    for (int s = 0; s < d.n_species(); ++s)
      for (int b = 0; b < d.patch(id).geom.n_bins; ++b) pre_bc(d.patch(id), s, b);
}

double wrap(double x, double L) {
  double r = std::fmod(x, L);
  return r < 0 ? r + L : r;
}

double global_value(int field, int i, int j) { return 1000.0 * field + 37.0 * i + 0.25 * j + 0.001 * i * j; }

}  // namespace

TEST_CASE("migration delivers every particle to the patch containing it") {
  SimConfig c = testutil::small_plasma(48, 36, 4, 3, 3);
  c.species = {testutil::species("e", -1.0, 1.0, 0.0, 9)};
  Domain d = build_domain(c);
  REQUIRE(d.particle_count() > 10000);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(-1.0, 1.0);
  std::map<std::uint64_t, std::pair<double, double>> expect;
  for (int id = 0; id < d.n_patches(); ++id) {
    ParticleArena& a = d.patch(id).arenas[0];
    for (std::size_t k = 0; k < a.size(); ++k) {
      a.x[k] += ux(rng) * c.dx;
      a.y[k] += ux(rng) * c.dy;
      expect[a.id[k]] = {wrap(a.x[k], c.length_x()), wrap(a.y[k], c.length_y())};
    }
  }
  flag_all(d);
  const MigrationStats st = apply_particle_bc_and_migrate(d);
  CHECK(st.intra_collection > 0);
  CHECK(st.inter_collection == 0);

  std::set<std::uint64_t> seen;
  for (int id = 0; id < d.n_patches(); ++id) {
    const Patch& p = d.patch(id);
    const ParticleArena& a = p.arenas[0];
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(d.patch_of(a.x[k], a.y[k]) == id);
      CHECK(a.flag[k] == ExchangeFlag::Stay);
      CHECK(a.x[k] == doctest::Approx(expect.at(a.id[k]).first));
      CHECK(a.y[k] == doctest::Approx(expect.at(a.id[k]).second));
      CHECK(seen.insert(a.id[k]).second);
    }
    for (std::size_t b = 0; b < a.n_bins(); ++b)
      for (std::size_t k = a.bin_begin(b); k < a.bin_end(b); ++k)
        CHECK(p.geom.bin_layout().bin_of(a.x[k]) == static_cast<int>(b));
  }
  CHECK(seen.size() == expect.size());
}

TEST_CASE("reflective walls mirror position and momentum") {
  SimConfig c = testutil::small_plasma(16, 16, 2, 2, 2);
  c.boundary_x = Boundary::Reflective;
  c.boundary_y = Boundary::Reflective;
  c.species = {testutil::species("e", -1.0, 1.0, 0.0, 1)};
  Domain d = build_domain(c);
  ParticleArena& a = d.patch(0).arenas[0];
  REQUIRE(a.size() > 2);
  a.x[0] = -0.05;
  a.px[0] = -0.3;
  a.y[1] = -0.07;
  a.py[1] = -0.2;
  ParticleArena& b = d.patch(3).arenas[0];
  b.x[0] = c.length_x() + 0.01;
  b.px[0] = 0.4;
  const std::uint64_t id0 = a.id[0], id1 = a.id[1], id2 = b.id[0];
  flag_all(d);
  apply_particle_bc_and_migrate(d);
  std::map<std::uint64_t, ParticleRecord> all;
  for (int id = 0; id < d.n_patches(); ++id)
    for (std::size_t k = 0; k < d.patch(id).arenas[0].size(); ++k)
      all[d.patch(id).arenas[0].id[k]] = d.patch(id).arenas[0].record(k);
  CHECK(all.at(id0).x == doctest::Approx(0.05));
  CHECK(all.at(id0).px == doctest::Approx(0.3));
  CHECK(all.at(id1).y == doctest::Approx(0.07));
  CHECK(all.at(id1).py == doctest::Approx(0.2));
  CHECK(all.at(id2).x == doctest::Approx(c.length_x() - 0.01));
  CHECK(all.at(id2).px == doctest::Approx(-0.4));
  CHECK(d.particle_count() == 256);
}

TEST_CASE("periodic wrap keeps coordinates inside the domain") {
  SimConfig c = testutil::small_plasma(16, 16, 2, 2, 2);
  c.species = {testutil::species("e", -1.0, 1.0, 0.0, 1)};
  Domain d = build_domain(c);
  ParticleArena& a = d.patch(0).arenas[0];
  a.x[0] = -1e-17;
  flag_all(d);
  apply_particle_bc_and_migrate(d);
  for (int id = 0; id < d.n_patches(); ++id)
    for (double x : d.patch(id).arenas[0].x) {
      CHECK(x >= 0.0);
      CHECK(x < c.length_x());
    }
}

TEST_CASE("a particle jumping past its neighbors raises TopologyError") {
  SimConfig c = testutil::small_plasma(32, 16, 4, 1, 2);
  c.species = {testutil::species("e", -1.0, 1.0, 0.0, 1)};
  Domain d = build_domain(c);
  d.patch(0).arenas[0].x[0] += 2.5 * 8 * c.dx;
  flag_all(d);
  CHECK_THROWS_AS(apply_particle_bc_and_migrate(d), TopologyError);
}

TEST_CASE("periodic current ghost sum conserves the total") {
  SimConfig c = testutil::small_plasma(24, 18, 3, 3, 2);
  c.species.clear();
  Domain d = build_domain(c);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> u(-(1LL << 40), 1LL << 40);
  std::int64_t total[3] = {0, 0, 0};
  for (int id = 0; id < d.n_patches(); ++id) {
    FieldSet& f = d.patch(id).fields;
    int k = 0;
    for (FixedGrid* g : {&f.jx_acc, &f.jy_acc, &f.jz_acc}) {
      for (auto& v : g->raw()) {
        v = u(rng);
        total[k] += v;
      }
      ++k;
    }
  }
  sum_current_ghosts(d);
  double sum[3] = {0, 0, 0};
  for (int id = 0; id < d.n_patches(); ++id) {
    const FieldSet& f = d.patch(id).fields;
    int k = 0;
    for (const Grid2D<double>* g : {&f.jx, &f.jy, &f.jz}) {
      for (int i = -kGhost; i < g->nx() + kGhost; ++i)
        for (int j = -kGhost; j < g->ny() + kGhost; ++j) {
          if (!g->interior(i, j)) CHECK((*g)(i, j) == 0.0);
          sum[k] += (*g)(i, j);
        }
      ++k;
    }
    for (auto v : f.jx_acc.raw()) CHECK(v == 0);
  }
  for (int k = 0; k < 3; ++k) CHECK(sum[k] == doctest::Approx(fixed::decode(total[k])).epsilon(1e-12));
}

TEST_CASE("periodic field ghosts hold the wrapped neighbor values") {
  SimConfig c = testutil::small_plasma(24, 18, 3, 2, 2);
  c.species.clear();
  Domain d = build_domain(c);
  for (int id = 0; id < d.n_patches(); ++id) {
    Patch& p = d.patch(id);
    int k = 0;
    for (auto* g : {&p.fields.ex, &p.fields.ey, &p.fields.ez, &p.fields.bx, &p.fields.by, &p.fields.bz}) {
      g->fill(-1.0);
      for (int i = 0; i < p.geom.nx; ++i)
        for (int j = 0; j < p.geom.ny; ++j) (*g)(i, j) = global_value(k, p.geom.cell_x0 + i, p.geom.cell_y0 + j);
      ++k;
    }
  }
  sync_field_ghosts(d);
  for (int id = 0; id < d.n_patches(); ++id) {
    const Patch& p = d.patch(id);
    int k = 0;
    for (auto* g : {&p.fields.ex, &p.fields.ey, &p.fields.ez, &p.fields.bx, &p.fields.by, &p.fields.bz}) {
      for (int i = -kGhost; i < p.geom.nx + kGhost; ++i)
        for (int j = -kGhost; j < p.geom.ny + kGhost; ++j) {
          const int gi = ((p.geom.cell_x0 + i) % c.cells_x + c.cells_x) % c.cells_x;
          const int gj = ((p.geom.cell_y0 + j) % c.cells_y + c.cells_y) % c.cells_y;
          REQUIRE((*g)(i, j) == global_value(k, gi, gj));
        }
      ++k;
    }
  }
}

TEST_CASE("reflective field ghosts follow the conductor parity") {
  SimConfig c = testutil::small_plasma(24, 18, 3, 2, 2);
  c.boundary_x = Boundary::Reflective;
  c.species.clear();
  Domain d = build_domain(c);
  for (int id = 0; id < d.n_patches(); ++id) {
    Patch& p = d.patch(id);
    int k = 0;
    for (auto* g : {&p.fields.ex, &p.fields.ey, &p.fields.ez, &p.fields.bx, &p.fields.by, &p.fields.bz}) {
      for (int i = 0; i < p.geom.nx; ++i)
        for (int j = 0; j < p.geom.ny; ++j) (*g)(i, j) = global_value(k, p.geom.cell_x0 + i, p.geom.cell_y0 + j);
      ++k;
    }
  }
  sync_field_ghosts(d);
  // dual along x: Ex, By, Bz are even; primal: Ey, Ez, Bx are odd
  const bool dual_x[6] = {true, false, false, false, true, true};
  const Patch& left = d.patch(d.patch_id(0, 0));
  const Patch& right = d.patch(d.patch_id(2, 0));
  int k = 0;
  for (auto member : {&FieldSet::ex, &FieldSet::ey, &FieldSet::ez, &FieldSet::bx, &FieldSet::by, &FieldSet::bz}) {
    const auto& gl = left.fields.*member;
    const auto& gr = right.fields.*member;
    const int n = gr.nx();
    for (int j = 0; j < gl.ny(); ++j) {
      for (int m = 1; m <= kGhost; ++m) {
        if (dual_x[k]) {
          CHECK(gl(-m, j) == gl(m - 1, j));
          CHECK(gr(n + m - 1, j) == gr(n - m, j));
        } else {
          CHECK(gl(-m, j) == -gl(m, j));
          if (m < kGhost) CHECK(gr(n + m, j) == -gr(n - m, j));
        }
      }
      if (!dual_x[k]) CHECK(gr(n, j) == 0.0);
    }
    ++k;
  }
}

TEST_CASE("charge deposit conserves the total charge") {
  SimConfig c = testutil::small_plasma(24, 24, 3, 2, 2);
  c.species = {testutil::species("e", -1.0, 1.0, 0.0, 9, SlabXProfile{3.0, 1.0, 3.3})};
  Domain d = build_domain(c);
  double q_particles = 0.0;
  for (int id = 0; id < d.n_patches(); ++id)
    for (double w : d.patch(id).arenas[0].weight) q_particles -= w;
  double q_grid = 0.0;
  for (int id = 0; id < d.n_patches(); ++id) {
    const Patch& p = d.patch(id);
    for (int i = 0; i < p.geom.nx; ++i)
      for (int j = 0; j < p.geom.ny; ++j) q_grid += p.fields.rho(i, j);
  }
  CHECK(q_grid == doctest::Approx(q_particles).epsilon(1e-12));
  CHECK(q_particles < -100.0);
}

TEST_CASE("Gauss residual of a neutral lattice at rest is exactly zero") {
  Domain d = build_domain(testutil::small_plasma(16, 16, 2, 2, 2));
  for (double r : gauss_residual(d)) CHECK(std::abs(r) < 1e-12);
}

namespace {

void check_decomposition_equivalence(SimConfig base, int px, int py, int iterations) {
  SimConfig single = base;
  single.patches_x = single.patches_y = 1;
  SimConfig multi = base;
  multi.patches_x = px;
  multi.patches_y = py;
  Domain a = build_domain(single);
  Domain b = build_domain(multi);
  Simulation sa(a), sb(b);
  for (int it = 0; it < iterations; ++it) {
    sa.step();
    sb.step();
    std::string why;
    REQUIRE_MESSAGE(bitwise_equal(snapshot(a), snapshot(b), &why), "iteration " << it << ": " << why);
  }
}

}  // namespace

TEST_CASE("multi-patch runs match the single-patch run bitwise") {
  SimConfig c = testutil::small_plasma(24, 24, 1, 1, 2);
  c.species[0].temperature = 0.2;
  SUBCASE("periodic") { check_decomposition_equivalence(c, 3, 2, 12); }
  SUBCASE("periodic fine patches") { check_decomposition_equivalence(c, 4, 4, 8); }
  SUBCASE("reflective x") {
    c.boundary_x = Boundary::Reflective;
    check_decomposition_equivalence(c, 2, 3, 12);
  }
  SUBCASE("reflective both") {
    c.boundary_x = c.boundary_y = Boundary::Reflective;
    check_decomposition_equivalence(c, 4, 2, 12);
  }
}
