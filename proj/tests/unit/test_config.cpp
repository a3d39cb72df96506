#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "minipic/config.hpp"

using namespace minipic;

TEST_CASE("valid config passes validation") {
  CHECK_NOTHROW(validate(testutil::small_plasma()));
}

TEST_CASE("courant limit of the 2D Yee scheme") {
  CHECK(courant_limit(1.0, 1.0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(courant_limit(0.1, 0.2) == doctest::Approx(0.02 / std::sqrt(0.05)));
}

TEST_CASE("invalid configs raise ConfigError") {
  SimConfig c = testutil::small_plasma();
  SUBCASE("cells not divisible by patches") { c.cells_x = 33; }
  SUBCASE("bin does not divide patch extent") { c.bin_x_size = 5; }
  SUBCASE("patch below minimum extent") {
    c.cells_x = 10;
    c.patches_x = 2;
    c.bin_x_size = 1;
  }
  SUBCASE("dt above courant") { c.dt = courant_limit(c.dx, c.dy) * 1.01; }
  SUBCASE("dt exactly at courant") { c.dt = courant_limit(c.dx, c.dy); }
  SUBCASE("non-square particles per cell") { c.species[0].particles_per_cell = 8; }
  SUBCASE("negative temperature") { c.species[0].temperature = -1.0; }
  SUBCASE("zero mass") { c.species[1].mass = 0.0; }
  SUBCASE("too many collections") { c.n_collections = 5; }
  SUBCASE("zero workers") { c.workers_per_collection = 0; }
  SUBCASE("negative iterations") { c.n_iterations = -1; }
  SUBCASE("inverted slab") { c.species[0].density = SlabXProfile{1.0, 2.0, 1.0}; }
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("bin of 5 cells cannot tile a 64-cell patch") {
  SimConfig c = testutil::small_plasma(512, 64, 8, 1, 8);
  CHECK_NOTHROW(validate(c));
  c.bin_x_size = 5;
  CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("bin_x_size 5"), ConfigError);
}

TEST_CASE("density profiles") {
  CHECK(density_at(UniformProfile{2.5}, -10.0) == 2.5);
  const SlabXProfile slab{3.0, 1.0, 2.0};
  CHECK(density_at(slab, 0.999) == 0.0);
  CHECK(density_at(slab, 1.0) == 3.0);
  CHECK(density_at(slab, 1.999) == 3.0);
  CHECK(density_at(slab, 2.0) == 0.0);
}

TEST_CASE("mode and boundary names round-trip") {
  for (auto m : {ExecutionMode::TasksOn, ExecutionMode::TasksOff}) CHECK(parse_mode(to_string(m)) == m);
  for (auto b : {Boundary::Periodic, Boundary::Reflective}) CHECK(parse_boundary(to_string(b)) == b);
  CHECK_THROWS_AS(parse_mode("tasks"), ConfigError);
  CHECK_THROWS_AS(parse_boundary("open"), ConfigError);
}
