#pragma once

#include <numbers>
#include <string>

#include "minipic/config.hpp"

namespace testutil {

inline minipic::SpeciesSpec species(std::string name, double charge, double mass, double temperature, int ppc,
                                    minipic::DensityProfile density = minipic::UniformProfile{1.0}) {
  minipic::SpeciesSpec s;
  s.name = std::move(name);
  s.charge = charge;
  s.mass = mass;
  s.temperature = temperature;
  s.particles_per_cell = ppc;
  s.density = density;
  return s;
}

/// Small periodic thermal plasma that runs in milliseconds.
inline minipic::SimConfig small_plasma(int cells_x = 32, int cells_y = 32, int patches_x = 2, int patches_y = 2,
                                       int bin = 4) {
  minipic::SimConfig c;
  c.cells_x = cells_x;
  c.cells_y = cells_y;
  c.dx = c.dy = 0.2;
  c.dt = 0.9 * c.dx / std::numbers::sqrt2;
  c.patches_x = patches_x;
  c.patches_y = patches_y;
  c.bin_x_size = bin;
  c.n_iterations = 5;
  c.rng_seed = 7;
  c.species = {species("electron", -1.0, 1.0, 0.05, 4), species("ion", 1.0, 100.0, 0.001, 4)};
  return c;
}

}  // namespace testutil
