#pragma once

#include <cmath>
#include <stdexcept>

#include "minipic/patch.hpp"

namespace minipic {

/// Non-finite momentum produced by the pusher.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A particle moved more than one cell in a step.
class CflError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Order-2 B-spline weights on the nodes i-1, i, i+1 for a displacement
/// delta from node i.
struct SplineWeights {
  double m1 = 0, c0 = 0, p1 = 0;
};

/// Throws std::domain_error when |delta| > 0.5.
SplineWeights spline_weights(double delta);

namespace detail {

inline void quadratic_weights(double d, double w[3]) {
  const double a = 0.5 - d;
  const double b = 0.5 + d;
  w[0] = 0.5 * a * a;
  w[1] = 0.75 - d * d;
  w[2] = 0.5 * b * b;
}

/// Nearest primal node of normalized coordinate xn and the displacement from it.
inline int primal_node(double xn, double& delta) {
  const int i = floor_int(xn + 0.5);
  delta = xn - i;
  return i;
}

/// Nearest dual node (positions i + 1/2) of normalized coordinate xn.
inline int dual_node(double xn, double& delta) {
  const int i = floor_int(xn);
  delta = xn - 0.5 - i;
  return i;
}

}  // namespace detail

// Macro-particle operators on the particles of bin ibin of species ispec.
// Each reads and writes only its declared footprint:
//   interpolate: reads patch E/B and bin positions; writes the bin's gather slice
//   push:        reads the gather slice; writes the bin's positions and momenta
//   pre_bc:      reads the bin's positions; writes the bin's exchange flags
//   project:     reads the bin's particles and gather slice; writes the (ispec, ibin) subgrid

/// Throws LifecycleError if the species' GatherBuffer is Released or mis-sized.
void interpolate(Patch& patch, int ispec, int ibin);
/// Boris push followed by x += (p / gamma) dt.
void push(Patch& patch, int ispec, int ibin, double dt);
void pre_bc(Patch& patch, int ispec, int ibin);
/// Charge-conserving order-2 deposition from the pre-push node/delta in the
/// gather buffer to the current position.
void project(Patch& patch, int ispec, int ibin, double dt);

/// Adds every bin subgrid of species ispec (ghosts included) into the patch
/// current accumulators, bins ascending, then zeroes the subgrids.
void reduce_bin_currents(Patch& patch, int ispec);

/// Deposits the order-2 charge of an arena into a fixed-point grid whose
/// logical (0, 0) is the global node (cell_x0, cell_y0).
void deposit_charge(const ParticleArena& arena, FixedGrid& rho, int cell_x0, int cell_y0,
                    double inv_dx, double inv_dy);

// Yee solver on the owned cells of one patch; ghosts must be valid and are not written.
void advance_b_half(Patch& patch, double dt);
void advance_e(Patch& patch, double dt);

}  // namespace minipic
