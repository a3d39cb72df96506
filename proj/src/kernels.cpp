#include "minipic/kernels.hpp"

#include <algorithm>
#include <sstream>

namespace minipic {

using detail::dual_node;
using detail::primal_node;
using detail::quadratic_weights;

SplineWeights spline_weights(double delta) {
  if (!(std::abs(delta) <= 0.5)) {
    std::ostringstream os;
    os << "spline displacement " << delta << " outside [-0.5, 0.5]";
    throw std::domain_error(os.str());
  }
  double w[3];
  quadratic_weights(delta, w);
  return {w[0], w[1], w[2]};
}

namespace {

void require_sized(const Patch& patch, int ispec) {
  const GatherBuffer& buf = patch.gather[ispec];
  if (buf.state() != GatherBuffer::State::Sized) {
    std::ostringstream os;
    os << "gather buffer of patch " << patch.geom.id << " species " << ispec << " is released";
    throw LifecycleError(os.str());
  }
  if (buf.size() != patch.arenas[ispec].size()) {
    std::ostringstream os;
    os << "gather buffer of patch " << patch.geom.id << " species " << ispec << " holds "
       << buf.size() << " entries for " << patch.arenas[ispec].size() << " particles";
    throw LifecycleError(os.str());
  }
}

/// 3x3 tensor-product gather around local node (i, j).
inline double gather(const Grid2D<double>& f, int i, int j, const double wx[3], const double wy[3]) {
  const int stride = f.stride();
  const double* row = &f(i - 1, j - 1);
  double acc = 0.0;
  for (int a = 0; a < 3; ++a, row += stride)
    acc += wx[a] * (wy[0] * row[0] + wy[1] * row[1] + wy[2] * row[2]);
  return acc;
}

}  // namespace

void interpolate(Patch& patch, int ispec, int ibin) {
  require_sized(patch, ispec);
  const ParticleArena& arena = patch.arenas[ispec];
  GatherBuffer& buf = patch.gather[ispec];
  const FieldSet& f = patch.fields;
  const PatchGeometry& g = patch.geom;
  const double inv_dx = 1.0 / g.dx;
  const double inv_dy = 1.0 / g.dy;

  for (std::size_t p = arena.bin_begin(ibin); p < arena.bin_end(ibin); ++p) {
    const double xn = arena.x[p] * inv_dx;
    const double yn = arena.y[p] * inv_dy;
    double dxp, dxd, dyp, dyd;
    const int ip = primal_node(xn, dxp);
    const int id = dual_node(xn, dxd);
    const int jp = primal_node(yn, dyp);
    const int jd = dual_node(yn, dyd);
    double wxp[3], wxd[3], wyp[3], wyd[3];
    quadratic_weights(dxp, wxp);
    quadratic_weights(dxd, wxd);
    quadratic_weights(dyp, wyp);
    quadratic_weights(dyd, wyd);
    const int ipl = ip - g.cell_x0, idl = id - g.cell_x0;
    const int jpl = jp - g.cell_y0, jdl = jd - g.cell_y0;

    buf.ex[p] = gather(f.ex, idl, jpl, wxd, wyp);
    buf.ey[p] = gather(f.ey, ipl, jdl, wxp, wyd);
    buf.ez[p] = gather(f.ez, ipl, jpl, wxp, wyp);
    buf.bx[p] = gather(f.bx, ipl, jdl, wxp, wyd);
    buf.by[p] = gather(f.by, idl, jpl, wxd, wyp);
    buf.bz[p] = gather(f.bz, idl, jdl, wxd, wyd);
    buf.cell_ix[p] = ip;
    buf.cell_iy[p] = jp;
    buf.delta_x[p] = dxp;
    buf.delta_y[p] = dyp;
  }
}

void push(Patch& patch, int ispec, int ibin, double dt) {
  require_sized(patch, ispec);
  ParticleArena& arena = patch.arenas[ispec];
  const GatherBuffer& buf = patch.gather[ispec];
  const double qm_dts2 = arena.charge / arena.mass * 0.5 * dt;

  for (std::size_t p = arena.bin_begin(ibin); p < arena.bin_end(ibin); ++p) {
    // half acceleration
    const double umx = arena.px[p] + qm_dts2 * buf.ex[p];
    const double umy = arena.py[p] + qm_dts2 * buf.ey[p];
    const double umz = arena.pz[p] + qm_dts2 * buf.ez[p];
    const double gm = std::sqrt(1.0 + umx * umx + umy * umy + umz * umz);

    // magnetic rotation
    const double alpha = qm_dts2 / gm;
    const double tx = alpha * buf.bx[p];
    const double ty = alpha * buf.by[p];
    const double tz = alpha * buf.bz[p];
    const double tx2 = tx * tx, ty2 = ty * ty, tz2 = tz * tz;
    const double txty = tx * ty, tytz = ty * tz, tztx = tz * tx;
    const double inv_det = 1.0 / (1.0 + tx2 + ty2 + tz2);
    const double upx = ((1.0 + tx2 - ty2 - tz2) * umx + 2.0 * (txty + tz) * umy +
                        2.0 * (tztx - ty) * umz) * inv_det;
    const double upy = (2.0 * (txty - tz) * umx + (1.0 - tx2 + ty2 - tz2) * umy +
                        2.0 * (tytz + tx) * umz) * inv_det;
    const double upz = (2.0 * (tztx + ty) * umx + 2.0 * (tytz - tx) * umy +
                        (1.0 - tx2 - ty2 + tz2) * umz) * inv_det;

    // half acceleration
    const double pxn = upx + qm_dts2 * buf.ex[p];
    const double pyn = upy + qm_dts2 * buf.ey[p];
    const double pzn = upz + qm_dts2 * buf.ez[p];
    const double gp = std::sqrt(1.0 + pxn * pxn + pyn * pyn + pzn * pzn);
    if (!std::isfinite(gp)) {
      std::ostringstream os;
      os << "non-finite momentum for particle " << arena.id[p] << " (species " << ispec << ")";
      throw NumericalError(os.str());
    }
    arena.px[p] = pxn;
    arena.py[p] = pyn;
    arena.pz[p] = pzn;
    const double dt_ov_g = dt / gp;
    arena.x[p] += pxn * dt_ov_g;
    arena.y[p] += pyn * dt_ov_g;
  }
}

void pre_bc(Patch& patch, int ispec, int ibin) {
  ParticleArena& arena = patch.arenas[ispec];
  const PatchGeometry& g = patch.geom;
  const double inv_dx = 1.0 / g.dx;
  const double inv_dy = 1.0 / g.dy;
  for (std::size_t p = arena.bin_begin(ibin); p < arena.bin_end(ibin); ++p) {
    const int cx = cell_of(arena.x[p], inv_dx) - g.cell_x0;
    const int cy = cell_of(arena.y[p], inv_dy) - g.cell_y0;
    const int sx = cx < 0 ? -1 : (cx >= g.nx ? 1 : 0);
    const int sy = cy < 0 ? -1 : (cy >= g.ny ? 1 : 0);
    arena.flag[p] = exchange_flag(sx, sy);
  }
}

void project(Patch& patch, int ispec, int ibin, double dt) {
  require_sized(patch, ispec);
  const ParticleArena& arena = patch.arenas[ispec];
  const GatherBuffer& buf = patch.gather[ispec];
  BinSubgrid& sub = patch.subgrid(ispec, ibin);
  const PatchGeometry& g = patch.geom;
  const double inv_dx = 1.0 / g.dx;
  const double inv_dy = 1.0 / g.dy;
  const double dx_ov_dt = g.dx / dt;
  const double dy_ov_dt = g.dy / dt;
  constexpr double one_third = 1.0 / 3.0;
  const int origin_x = g.cell_x0 + sub.x_shift;
  const int origin_y = g.cell_y0;

  for (std::size_t p = arena.bin_begin(ibin); p < arena.bin_end(ibin); ++p) {
    const double cw = arena.charge * arena.weight[p];
    const double inv_gamma = 1.0 / std::sqrt(1.0 + arena.px[p] * arena.px[p] +
                                             arena.py[p] * arena.py[p] + arena.pz[p] * arena.pz[p]);
    const double crx = cw * dx_ov_dt;
    const double cry = cw * dy_ov_dt;
    const double crz = cw * arena.pz[p] * inv_gamma;

    // 5-point windows centred on the pre-push node
    double sx0[5] = {0, 0, 0, 0, 0}, sy0[5] = {0, 0, 0, 0, 0};
    double sx1[5] = {0, 0, 0, 0, 0}, sy1[5] = {0, 0, 0, 0, 0};
    const int ipo = buf.cell_ix[p];
    const int jpo = buf.cell_iy[p];
    quadratic_weights(buf.delta_x[p], sx0 + 1);
    quadratic_weights(buf.delta_y[p], sy0 + 1);

    double dxn, dyn;
    const int ipn = primal_node(arena.x[p] * inv_dx, dxn);
    const int jpn = primal_node(arena.y[p] * inv_dy, dyn);
    const int shift_x = ipn - ipo;
    const int shift_y = jpn - jpo;
    if (shift_x < -1 || shift_x > 1 || shift_y < -1 || shift_y > 1) {
      std::ostringstream os;
      os << "particle " << arena.id[p] << " moved by (" << shift_x << ", " << shift_y
         << ") nodes in one step";
      throw CflError(os.str());
    }
    quadratic_weights(dxn, sx1 + 1 + shift_x);
    quadratic_weights(dyn, sy1 + 1 + shift_y);

    double dsx[5], dsy[5];
    for (int k = 0; k < 5; ++k) {
      dsx[k] = sx1[k] - sx0[k];
      dsy[k] = sy1[k] - sy0[k];
    }

    const int li = ipo - 2 - origin_x;
    const int lj = jpo - 2 - origin_y;
    // window nodes carrying weight before or after the move
    const int xl = 1 + std::min(0, shift_x), xh = 3 + std::max(0, shift_x);
    const int yl = 1 + std::min(0, shift_y), yh = 3 + std::max(0, shift_y);

    // Jx on the faces right of window nodes xl..xh-1
    for (int j = yl; j <= yh; ++j) {
      const double tmp = crx * (sy0[j] + 0.5 * dsy[j]);
      double sum = 0.0;
      for (int i = xl; i < xh; ++i) {
        sum -= dsx[i];
        fixed::add(sub.jx(li + i, lj + j), sum * tmp);
      }
    }
    // Jy on the faces above window nodes yl..yh-1
    for (int i = xl; i <= xh; ++i) {
      const double tmp = cry * (sx0[i] + 0.5 * dsx[i]);
      std::int64_t* col = &sub.jy(li + i, lj);
      double sum = 0.0;
      for (int j = yl; j < yh; ++j) {
        sum -= dsy[j];
        fixed::add(col[j], sum * tmp);
      }
    }
    // Jz on the window nodes
    if (crz != 0.0) {
      double ay[5], by[5];
      for (int j = yl; j <= yh; ++j) {
        ay[j] = sy0[j] + 0.5 * dsy[j];
        by[j] = 0.5 * sy0[j] + one_third * dsy[j];
      }
      for (int i = xl; i <= xh; ++i) {
        std::int64_t* col = &sub.jz(li + i, lj);
        for (int j = yl; j <= yh; ++j) fixed::add(col[j], crz * (sx0[i] * ay[j] + dsx[i] * by[j]));
      }
    }
  }
}

void reduce_bin_currents(Patch& patch, int ispec) {
  FieldSet& f = patch.fields;
  const int ny = patch.geom.ny;
  for (int ibin = 0; ibin < patch.geom.n_bins; ++ibin) {
    BinSubgrid& sub = patch.subgrid(ispec, ibin);
    const int bs = patch.geom.bin_size;
    for (int i = -kGhost; i < bs + kGhost; ++i) {
      std::int64_t* ax = &f.jx_acc(sub.x_shift + i, -kGhost);
      std::int64_t* ay = &f.jy_acc(sub.x_shift + i, -kGhost);
      std::int64_t* az = &f.jz_acc(sub.x_shift + i, -kGhost);
      const std::int64_t* sx = &sub.jx(i, -kGhost);
      const std::int64_t* sy = &sub.jy(i, -kGhost);
      const std::int64_t* sz = &sub.jz(i, -kGhost);
      for (int j = 0; j < ny + 2 * kGhost; ++j) {
        fixed::add(ax[j], sx[j]);
        fixed::add(ay[j], sy[j]);
        fixed::add(az[j], sz[j]);
      }
    }
    sub.zero();
  }
}

void deposit_charge(const ParticleArena& arena, FixedGrid& rho, int cell_x0, int cell_y0,
                    double inv_dx, double inv_dy) {
  for (std::size_t p = 0; p < arena.size(); ++p) {
    const double cw = arena.charge * arena.weight[p];
    double dxp, dyp;
    const int ip = primal_node(arena.x[p] * inv_dx, dxp) - cell_x0;
    const int jp = primal_node(arena.y[p] * inv_dy, dyp) - cell_y0;
    double wx[3], wy[3];
    quadratic_weights(dxp, wx);
    quadratic_weights(dyp, wy);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) fixed::add(rho(ip - 1 + a, jp - 1 + b), cw * wx[a] * wy[b]);
  }
}

void advance_b_half(Patch& patch, double dt) {
  FieldSet& f = patch.fields;
  const double hx = 0.5 * dt / patch.geom.dx;
  const double hy = 0.5 * dt / patch.geom.dy;
  for (int i = 0; i < patch.geom.nx; ++i) {
    for (int j = 0; j < patch.geom.ny; ++j) {
      f.bx(i, j) -= hy * (f.ez(i, j + 1) - f.ez(i, j));
      f.by(i, j) += hx * (f.ez(i + 1, j) - f.ez(i, j));
      f.bz(i, j) -= hx * (f.ey(i + 1, j) - f.ey(i, j)) - hy * (f.ex(i, j + 1) - f.ex(i, j));
    }
  }
}

void advance_e(Patch& patch, double dt) {
  FieldSet& f = patch.fields;
  const double cx = dt / patch.geom.dx;
  const double cy = dt / patch.geom.dy;
  for (int i = 0; i < patch.geom.nx; ++i) {
    for (int j = 0; j < patch.geom.ny; ++j) {
      f.ex(i, j) += cy * (f.bz(i, j) - f.bz(i, j - 1)) - dt * f.jx(i, j);
      f.ey(i, j) += -cx * (f.bz(i, j) - f.bz(i - 1, j)) - dt * f.jy(i, j);
      f.ez(i, j) += cx * (f.by(i, j) - f.by(i - 1, j)) - cy * (f.bx(i, j) - f.bx(i, j - 1)) -
                    dt * f.jz(i, j);
    }
  }
}

}  // namespace minipic
