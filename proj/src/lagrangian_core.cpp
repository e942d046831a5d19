#include "peierls/lagrangian_core.hpp"

#include <cmath>

namespace peierls {

namespace {

constexpr double kFdRel = 1e-5;  // relative FD step for model derivatives

double fd_step(double value) { return kFdRel * std::max(1.0, std::abs(value)); }

void check_finite(const PartialBundle& b, double s) {
  const bool ok = b.Lx.allFinite() && b.Lv.allFinite() && b.Lxx.allFinite() &&
                  b.Lxv.allFinite() && b.Lvv.allFinite();
  if (!ok)
    throw NonFiniteDerivative("partials: non-finite derivative at s=" + std::to_string(s));
}

}  // namespace

Trajectory Trajectory::from_positions(const Grid& g, const MatrixXd& x) {
  if (static_cast<int>(x.rows()) != g.N)
    throw GridMismatch("Trajectory::from_positions: row count != N");
  Trajectory t;
  t.grid = g;
  t.x = x;
  t.v = grid_derivative(x, g.h());
  t.stored_velocities = false;
  t.validate();
  return t;
}

void Trajectory::validate() const {
  if (x.rows() != grid.N || v.rows() != grid.N || x.cols() != v.cols())
    throw GridMismatch("Trajectory: inconsistent shapes");
  if (!x.allFinite() || !v.allFinite())
    throw NonFiniteDerivative("Trajectory: non-finite entries");
}

PathFunctional PathFunctional::delta(int mu, double s1, const std::string& label) {
  PathFunctional f;
  f.label = label.empty() ? ("x" + std::to_string(mu) + "(" + std::to_string(s1) + ")") : label;
  f.support_lo = f.support_hi = s1;
  f.is_delta = true;
  f.delta_mu = mu;
  f.delta_s = s1;
  return f;
}

PathFunctional PathFunctional::from_density(
    const std::string& label, double lo, double hi, LagrangianFn dens,
    std::function<VectorXd(double, const VectorXd&, const VectorXd&)> dens_dx,
    std::function<VectorXd(double, const VectorXd&, const VectorXd&)> dens_dv) {
  if (!(lo < hi)) throw ConfigError("PathFunctional: degenerate support (use delta())");
  PathFunctional f;
  f.label = label;
  f.support_lo = lo;
  f.support_hi = hi;
  f.density = std::move(dens);
  f.density_dx = std::move(dens_dx);
  f.density_dv = std::move(dens_dv);
  return f;
}

PartialBundle finite_difference_partials(const LagrangianFn& f, double s, const VectorXd& x,
                                         const VectorXd& v) {
  const int n = static_cast<int>(x.size());
  PartialBundle b;
  b.Lx.resize(n);
  b.Lv.resize(n);
  b.Lxx.resize(n, n);
  b.Lxv.resize(n, n);
  b.Lvv.resize(n, n);

  auto evalx = [&](const VectorXd& xx, const VectorXd& vv) { return f(s, xx, vv); };
  const double f0 = evalx(x, v);

  VectorXd xp = x, vp = v;
  for (int mu = 0; mu < n; ++mu) {
    const double hx = fd_step(x(mu));
    xp = x;
    xp(mu) = x(mu) + hx;
    const double fxp = evalx(xp, v);
    xp(mu) = x(mu) - hx;
    const double fxm = evalx(xp, v);
    b.Lx(mu) = (fxp - fxm) / (2.0 * hx);
    b.Lxx(mu, mu) = (fxp - 2.0 * f0 + fxm) / (hx * hx);

    const double hv = fd_step(v(mu));
    vp = v;
    vp(mu) = v(mu) + hv;
    const double fvp = evalx(x, vp);
    vp(mu) = v(mu) - hv;
    const double fvm = evalx(x, vp);
    b.Lv(mu) = (fvp - fvm) / (2.0 * hv);
    b.Lvv(mu, mu) = (fvp - 2.0 * f0 + fvm) / (hv * hv);
  }

  // Off-diagonal second partials via the 4-point cross stencil; each block is
  // filled from one triangle so symmetry is exact.
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = mu + 1; nu < n; ++nu) {
      const double ha = fd_step(x(mu)), hb = fd_step(x(nu));
      auto cross = [&](double sa, double sb) {
        VectorXd xx = x;
        xx(mu) += sa * ha;
        xx(nu) += sb * hb;
        return evalx(xx, v);
      };
      b.Lxx(mu, nu) = (cross(1, 1) - cross(1, -1) - cross(-1, 1) + cross(-1, -1)) /
                      (4.0 * ha * hb);
      b.Lxx(nu, mu) = b.Lxx(mu, nu);

      const double ga = fd_step(v(mu)), gb = fd_step(v(nu));
      auto crossv = [&](double sa, double sb) {
        VectorXd vv = v;
        vv(mu) += sa * ga;
        vv(nu) += sb * gb;
        return evalx(x, vv);
      };
      b.Lvv(mu, nu) = (crossv(1, 1) - crossv(1, -1) - crossv(-1, 1) + crossv(-1, -1)) /
                      (4.0 * ga * gb);
      b.Lvv(nu, mu) = b.Lvv(mu, nu);
    }
  }
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      const double ha = fd_step(x(mu)), hb = fd_step(v(nu));
      auto cross = [&](double sa, double sb) {
        VectorXd xx = x;
        VectorXd vv = v;
        xx(mu) += sa * ha;
        vv(nu) += sb * hb;
        return evalx(xx, vv);
      };
      b.Lxv(mu, nu) = (cross(1, 1) - cross(1, -1) - cross(-1, 1) + cross(-1, -1)) /
                      (4.0 * ha * hb);
    }
  }
  return b;
}

PartialBundle partials(const ConfigurationModel& model, double s, const VectorXd& x,
                       const VectorXd& v) {
  if (!x.allFinite() || !v.allFinite())
    throw NonFiniteDerivative("partials: non-finite probe point");
  PartialBundle b;
  if (model.partials_mode == PartialsMode::analytic && model.analytic_partials) {
    b = model.analytic_partials(s, x, v);
  } else {
    b = finite_difference_partials(model.lagrangian, s, x, v);
  }
  check_finite(b, s);
  return b;
}

VectorXd partial_sv(const ConfigurationModel& model, double s, const VectorXd& x,
                    const VectorXd& v) {
  if (!model.time_dependent) return VectorXd::Zero(x.size());
  const double hs = fd_step(s);
  const PartialBundle bp = partials(model, s + hs, x, v);
  const PartialBundle bm = partials(model, s - hs, x, v);
  return (bp.Lv - bm.Lv) / (2.0 * hs);
}

MatrixXd el_residual(const ConfigurationModel& model, const Trajectory& traj) {
  const int N = traj.N(), n = traj.n();
  MatrixXd lv(N, n), lx(N, n);
  for (int i = 0; i < N; ++i) {
    const PartialBundle b = partials(model, traj.grid.s(i), traj.x.row(i), traj.v.row(i));
    lv.row(i) = b.Lv;
    lx.row(i) = b.Lx;
  }
  const double h = traj.grid.h();
  MatrixXd dlv = grid_derivative(lv, h);
  // Rows next to the boundary use one-sided stencils that avoid the endpoint
  // samples: for stencil-derived velocities the endpoint rows carry a
  // different truncation pattern, which would degrade these rows to first
  // order through the central difference.
  if (N >= 5) {
    dlv.row(1) = (-3.0 * lv.row(1) + 4.0 * lv.row(2) - lv.row(3)) / (2.0 * h);
    dlv.row(N - 2) = (3.0 * lv.row(N - 2) - 4.0 * lv.row(N - 3) + lv.row(N - 4)) / (2.0 * h);
  }
  return dlv - lx;
}

MatrixXd functional_gradient(const PathFunctional& func, const ConfigurationModel&,
                             const Trajectory& traj) {
  const Grid& g = traj.grid;
  const int N = g.N, n = traj.n();
  if (func.support_lo < -g.T || func.support_hi > g.T)
    throw SupportOutOfRange("functional_gradient: support [" + std::to_string(func.support_lo) +
                            ", " + std::to_string(func.support_hi) + "] not inside [-T, T]");

  MatrixXd eps = MatrixXd::Zero(N, n);
  if (func.is_delta) {
    // Single-grid-point density with weight 1/h: the discrete sum reproduces
    // the unit integral of the delta.
    const int i1 = g.nearest(func.delta_s);
    eps(i1, func.delta_mu) = 1.0 / g.h();
    return eps;
  }

  MatrixXd ax(N, n), av(N, n);
  ax.setZero();
  av.setZero();
  for (int i = 0; i < N; ++i) {
    const double s = g.s(i);
    if (!func.in_support(s)) continue;
    const VectorXd x = traj.x.row(i), v = traj.v.row(i);
    if (func.density_dx) {
      ax.row(i) = func.density_dx(s, x, v);
      av.row(i) = func.density_dv ? func.density_dv(s, x, v) : VectorXd::Zero(n).eval();
    } else {
      const PartialBundle b = finite_difference_partials(func.density, s, x, v);
      ax.row(i) = b.Lx;
      av.row(i) = b.Lv;
    }
  }
  // d/ds of the sampled dA/dv term; the window vanishes smoothly at the
  // support edges for C^2 densities, so the global stencil is safe and the
  // gradient stays exactly linear in the density.
  return ax - grid_derivative(av, g.h());
}

double functional_value(const PathFunctional& func, const ConfigurationModel&,
                        const Trajectory& traj) {
  const Grid& g = traj.grid;
  if (func.is_delta) {
    const int i1 = g.nearest(func.delta_s);
    return traj.x(i1, func.delta_mu);
  }
  Eigen::VectorXd dens = Eigen::VectorXd::Zero(g.N);
  for (int i = 0; i < g.N; ++i) {
    const double s = g.s(i);
    if (func.in_support(s)) dens(i) = func.density(s, traj.x.row(i), traj.v.row(i));
  }
  return trapezoid(dens, g.h());
}

double action_value(const ConfigurationModel& model, const Trajectory& traj) {
  Eigen::VectorXd dens(traj.N());
  for (int i = 0; i < traj.N(); ++i)
    dens(i) = model.lagrangian(traj.grid.s(i), traj.x.row(i), traj.v.row(i));
  return trapezoid(dens, traj.grid.h());
}

}  // namespace peierls
