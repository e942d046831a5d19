#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "peierls/grid.hpp"

namespace peierls {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// First and second partial derivatives of a Lagrangian density at one point.
// Index conventions (mu = row, nu = column):
//   Lxx(mu,nu) = d2L/dx^mu dx^nu        (symmetric)
//   Lxv(mu,nu) = d2L/dx^mu dv^nu
//   Lvv(mu,nu) = d2L/dv^mu dv^nu        (symmetric)
// The transpose Lxv^T is d2L/dv dx.
struct PartialBundle {
  VectorXd Lx, Lv;
  MatrixXd Lxx, Lxv, Lvv;
};

// Metric structure for models on a Riemannian configuration space.
// riemann returns R^a_{bcd} flattened as a*n^3 + b*n^2 + c*n + d with the
// curvature convention R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
// + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}, so that the
// geodesic deviation term reads (R(J, xdot) xdot)^a = R^a_{bcd} xdot^b J^c xdot^d.
struct MetricData {
  std::function<MatrixXd(const VectorXd&)> g;
  // christoffel(x)[mu](nu, rho) = Gamma^mu_{nu rho}
  std::function<std::vector<MatrixXd>(const VectorXd&)> christoffel;
  std::function<std::vector<double>(const VectorXd&)> riemann;
};

enum class PartialsMode { analytic, finite_difference };

using LagrangianFn = std::function<double(double, const VectorXd&, const VectorXd&)>;

// A Lagrangian model: density L(s, x, v) plus optional analytic partials and
// optional metric structure. Immutable after construction.
struct ConfigurationModel {
  int n = 1;
  PartialsMode partials_mode = PartialsMode::finite_difference;
  LagrangianFn lagrangian;
  std::function<PartialBundle(double, const VectorXd&, const VectorXd&)> analytic_partials;
  std::optional<MetricData> metric;
  bool time_dependent = false;
  std::string name = "model";
};

// Discretized path on a uniform grid over [-T, T].
struct Trajectory {
  Grid grid;
  MatrixXd x;  // N x n
  MatrixXd v;  // N x n
  bool stored_velocities = false;

  int N() const { return grid.N; }
  int n() const { return static_cast<int>(x.cols()); }

  // Builds a trajectory from positions only; velocities by central differences.
  static Trajectory from_positions(const Grid& g, const MatrixXd& x);
  void validate() const;
};

// A local path functional A = integral of a density over a compact window,
// or a single-point (delta-like) functional x^mu(s1) realized as a grid spike
// of weight 1/h.
struct PathFunctional {
  std::string label;
  double support_lo = -1.0, support_hi = 1.0;

  LagrangianFn density;  // evaluated only inside the support window
  std::function<VectorXd(double, const VectorXd&, const VectorXd&)> density_dx;
  std::function<VectorXd(double, const VectorXd&, const VectorXd&)> density_dv;

  bool is_delta = false;
  int delta_mu = 0;
  double delta_s = 0.0;

  static PathFunctional delta(int mu, double s1, const std::string& label = "");
  static PathFunctional from_density(
      const std::string& label, double lo, double hi, LagrangianFn dens,
      std::function<VectorXd(double, const VectorXd&, const VectorXd&)> dens_dx = nullptr,
      std::function<VectorXd(double, const VectorXd&, const VectorXd&)> dens_dv = nullptr);

  bool in_support(double s) const { return s >= support_lo && s <= support_hi; }
};

// Derivative supply. In finite_difference mode central differences with
// step 1e-5 * max(1, |component|) are used; analytic mode calls the model's
// bundle. Throws NonFiniteDerivative if any entry is non-finite.
PartialBundle partials(const ConfigurationModel& model, double s, const VectorXd& x,
                       const VectorXd& v);

// Finite-difference partials of an arbitrary density (used for cross-validation
// and as the fallback for models without analytic partials).
PartialBundle finite_difference_partials(const LagrangianFn& f, double s, const VectorXd& x,
                                         const VectorXd& v);

// d2L/ds dv by central differences in s (zero for autonomous models).
VectorXd partial_sv(const ConfigurationModel& model, double s, const VectorXd& x,
                    const VectorXd& v);

// Euler-Lagrange residual r_mu(s_i) = d/ds(dL/dv^mu) - dL/dx^mu sampled on the
// trajectory. Interior rows use central differences; the two boundary rows use
// one-sided stencils and are excluded from interior norms.
MatrixXd el_residual(const ConfigurationModel& model, const Trajectory& traj);

// Euler-Lagrange derivative of a path functional along a trajectory:
// eps_mu(s_i) = dA/dx^mu - d/ds(dA/dv^mu), zero outside the support.
MatrixXd functional_gradient(const PathFunctional& func, const ConfigurationModel& model,
                             const Trajectory& traj);

// Value of the functional on a trajectory (trapezoid over the window, or the
// point evaluation for delta functionals).
double functional_value(const PathFunctional& func, const ConfigurationModel& model,
                        const Trajectory& traj);

// Action of the model Lagrangian along a trajectory (trapezoid).
double action_value(const ConfigurationModel& model, const Trajectory& traj);

}  // namespace peierls
