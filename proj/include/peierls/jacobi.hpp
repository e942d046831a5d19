#pragma once

#include "peierls/lagrangian_core.hpp"

namespace peierls {

// Coefficient matrices of the linearized (small-perturbation) operator
// L = C d2/ds2 + D d/ds + E sampled along a reference solution:
//   C = -Lvv
//   D = -(d/ds)Lvv - Lvx + Lxv
//   E = -(d/ds)Lvx + Lxx
// with Lvx = Lxv^T in the PartialBundle convention and d/ds realized as a
// grid derivative of the sampled matrix field. L acts on perturbations with
// source -eps, eps the functional gradient.
struct JacobiCoefficients {
  Grid grid;
  std::vector<MatrixXd> C, D, E;  // one n x n block per grid point

  int N() const { return grid.N; }
  int n() const { return C.empty() ? 0 : static_cast<int>(C[0].rows()); }
};

// Threshold on the interior Euler-Lagrange residual below which a trajectory
// is accepted as a reference solution for linearization.
constexpr double kOnShellTolerance = 1e-4;

// Builds C, D, E along a trajectory. Throws NotASolution when the trajectory
// fails the on-shell precondition.
JacobiCoefficients coefficients(const ConfigurationModel& model, const Trajectory& traj);

// Applies (C d2/ds2 + D d/ds + E) to a grid field with second-order stencils.
// Interior rows are meaningful; the endpoint rows use one-sided stencils.
MatrixXd apply_operator(const JacobiCoefficients& coeffs, const MatrixXd& J);

// Compares the index-raised generic operator with the covariant form
// D2 J/ds2 + R(J, xdot) xdot on a metric model; returns the max interior
// deviation. Throws MissingMetric when the model has no metric data.
double covariant_jacobi_check(const ConfigurationModel& model, const Trajectory& traj,
                              const MatrixXd& J);

// Covariant side of the check (exposed for tests): D2 J/ds2 + R(J, xdot) xdot.
MatrixXd covariant_jacobi_operator(const ConfigurationModel& model, const Trajectory& traj,
                                   const MatrixXd& J);

}  // namespace peierls
