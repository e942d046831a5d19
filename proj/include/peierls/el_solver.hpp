#pragma once

#include "peierls/lagrangian_core.hpp"

namespace peierls {

// Two-point boundary data for solve_bvp.
struct BoundaryData {
  VectorXd x_minus;
  VectorXd x_plus;
  double T = 1.0;
  int N = 201;
};

// Classical 4th-order explicit integration of the Euler-Lagrange equations
// v' = Lvv^{-1}(Lx - Lxv^T v - d2L/ds dv) on [-T, T].
// Throws SingularLvv when |det Lvv| < 1e-12, BlowUp when the state norm
// exceeds 1e12.
Trajectory solve_ivp(const ConfigurationModel& model, const VectorXd& x0, const VectorXd& v0,
                     double T, int N);

// Shooting on the initial velocity with damped Newton on the endpoint mismatch
// F(v0) = x(T; v0) - x_plus. Converged when |F| <= 1e-10 (1 + |x_plus|).
// Throws ConjugatePoint when the shooting Jacobian is singular (normalized
// determinant below 1e-10), NoConvergence after 100 Newton steps.
Trajectory solve_bvp(const ConfigurationModel& model, const BoundaryData& bc);

// Shooting Jacobian dx(T)/dv0 at given initial data (central differences of
// the integrator endpoint map). Exposed for chart and conjugate-point tests.
MatrixXd shooting_jacobian(const ConfigurationModel& model, const VectorXd& x0,
                           const VectorXd& v0, double T, int N);

}  // namespace peierls
