#pragma once

#include "peierls/jacobi.hpp"

namespace peierls {

// Homogeneous Jacobi basis: 2n solutions with single-unit endpoint data,
//   Jplus[rho](T) = e_rho,  Jplus[rho](-T) = 0,
//   Jminus[rho](-T) = e_rho, Jminus[rho](T) = 0,
// together with the conserved pairings. pairing(rho, sigma) = omega_L(J+^rho, J-^sigma);
// W is its diagonal. For coupled systems the off-diagonal pairings do not vanish
// and the kernel assembly contracts through the full inverse pairing matrix.
struct JacobiBasis {
  Grid grid;
  std::vector<MatrixXd> Jplus, Jminus;  // each N x n
  VectorXd W;
  MatrixXd pairing;
};

// Commutator kernel G(s_i, s_j) stored as an (N n) x (N n) matrix with flat
// index i*n + mu. Antisymmetric under (i mu) <-> (j nu) by construction.
struct CommutatorKernel {
  Grid grid;
  int n = 1;
  MatrixXd G;

  double value(int i, int mu, int j, int nu) const { return G(i * n + mu, j * n + nu); }

  // Trapezoid contraction (G eps)(s_i)^mu = integral G^{mu nu}(s_i, s') eps_nu(s') ds'.
  MatrixXd contract(const MatrixXd& source) const;
};

enum class ResponseDirection { retarded, advanced };

// Lagrangian two-form evaluated at grid index i on two grid fields:
//   omega_L = J1^T Lvv dJ2/ds - J2^T Lvv dJ1/ds + J1^T (Lvx - Lxv) J2,
// with field velocities by central differences. Constant in i when J1, J2
// solve the homogeneous linearized equation.
double two_form(const ConfigurationModel& model, const Trajectory& traj, int i,
                const MatrixXd& J1, const MatrixXd& J2);

// Marches the discrete linearized equation
//   C_i (J_{i+1}-2J_i+J_{i-1})/h^2 + D_i (J_{i+1}-J_{i-1})/(2h) + E_i J_i = -source_i
// from two starting values. The same stencil as apply_operator, so marched
// fields are annihilated by it exactly at interior points. forward=true
// marches from rows (0,1); otherwise from rows (N-1, N-2).
MatrixXd march_linear(const JacobiCoefficients& coeffs, const MatrixXd& source,
                      const VectorXd& start0, const VectorXd& start1, bool forward);

// Solves the 2n homogeneous boundary problems by shooting on the linear
// equation. Throws ConjugateEndpoints when the shooting matrix is singular.
JacobiBasis solve_basis(const ConfigurationModel& model, const Trajectory& traj);
JacobiBasis solve_basis(const ConfigurationModel& model, const Trajectory& traj,
                        const JacobiCoefficients& coeffs);

// Assembles the commutator kernel from the basis through the inverse pairing.
// Throws DegenerateWronskian if any |W_rho| < 1e-10.
CommutatorKernel commutator_kernel(const JacobiBasis& basis, const ConfigurationModel& model,
                                   const Trajectory& traj);

// Retarded/advanced response to a compactly supported source: solves
// L dx = -source by time-stepping with zero data at -T (retarded) or +T
// (advanced). The source support must stay two grid points clear of the
// boundary; throws SupportTouchesBoundary otherwise.
MatrixXd response(const ConfigurationModel& model, const Trajectory& traj,
                  const JacobiCoefficients& coeffs, const MatrixXd& source,
                  ResponseDirection direction);

}  // namespace peierls
