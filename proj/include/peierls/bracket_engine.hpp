#pragma once

#include <optional>

#include "peierls/el_solver.hpp"
#include "peierls/green_kernel.hpp"

namespace peierls {

// Bundle of validated artifacts built from one model/trajectory pair. The
// kernel is assembled on request (brackets need only the basis and responses).
struct BracketContext {
  ConfigurationModel model;
  Trajectory traj;
  JacobiCoefficients coeffs;
  JacobiBasis basis;
  std::optional<CommutatorKernel> kernel;

  const Grid& grid() const { return traj.grid; }
};

BracketContext make_bracket_context(const ConfigurationModel& model, const Trajectory& traj,
                                    bool build_kernel = false);

// Returns the context kernel, assembling and caching it if absent.
const CommutatorKernel& context_kernel(BracketContext& ctx);

// Chart on the space of solutions near the reference, labelled by boundary
// data (x_minus, x_plus); realized through solve_bvp.
struct SolutionChart {
  ConfigurationModel model;
  BoundaryData base;

  VectorXd coordinates() const {
    VectorXd c(2 * base.x_minus.size());
    c << base.x_minus, base.x_plus;
    return c;
  }
  Trajectory solve(const VectorXd& coords) const;
};

// delta+_A - delta-_A for the functional's source (shared by the integral and
// omega routes).
MatrixXd response_difference(const BracketContext& ctx, const PathFunctional& func);

// Route 1: {A,B} = integral (delta+_A - delta-_A)^mu eps_B,mu ds (trapezoid).
double bracket_integral(const BracketContext& ctx, const PathFunctional& A,
                        const PathFunctional& B);

// Route 2: omega_L(Gtilde(eps_A), Gtilde(eps_B)) at grid index i; i-independent
// on interior slices by conservation.
double bracket_omega(const BracketContext& ctx, const PathFunctional& A,
                     const PathFunctional& B, int i);

// Route 3: contraction of the basis expansion through the inverse pairing:
// sum_{rho sigma} Minv_{rho sigma} [<eps_B, J-^rho><J+^sigma, eps_A>
//                                   - <eps_B, J+^sigma><J-^rho, eps_A>].
double bracket_bivector(const BracketContext& ctx, const PathFunctional& A,
                        const PathFunctional& B);

// Hamilton principal function S(x-, x+): the action of the connecting solution.
double hamilton_principal(const ConfigurationModel& model, const BoundaryData& bc);

// Mixed Hessian d2S/dx+^rho dx-^sigma by central differences on the boundary
// chart; equals the basis pairing matrix omega_L(J+^rho, J-^sigma).
MatrixXd hamilton_mixed_hessian(const ConfigurationModel& model, const BoundaryData& bc,
                                double fd_step = 1e-4);

// Constant bivector of the boundary chart in (x-, x+) block coordinates,
// assembled from the inverse pairing.
MatrixXd chart_bivector(const BracketContext& ctx);

// Jacobi identity residual |{A,{B,C}} + {B,{C,A}} + {C,{A,B}}| with all
// functionals represented on the boundary chart (FD step 1e-4) and brackets
// taken through the constant chart bivector.
double jacobi_identity_residual(const BracketContext& ctx, const PathFunctional& A,
                                const PathFunctional& B, const PathFunctional& C);

}  // namespace peierls
