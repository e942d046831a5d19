#include "peierls/bracket_engine.hpp"

#include <array>
#include <cmath>

namespace peierls {

BracketContext make_bracket_context(const ConfigurationModel& model, const Trajectory& traj,
                                    bool build_kernel) {
  BracketContext ctx;
  ctx.model = model;
  ctx.traj = traj;
  ctx.coeffs = coefficients(model, traj);
  ctx.basis = solve_basis(model, traj, ctx.coeffs);
  if (build_kernel) ctx.kernel = commutator_kernel(ctx.basis, ctx.model, ctx.traj);
  return ctx;
}

const CommutatorKernel& context_kernel(BracketContext& ctx) {
  if (!ctx.kernel) ctx.kernel = commutator_kernel(ctx.basis, ctx.model, ctx.traj);
  return *ctx.kernel;
}

Trajectory SolutionChart::solve(const VectorXd& coords) const {
  const int n = static_cast<int>(base.x_minus.size());
  BoundaryData bc = base;
  bc.x_minus = coords.head(n);
  bc.x_plus = coords.tail(n);
  return solve_bvp(model, bc);
}

MatrixXd response_difference(const BracketContext& ctx, const PathFunctional& func) {
  const MatrixXd eps = functional_gradient(func, ctx.model, ctx.traj);
  const MatrixXd ret = response(ctx.model, ctx.traj, ctx.coeffs, eps,
                                ResponseDirection::retarded);
  const MatrixXd adv = response(ctx.model, ctx.traj, ctx.coeffs, eps,
                                ResponseDirection::advanced);
  return ret - adv;
}

double bracket_integral(const BracketContext& ctx, const PathFunctional& A,
                        const PathFunctional& B) {
  const MatrixXd u = response_difference(ctx, A);
  const MatrixXd epsB = functional_gradient(B, ctx.model, ctx.traj);
  return grid_inner(u, epsB, ctx.grid().h());
}

double bracket_omega(const BracketContext& ctx, const PathFunctional& A,
                     const PathFunctional& B, int i) {
  const MatrixXd uA = response_difference(ctx, A);
  const MatrixXd uB = response_difference(ctx, B);
  return two_form(ctx.model, ctx.traj, i, uA, uB);
}

double bracket_bivector(const BracketContext& ctx, const PathFunctional& A,
                        const PathFunctional& B) {
  const int n = ctx.model.n;
  for (int rho = 0; rho < n; ++rho)
    if (std::abs(ctx.basis.W(rho)) < 1e-10)
      throw DegenerateWronskian("bracket_bivector: degenerate pairing");

  const MatrixXd epsA = functional_gradient(A, ctx.model, ctx.traj);
  const MatrixXd epsB = functional_gradient(B, ctx.model, ctx.traj);
  const double h = ctx.grid().h();

  VectorXd ap(n), am(n), bp(n), bm(n);
  for (int rho = 0; rho < n; ++rho) {
    ap(rho) = grid_inner(ctx.basis.Jplus[rho], epsA, h);
    am(rho) = grid_inner(ctx.basis.Jminus[rho], epsA, h);
    bp(rho) = grid_inner(ctx.basis.Jplus[rho], epsB, h);
    bm(rho) = grid_inner(ctx.basis.Jminus[rho], epsB, h);
  }
  const MatrixXd Minv =
      ctx.basis.pairing.partialPivLu().solve(MatrixXd::Identity(n, n));
  double sum = 0.0;
  for (int rho = 0; rho < n; ++rho)
    for (int sigma = 0; sigma < n; ++sigma)
      sum += Minv(rho, sigma) * (bm(rho) * ap(sigma) - bp(sigma) * am(rho));
  return sum;
}

double hamilton_principal(const ConfigurationModel& model, const BoundaryData& bc) {
  const Trajectory traj = solve_bvp(model, bc);
  return action_value(model, traj);
}

MatrixXd hamilton_mixed_hessian(const ConfigurationModel& model, const BoundaryData& bc,
                                double fd_step) {
  const int n = model.n;
  MatrixXd H(n, n);
  for (int rho = 0; rho < n; ++rho) {
    for (int sigma = 0; sigma < n; ++sigma) {
      auto S = [&](double dp, double dm) {
        BoundaryData b = bc;
        b.x_plus(rho) += dp;
        b.x_minus(sigma) += dm;
        return hamilton_principal(model, b);
      };
      H(rho, sigma) = (S(fd_step, fd_step) - S(fd_step, -fd_step) - S(-fd_step, fd_step) +
                       S(-fd_step, -fd_step)) /
                      (4.0 * fd_step * fd_step);
    }
  }
  return H;
}

MatrixXd chart_bivector(const BracketContext& ctx) {
  const int n = ctx.model.n;
  const MatrixXd Minv =
      ctx.basis.pairing.partialPivLu().solve(MatrixXd::Identity(n, n));
  // In (x-, x+) block coordinates the chart symplectic matrix is
  // [[0, M^T], [-M, 0]] with M = omega_L(J+^rho, J-^sigma); its inverse is
  // [[0, -Minv], [Minv^T, 0]].
  MatrixXd Lambda = MatrixXd::Zero(2 * n, 2 * n);
  Lambda.block(0, n, n, n) = -Minv;
  Lambda.block(n, 0, n, n) = Minv.transpose();
  return Lambda;
}

double jacobi_identity_residual(const BracketContext& ctx, const PathFunctional& A,
                                const PathFunctional& B, const PathFunctional& C) {
  const int n = ctx.model.n;
  const int m = 2 * n;
  const double lam = 1e-4;

  SolutionChart chart;
  chart.model = ctx.model;
  chart.base.x_minus = ctx.traj.x.row(0).transpose();
  chart.base.x_plus = ctx.traj.x.row(ctx.grid().N - 1).transpose();
  chart.base.T = ctx.grid().T;
  chart.base.N = ctx.grid().N;
  const VectorXd c0 = chart.coordinates();

  const PathFunctional* funcs[3] = {&A, &B, &C};
  auto eval_all = [&](const VectorXd& c, double out[3]) {
    const Trajectory t = chart.solve(c);
    for (int k = 0; k < 3; ++k) out[k] = functional_value(*funcs[k], ctx.model, t);
  };

  double f0[3];
  eval_all(c0, f0);

  // Gradients and Hessians of the chart representations, sharing solves.
  std::vector<std::array<double, 3>> fp(m), fm(m);
  for (int i = 0; i < m; ++i) {
    VectorXd c = c0;
    c(i) += lam;
    eval_all(c, fp[i].data());
    c(i) -= 2 * lam;
    eval_all(c, fm[i].data());
  }
  MatrixXd grad(m, 3);
  std::vector<MatrixXd> hess(3, MatrixXd::Zero(m, m));
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < m; ++i) {
      grad(i, k) = (fp[i][k] - fm[i][k]) / (2.0 * lam);
      hess[k](i, i) = (fp[i][k] - 2.0 * f0[k] + fm[i][k]) / (lam * lam);
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      double fpp[3], fpm[3], fmp[3], fmm[3];
      VectorXd c = c0;
      c(i) += lam;
      c(j) += lam;
      eval_all(c, fpp);
      c(j) -= 2 * lam;
      eval_all(c, fpm);
      c(i) -= 2 * lam;
      eval_all(c, fmm);
      c(j) += 2 * lam;
      eval_all(c, fmp);
      for (int k = 0; k < 3; ++k) {
        hess[k](i, j) = (fpp[k] - fpm[k] - fmp[k] + fmm[k]) / (4.0 * lam * lam);
        hess[k](j, i) = hess[k](i, j);
      }
    }
  }

  const MatrixXd Lambda = chart_bivector(ctx);
  // With a constant bivector, grad({g,h}) = H_g Lambda grad_h - H_h Lambda grad_g.
  auto cyclic_term = [&](int a, int b, int c) {
    const VectorXd inner =
        hess[b] * (Lambda * grad.col(c)) - hess[c] * (Lambda * grad.col(b));
    return grad.col(a).dot(Lambda * inner);
  };
  return std::abs(cyclic_term(0, 1, 2) + cyclic_term(1, 2, 0) + cyclic_term(2, 0, 1));
}

}  // namespace peierls
