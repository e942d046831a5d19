#include "peierls/jacobi.hpp"

#include <cmath>

namespace peierls {

namespace {

// Grid derivative of a sampled matrix field, entrywise.
std::vector<MatrixXd> matrix_field_derivative(const std::vector<MatrixXd>& f, double h) {
  const int N = static_cast<int>(f.size());
  std::vector<MatrixXd> df(N);
  for (int i = 1; i + 1 < N; ++i) df[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  df[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  df[N - 1] = (3.0 * f[N - 1] - 4.0 * f[N - 2] + f[N - 3]) / (2.0 * h);
  return df;
}

}  // namespace

JacobiCoefficients coefficients(const ConfigurationModel& model, const Trajectory& traj) {
  const double res = interior_max_abs(el_residual(model, traj));
  if (res > kOnShellTolerance)
    throw NotASolution("coefficients: trajectory is off-shell (interior residual " +
                       std::to_string(res) + " > 1e-4)");

  const int N = traj.N();
  std::vector<MatrixXd> lvv(N), lvx(N), lxv(N), lxx(N);
  for (int i = 0; i < N; ++i) {
    const PartialBundle b = partials(model, traj.grid.s(i), traj.x.row(i), traj.v.row(i));
    lvv[i] = b.Lvv;
    lxv[i] = b.Lxv;
    lvx[i] = b.Lxv.transpose();
    lxx[i] = b.Lxx;
  }
  const double h = traj.grid.h();
  const std::vector<MatrixXd> dlvv = matrix_field_derivative(lvv, h);
  const std::vector<MatrixXd> dlvx = matrix_field_derivative(lvx, h);

  JacobiCoefficients jc;
  jc.grid = traj.grid;
  jc.C.resize(N);
  jc.D.resize(N);
  jc.E.resize(N);
  for (int i = 0; i < N; ++i) {
    jc.C[i] = -lvv[i];
    jc.D[i] = -dlvv[i] - lvx[i] + lxv[i];
    jc.E[i] = -dlvx[i] + lxx[i];
  }
  return jc;
}

MatrixXd apply_operator(const JacobiCoefficients& coeffs, const MatrixXd& J) {
  const int N = coeffs.N(), n = coeffs.n();
  if (static_cast<int>(J.rows()) != N || static_cast<int>(J.cols()) != n)
    throw GridMismatch("apply_operator: field shape does not match coefficients");
  const double h = coeffs.grid.h();

  const MatrixXd dJ = grid_derivative(J, h);
  MatrixXd d2J(N, n);
  for (int i = 1; i + 1 < N; ++i)
    d2J.row(i) = (J.row(i + 1) - 2.0 * J.row(i) + J.row(i - 1)) / (h * h);
  d2J.row(0) = (2.0 * J.row(0) - 5.0 * J.row(1) + 4.0 * J.row(2) - J.row(3)) / (h * h);
  d2J.row(N - 1) =
      (2.0 * J.row(N - 1) - 5.0 * J.row(N - 2) + 4.0 * J.row(N - 3) - J.row(N - 4)) / (h * h);

  MatrixXd out(N, n);
  for (int i = 0; i < N; ++i)
    out.row(i) = (coeffs.C[i] * d2J.row(i).transpose() + coeffs.D[i] * dJ.row(i).transpose() +
                  coeffs.E[i] * J.row(i).transpose())
                     .transpose();
  return out;
}

MatrixXd covariant_jacobi_operator(const ConfigurationModel& model, const Trajectory& traj,
                                   const MatrixXd& J) {
  if (!model.metric) throw MissingMetric("covariant_jacobi_operator: model has no metric");
  const MetricData& md = *model.metric;
  const int N = traj.N(), n = traj.n();
  const double h = traj.grid.h();

  // Gamma(xdot, W) sampled along the path.
  auto gamma_contract = [&](const MatrixXd& W) {
    MatrixXd out(N, n);
    for (int i = 0; i < N; ++i) {
      const std::vector<MatrixXd> G = md.christoffel(traj.x.row(i));
      for (int a = 0; a < n; ++a)
        out(i, a) = traj.v.row(i) * G[a] * W.row(i).transpose();
    }
    return out;
  };

  // D2 J/ds2 = J'' + d/ds(Gamma(xdot, J)) + Gamma(xdot, J' + Gamma(xdot, J)),
  // with J'' on the same compact three-point stencil as the linearized
  // operator so the flat case matches it identically.
  MatrixXd d2J(N, n);
  for (int i = 1; i + 1 < N; ++i)
    d2J.row(i) = (J.row(i + 1) - 2.0 * J.row(i) + J.row(i - 1)) / (h * h);
  d2J.row(0) = (2.0 * J.row(0) - 5.0 * J.row(1) + 4.0 * J.row(2) - J.row(3)) / (h * h);
  d2J.row(N - 1) =
      (2.0 * J.row(N - 1) - 5.0 * J.row(N - 2) + 4.0 * J.row(N - 3) - J.row(N - 4)) / (h * h);

  const MatrixXd gJ = gamma_contract(J);
  const MatrixXd D2J =
      d2J + grid_derivative(gJ, h) + gamma_contract(grid_derivative(J, h) + gJ);

  MatrixXd out(N, n);
  for (int i = 0; i < N; ++i) {
    const std::vector<double> R = md.riemann(traj.x.row(i));
    auto idx = [n](int a, int b, int c, int d) { return ((a * n + b) * n + c) * n + d; };
    VectorXd curv = VectorXd::Zero(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d)
            curv(a) += R[idx(a, b, c, d)] * traj.v(i, b) * J(i, c) * traj.v(i, d);
    out.row(i) = D2J.row(i) + curv.transpose();
  }
  return out;
}

double covariant_jacobi_check(const ConfigurationModel& model, const Trajectory& traj,
                              const MatrixXd& J) {
  if (!model.metric) throw MissingMetric("covariant_jacobi_check: model has no metric");
  const JacobiCoefficients jc = coefficients(model, traj);
  const MatrixXd LJ = apply_operator(jc, J);
  const MatrixXd cov = covariant_jacobi_operator(model, traj, J);

  // The generic operator acts with lower index and source -eps; raising the
  // index with g^{-1} and flipping the sign lands on the covariant form.
  const int N = traj.N();
  MatrixXd raised(N, traj.n());
  for (int i = 0; i < N; ++i) {
    const MatrixXd g = model.metric->g(traj.x.row(i));
    raised.row(i) = -(g.llt().solve(LJ.row(i).transpose())).transpose();
  }
  // The covariant side stacks two grid derivatives, so the two rows nearest
  // each endpoint see one-sided stencils twice; compare away from them.
  const MatrixXd diff = raised - cov;
  return diff.middleRows(2, N - 4).array().abs().maxCoeff();
}

}  // namespace peierls
