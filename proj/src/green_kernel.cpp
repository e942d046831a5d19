#include "peierls/green_kernel.hpp"

#include <cmath>

namespace peierls {

namespace {

constexpr double kDegenerateW = 1e-10;
constexpr double kConjugateShoot = 1e-6;

MatrixXd flatten_columns(const std::vector<MatrixXd>& fields) {
  const int N = static_cast<int>(fields[0].rows());
  const int n = static_cast<int>(fields[0].cols());
  MatrixXd out(N * n, fields.size());
  for (size_t k = 0; k < fields.size(); ++k)
    for (int i = 0; i < N; ++i)
      for (int mu = 0; mu < n; ++mu) out(i * n + mu, k) = fields[k](i, mu);
  return out;
}

}  // namespace

double two_form(const ConfigurationModel& model, const Trajectory& traj, int i,
                const MatrixXd& J1, const MatrixXd& J2) {
  if (J1.rows() != traj.x.rows() || J2.rows() != traj.x.rows() || J1.cols() != J2.cols())
    throw GridMismatch("two_form: field shapes do not match the trajectory grid");
  const double h = traj.grid.h();
  const int N = traj.N();

  auto diff_row = [&](const MatrixXd& J) -> VectorXd {
    if (i > 0 && i + 1 < N) return (J.row(i + 1) - J.row(i - 1)).transpose() / (2.0 * h);
    if (i == 0) return (-3.0 * J.row(0) + 4.0 * J.row(1) - J.row(2)).transpose() / (2.0 * h);
    return (3.0 * J.row(N - 1) - 4.0 * J.row(N - 2) + J.row(N - 3)).transpose() / (2.0 * h);
  };

  const PartialBundle b = partials(model, traj.grid.s(i), traj.x.row(i), traj.v.row(i));
  const VectorXd j1 = J1.row(i).transpose(), j2 = J2.row(i).transpose();
  const MatrixXd lvx_minus_lxv = b.Lxv.transpose() - b.Lxv;
  return j1.dot(b.Lvv * diff_row(J2)) - j2.dot(b.Lvv * diff_row(J1)) +
         j1.dot(lvx_minus_lxv * j2);
}

MatrixXd march_linear(const JacobiCoefficients& coeffs, const MatrixXd& source,
                      const VectorXd& start0, const VectorXd& start1, bool forward) {
  const int N = coeffs.N(), n = coeffs.n();
  const double h = coeffs.grid.h();
  MatrixXd J(N, n);

  auto Aplus = [&](int i) { return (coeffs.C[i] / (h * h) + coeffs.D[i] / (2.0 * h)).eval(); };
  auto Aminus = [&](int i) { return (coeffs.C[i] / (h * h) - coeffs.D[i] / (2.0 * h)).eval(); };
  auto Bmid = [&](int i) { return (-2.0 * coeffs.C[i] / (h * h) + coeffs.E[i]).eval(); };

  if (forward) {
    J.row(0) = start0;
    J.row(1) = start1;
    for (int i = 1; i + 1 < N; ++i) {
      const VectorXd rhs = -source.row(i).transpose() - Bmid(i) * J.row(i).transpose() -
                           Aminus(i) * J.row(i - 1).transpose();
      J.row(i + 1) = Aplus(i).partialPivLu().solve(rhs).transpose();
    }
  } else {
    J.row(N - 1) = start0;
    J.row(N - 2) = start1;
    for (int i = N - 2; i >= 1; --i) {
      const VectorXd rhs = -source.row(i).transpose() - Bmid(i) * J.row(i).transpose() -
                           Aplus(i) * J.row(i + 1).transpose();
      J.row(i - 1) = Aminus(i).partialPivLu().solve(rhs).transpose();
    }
  }
  return J;
}

JacobiBasis solve_basis(const ConfigurationModel& model, const Trajectory& traj) {
  return solve_basis(model, traj, coefficients(model, traj));
}

JacobiBasis solve_basis(const ConfigurationModel& model, const Trajectory& traj,
                        const JacobiCoefficients& coeffs) {
  const int N = coeffs.N(), n = coeffs.n();
  const double h = coeffs.grid.h();
  const double span = 2.0 * coeffs.grid.T;
  const MatrixXd zero_source = MatrixXd::Zero(N, n);

  // Fundamental solutions with unit second starting value; the shooting
  // matrix collects their far-endpoint values. det is normalized by h/(2T)
  // so the free model scores exactly 1.
  std::vector<MatrixXd> fwd(n), bwd(n);
  MatrixXd shoot_fwd(n, n), shoot_bwd(n, n);
  for (int k = 0; k < n; ++k) {
    fwd[k] = march_linear(coeffs, zero_source, VectorXd::Zero(n), VectorXd::Unit(n, k), true);
    shoot_fwd.col(k) = fwd[k].row(N - 1).transpose();
    bwd[k] = march_linear(coeffs, zero_source, VectorXd::Zero(n), VectorXd::Unit(n, k), false);
    shoot_bwd.col(k) = bwd[k].row(0).transpose();
  }
  const double det_fwd = std::abs((shoot_fwd * h / span).determinant());
  const double det_bwd = std::abs((shoot_bwd * h / span).determinant());
  if (det_fwd < kConjugateShoot || det_bwd < kConjugateShoot)
    throw ConjugateEndpoints("solve_basis: homogeneous two-point problem near-degenerate "
                             "(normalized shooting det " +
                             std::to_string(std::min(det_fwd, det_bwd)) + ")");

  JacobiBasis basis;
  basis.grid = coeffs.grid;
  basis.Jplus.resize(n);
  basis.Jminus.resize(n);

  const MatrixXd coef_fwd = shoot_fwd.partialPivLu().solve(MatrixXd::Identity(n, n));
  const MatrixXd coef_bwd = shoot_bwd.partialPivLu().solve(MatrixXd::Identity(n, n));
  for (int rho = 0; rho < n; ++rho) {
    MatrixXd jp = MatrixXd::Zero(N, n), jm = MatrixXd::Zero(N, n);
    for (int k = 0; k < n; ++k) {
      jp += coef_fwd(k, rho) * fwd[k];
      jm += coef_bwd(k, rho) * bwd[k];
    }
    basis.Jplus[rho] = std::move(jp);
    basis.Jminus[rho] = std::move(jm);
  }

  const int mid = N / 2;
  basis.pairing.resize(n, n);
  basis.W.resize(n);
  for (int rho = 0; rho < n; ++rho)
    for (int sigma = 0; sigma < n; ++sigma)
      basis.pairing(rho, sigma) =
          two_form(model, traj, mid, basis.Jplus[rho], basis.Jminus[sigma]);
  basis.W = basis.pairing.diagonal();
  return basis;
}

MatrixXd CommutatorKernel::contract(const MatrixXd& source) const {
  const int N = grid.N;
  if (static_cast<int>(source.rows()) != N || static_cast<int>(source.cols()) != n)
    throw GridMismatch("CommutatorKernel::contract: source shape mismatch");
  Eigen::VectorXd flat(N * n);
  const double h = grid.h();
  for (int j = 0; j < N; ++j) {
    const double w = (j == 0 || j == N - 1) ? 0.5 * h : h;
    for (int nu = 0; nu < n; ++nu) flat(j * n + nu) = w * source(j, nu);
  }
  const Eigen::VectorXd out = G * flat;
  MatrixXd res(N, n);
  for (int i = 0; i < N; ++i)
    for (int mu = 0; mu < n; ++mu) res(i, mu) = out(i * n + mu);
  return res;
}

CommutatorKernel commutator_kernel(const JacobiBasis& basis, const ConfigurationModel&,
                                   const Trajectory&) {
  const int n = static_cast<int>(basis.Jplus.size());
  for (int rho = 0; rho < n; ++rho)
    if (std::abs(basis.W(rho)) < kDegenerateW)
      throw DegenerateWronskian("commutator_kernel: |W_" + std::to_string(rho) + "| = " +
                                std::to_string(std::abs(basis.W(rho))) + " < 1e-10");

  // G(s,s') = sum_{rho sigma} Minv_{rho sigma}
  //             [ J-^rho(s) J+^sigma(s')^T - J+^sigma(s) J-^rho(s')^T ]
  // written as K - K^T so antisymmetry is exact. The inverse pairing handles
  // coupled systems whose unit-endpoint families are not omega-conjugate.
  const MatrixXd Minv =
      basis.pairing.partialPivLu().solve(MatrixXd::Identity(n, n));
  const MatrixXd P = flatten_columns(basis.Jminus);
  const MatrixXd Q = flatten_columns(basis.Jplus);
  const MatrixXd K = P * Minv * Q.transpose();

  CommutatorKernel kernel;
  kernel.grid = basis.grid;
  kernel.n = n;
  kernel.G = K - K.transpose();
  return kernel;
}

MatrixXd response(const ConfigurationModel&, const Trajectory&,
                  const JacobiCoefficients& coeffs, const MatrixXd& source,
                  ResponseDirection direction) {
  const int N = coeffs.N(), n = coeffs.n();
  if (static_cast<int>(source.rows()) != N || static_cast<int>(source.cols()) != n)
    throw GridMismatch("response: source shape mismatch");
  int first = N, last = -1;
  for (int i = 0; i < N; ++i)
    if (source.row(i).lpNorm<Eigen::Infinity>() > 0.0) {
      first = std::min(first, i);
      last = std::max(last, i);
    }
  if (last >= 0 && (first < 2 || last > N - 3))
    throw SupportTouchesBoundary("response: source support must stay two grid points away "
                                 "from the interval ends");

  const bool forward = (direction == ResponseDirection::retarded);
  return march_linear(coeffs, source, VectorXd::Zero(n), VectorXd::Zero(n), forward);
}

}  // namespace peierls
