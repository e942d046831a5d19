#include "peierls/el_solver.hpp"

#include <cmath>

namespace peierls {

namespace {

constexpr double kSingularDet = 1e-12;
constexpr double kBlowUp = 1e12;
constexpr double kConjugateDet = 1e-10;
constexpr int kMaxNewton = 100;
constexpr int kMaxHalvings = 30;

struct State {
  VectorXd x, v;
};

State rhs(const ConfigurationModel& model, double s, const State& y) {
  const PartialBundle b = partials(model, s, y.x, y.v);
  Eigen::PartialPivLU<MatrixXd> lu(b.Lvv);
  const double det = std::abs(lu.determinant());
  if (det < kSingularDet)
    throw SingularLvv("solve_ivp: |det Lvv| = " + std::to_string(det) + " at s=" +
                      std::to_string(s));
  VectorXd force = b.Lx - b.Lxv.transpose() * y.v;
  if (model.time_dependent) force -= partial_sv(model, s, y.x, y.v);
  return {y.v, lu.solve(force)};
}

}  // namespace

Trajectory solve_ivp(const ConfigurationModel& model, const VectorXd& x0, const VectorXd& v0,
                     double T, int N) {
  const Grid g(T, N);
  const double h = g.h();
  Trajectory traj;
  traj.grid = g;
  traj.x.resize(N, model.n);
  traj.v.resize(N, model.n);
  traj.stored_velocities = true;

  State y{x0, v0};
  traj.x.row(0) = y.x;
  traj.v.row(0) = y.v;
  for (int i = 0; i + 1 < N; ++i) {
    const double s = g.s(i);
    const State k1 = rhs(model, s, y);
    const State k2 = rhs(model, s + h / 2, {y.x + h / 2 * k1.x, y.v + h / 2 * k1.v});
    const State k3 = rhs(model, s + h / 2, {y.x + h / 2 * k2.x, y.v + h / 2 * k2.v});
    const State k4 = rhs(model, s + h, {y.x + h * k3.x, y.v + h * k3.v});
    y.x += h / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
    y.v += h / 6.0 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
    if (y.x.lpNorm<Eigen::Infinity>() > kBlowUp || y.v.lpNorm<Eigen::Infinity>() > kBlowUp)
      throw BlowUp("solve_ivp: state norm exceeded 1e12 at s=" + std::to_string(s + h));
    traj.x.row(i + 1) = y.x;
    traj.v.row(i + 1) = y.v;
  }
  return traj;
}

MatrixXd shooting_jacobian(const ConfigurationModel& model, const VectorXd& x0,
                           const VectorXd& v0, double T, int N) {
  const int n = model.n;
  MatrixXd J(n, n);
  for (int k = 0; k < n; ++k) {
    const double lam = 1e-4 * (1.0 + std::abs(v0(k)));
    VectorXd vp = v0, vm = v0;
    vp(k) += lam;
    vm(k) -= lam;
    const Trajectory tp = solve_ivp(model, x0, vp, T, N);
    const Trajectory tm = solve_ivp(model, x0, vm, T, N);
    J.col(k) = (tp.x.row(N - 1) - tm.x.row(N - 1)).transpose() / (2.0 * lam);
  }
  return J;
}

Trajectory solve_bvp(const ConfigurationModel& model, const BoundaryData& bc) {
  const int n = model.n;
  if (bc.x_minus.size() != n || bc.x_plus.size() != n)
    throw ConfigError("solve_bvp: boundary data dimension mismatch");
  const double tol = 1e-10 * (1.0 + bc.x_plus.lpNorm<Eigen::Infinity>());

  VectorXd v0 = (bc.x_plus - bc.x_minus) / (2.0 * bc.T);
  Trajectory traj = solve_ivp(model, bc.x_minus, v0, bc.T, bc.N);
  VectorXd F = (traj.x.row(bc.N - 1).transpose() - bc.x_plus).eval();

  for (int iter = 0; iter < kMaxNewton; ++iter) {
    // The Jacobian doubles as the conjugate-point detector: a singular
    // dx(T)/dv0 means the endpoints fail to label solutions uniquely.
    const MatrixXd J = shooting_jacobian(model, bc.x_minus, v0, bc.T, bc.N);
    const double normdet = std::abs((J / (2.0 * bc.T)).determinant());
    if (normdet < kConjugateDet)
      throw ConjugatePoint("solve_bvp: shooting Jacobian singular (normalized det=" +
                           std::to_string(normdet) + ")");
    if (F.lpNorm<Eigen::Infinity>() <= tol) return traj;

    const VectorXd step = -J.partialPivLu().solve(F);
    double alpha = 1.0;
    for (int half = 0; half <= kMaxHalvings; ++half) {
      const VectorXd v_try = v0 + alpha * step;
      Trajectory t_try = solve_ivp(model, bc.x_minus, v_try, bc.T, bc.N);
      VectorXd F_try = (t_try.x.row(bc.N - 1).transpose() - bc.x_plus).eval();
      if (F_try.lpNorm<Eigen::Infinity>() < F.lpNorm<Eigen::Infinity>() ||
          half == kMaxHalvings) {
        v0 = v_try;
        traj = std::move(t_try);
        F = F_try;
        break;
      }
      alpha *= 0.5;
    }
  }
  if (F.lpNorm<Eigen::Infinity>() <= tol) return traj;
  throw NoConvergence("solve_bvp: no convergence after 100 Newton steps (|F|=" +
                      std::to_string(F.lpNorm<Eigen::Infinity>()) + ")");
}

}  // namespace peierls
