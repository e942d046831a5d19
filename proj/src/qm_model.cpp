#include "peierls/qm_model.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace peierls {

namespace {

void check_hermitian(const MatrixXcd& A, const char* what) {
  if ((A - A.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw NonHermitian(std::string(what) + ": matrix is not Hermitian to 1e-12");
}

void check_window(const QmWindow& w, const Grid& grid, const char* what) {
  if (w.lo <= -grid.T || w.hi >= grid.T || w(-grid.T) != 0.0 || w(grid.T) != 0.0)
    throw UnboundedWindow(std::string(what) +
                          ": window must be compactly supported inside the grid");
}

// U(tau) = exp(-i H tau / 2), scaling-and-squaring Pade behind Eigen's exp().
MatrixXcd evolution(const MatrixXcd& H, double tau) {
  const std::complex<double> mi(0.0, -1.0);
  return (mi * 0.5 * tau * H).exp();
}

}  // namespace

HilbertModel make_hilbert_model(const MatrixXcd& H, const VectorXd& q0, const VectorXd& p0) {
  check_hermitian(H, "make_hilbert_model");
  if (q0.size() != H.rows() || p0.size() != H.rows())
    throw ConfigError("make_hilbert_model: state dimension mismatch");
  if (!q0.allFinite() || !p0.allFinite())
    throw NonFiniteDerivative("make_hilbert_model: non-finite state");
  HilbertModel m;
  m.d = static_cast<int>(H.rows());
  m.H = H;
  m.q0 = q0;
  m.p0 = p0;
  return m;
}

QmWindow unit_bump_window(const Grid& grid, double lo, double hi) {
  const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
  auto bump = [c, r](double s) {
    const double u = (s - c) / r;
    if (std::abs(u) >= 1.0) return 0.0;
    const double t = 1.0 - u * u;
    return t * t * t;
  };
  // Normalize the discrete trapezoid mass to exactly 1 on this grid.
  Eigen::VectorXd samples(grid.N);
  for (int i = 0; i < grid.N; ++i) samples(i) = bump(grid.s(i));
  const double mass = trapezoid(samples, grid.h());
  QmWindow w;
  w.lo = lo;
  w.hi = hi;
  w.weight = [bump, mass](double s) { return bump(s) / mass; };
  return w;
}

MatrixXd real_embedding(const MatrixXcd& A) {
  const int d = static_cast<int>(A.rows());
  MatrixXd out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = A.real();
  out.topRightCorner(d, d) = -A.imag();
  out.bottomLeftCorner(d, d) = A.imag();
  out.bottomRightCorner(d, d) = A.real();
  return out;
}

MatrixXd symplectic_unit(int d) {
  MatrixXd o = MatrixXd::Zero(2 * d, 2 * d);
  o.topRightCorner(d, d) = MatrixXd::Identity(d, d);
  o.bottomLeftCorner(d, d) = -MatrixXd::Identity(d, d);
  return o;
}

double free_commutator_bracket(const HilbertModel& model, const MatrixXcd& A,
                               const MatrixXcd& B) {
  check_hermitian(A, "free_commutator_bracket");
  check_hermitian(B, "free_commutator_bracket");
  const MatrixXd Ah = real_embedding(A);
  const MatrixXd Bh = real_embedding(B);
  const MatrixXd comm = Ah * Bh - Bh * Ah;
  const VectorXd psi = model.psi_real();
  return -0.5 * psi.dot(symplectic_unit(model.d) * comm * psi);
}

MatrixXd qm_response_difference(const Grid& grid, const QmWindow& w, const VectorXd& sigma) {
  const int N = grid.N;
  const int m = static_cast<int>(sigma.size());
  const MatrixXd Om = symplectic_unit(m / 2);
  const double h = grid.h();

  Eigen::VectorXd ww(N);
  for (int i = 0; i < N; ++i) ww(i) = w(grid.s(i));

  // Retarded: delta(s) = Omega * cumulative integral of eps; advanced likewise
  // from the future end. Their difference is constant in s.
  MatrixXd ret(N, m), adv(N, m);
  double cum = 0.0;
  ret.row(0) = VectorXd::Zero(m);
  for (int i = 1; i < N; ++i) {
    cum += 0.5 * h * (ww(i - 1) + ww(i));
    ret.row(i) = cum * (Om * sigma).transpose();
  }
  double tail = 0.0;
  adv.row(N - 1) = VectorXd::Zero(m);
  for (int i = N - 2; i >= 0; --i) {
    tail += 0.5 * h * (ww(i) + ww(i + 1));
    adv.row(i) = -tail * (Om * sigma).transpose();
  }
  return ret - adv;
}

double qm_pipeline_bracket(const HilbertModel& model, const MatrixXcd& A, const MatrixXcd& B,
                           const QmWindow& wA, const QmWindow& wB, const Grid& grid) {
  check_hermitian(A, "qm_pipeline_bracket");
  check_hermitian(B, "qm_pipeline_bracket");
  check_window(wA, grid, "qm_pipeline_bracket");
  check_window(wB, grid, "qm_pipeline_bracket");

  const VectorXd psi = model.psi_real();
  const VectorXd sigA = real_embedding(A) * psi;
  const VectorXd sigB = real_embedding(B) * psi;

  const MatrixXd u = qm_response_difference(grid, wA, sigA);
  Eigen::VectorXd integrand(grid.N);
  for (int i = 0; i < grid.N; ++i)
    integrand(i) = u.row(i).dot(wB(grid.s(i)) * sigB.transpose());
  return trapezoid(integrand, grid.h());
}

double canonical_bivector_check(const HilbertModel& model, const Grid& grid) {
  if (model.H.cwiseAbs().maxCoeff() > 0.0)
    throw ConfigError("canonical_bivector_check: requires H = 0");
  const int m = 2 * model.d;
  const QmWindow w = unit_bump_window(grid, -0.6 * grid.T, 0.6 * grid.T);

  // Brackets of de-windowed coordinate functionals; the expected constant
  // matrix is [[0, -I], [I, 0]], i.e. identity on the (p, q) block.
  MatrixXd bracket(m, m);
  for (int a = 0; a < m; ++a) {
    const MatrixXd u = qm_response_difference(grid, w, VectorXd::Unit(m, a));
    for (int b = 0; b < m; ++b) {
      Eigen::VectorXd integrand(grid.N);
      for (int i = 0; i < grid.N; ++i) integrand(i) = u(i, b) * w(grid.s(i));
      bracket(a, b) = trapezoid(integrand, grid.h());
    }
  }
  const MatrixXd expected = -symplectic_unit(model.d);
  return (bracket - expected).cwiseAbs().maxCoeff();
}

double heisenberg_bracket(const HilbertModel& model, const QuadraticFunctional& A,
                          const QuadraticFunctional& B, const Grid& grid) {
  check_hermitian(A.A, "heisenberg_bracket");
  check_hermitian(B.A, "heisenberg_bracket");
  check_window(A.window, grid, "heisenberg_bracket");
  check_window(B.window, grid, "heisenberg_bracket");

  const int N = grid.N;
  const VectorXcd psi = model.psi0();

  std::vector<MatrixXcd> AH(N), BH(N);
  Eigen::VectorXd wA(N), wB(N);
  for (int i = 0; i < N; ++i) {
    const MatrixXcd U = evolution(model.H, grid.s(i));
    AH[i] = U.adjoint() * A.A * U;
    BH[i] = U.adjoint() * B.A * U;
    wA(i) = A.window(grid.s(i));
    wB(i) = B.window(grid.s(i));
  }

  std::complex<double> total(0.0, 0.0);
  const double h = grid.h();
  for (int i = 0; i < N; ++i) {
    if (wA(i) == 0.0) continue;
    const double wi = ((i == 0 || i == N - 1) ? 0.5 : 1.0) * h * wA(i);
    const VectorXcd Apsi = AH[i] * psi;
    for (int j = 0; j < N; ++j) {
      if (wB(j) == 0.0) continue;
      const double wj = ((j == 0 || j == N - 1) ? 0.5 : 1.0) * h * wB(j);
      const std::complex<double> val =
          psi.dot(AH[i] * (BH[j] * psi)) - (BH[j].adjoint() * psi).dot(Apsi);
      total += wi * wj * val;
    }
  }
  const std::complex<double> result = std::complex<double>(0.0, 0.5) * total;
  if (std::abs(result.imag()) > 1e-10 * (1.0 + std::abs(result.real())))
    throw Error("heisenberg_bracket: non-real value (imag " +
                std::to_string(result.imag()) + ")");
  return result.real();
}

double canonical_bivector_check(const HilbertModel& model) {
  return canonical_bivector_check(model, Grid(1.0, 201));
}

double heisenberg_bracket(const HilbertModel& model, const QuadraticFunctional& A,
                          const QuadraticFunctional& B) {
  return heisenberg_bracket(model, A, B, Grid(1.0, 201));
}

double unitarity_drift(const HilbertModel& model, const Grid& grid) {
  const VectorXcd psi = model.psi0();
  const double norm0 = psi.squaredNorm();
  double drift = 0.0;
  for (int i = 0; i < grid.N; ++i) {
    const MatrixXcd U = evolution(model.H, grid.s(i));
    drift = std::max(drift, std::abs((U * psi).squaredNorm() - norm0));
  }
  return drift;
}

}  // namespace peierls
