#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

#include "peierls/grid.hpp"

namespace peierls {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Finite-dimensional Hilbert-space model: Hermitian Hamiltonian H and the
// real/imaginary components (q0, p0) of the initial state. The evolution
// convention is 2i dpsi/ds = H psi, i.e. U(tau) = exp(-i H tau / 2).
struct HilbertModel {
  int d = 1;
  MatrixXcd H;
  VectorXd q0, p0;

  VectorXcd psi0() const { return q0 + std::complex<double>(0, 1) * p0; }
  VectorXd psi_real() const {
    VectorXd out(2 * d);
    out << q0, p0;
    return out;
  }
};

HilbertModel make_hilbert_model(const MatrixXcd& H, const VectorXd& q0, const VectorXd& p0);

// Compact nonnegative weight on the time grid.
struct QmWindow {
  std::function<double(double)> weight;
  double lo = -0.5, hi = 0.5;

  double operator()(double s) const { return (s >= lo && s <= hi) ? weight(s) : 0.0; }
};

// Smooth bump window on [lo, hi] with unit discrete mass on the given grid.
QmWindow unit_bump_window(const Grid& grid, double lo, double hi);

// Quadratic-form functional: density w(s) <psi|A|psi>, A Hermitian.
struct QuadraticFunctional {
  MatrixXcd A;
  QmWindow window;
};

// Real 2d x 2d embedding of a complex matrix in (q, p) block coordinates.
MatrixXd real_embedding(const MatrixXcd& A);

// Block symplectic unit [[0, I], [-I, 0]].
MatrixXd symplectic_unit(int d);

// p0^T [A, B] q0 evaluated through the real matrix representations; for
// complex Hermitian inputs this is -Im <psi0| A B |psi0>, which reduces to the
// real-matrix expression when A, B are real symmetric. H plays no role here.
double free_commutator_bracket(const HilbertModel& model, const MatrixXcd& A,
                               const MatrixXcd& B);

// Response difference of the first-order linearized system Omega d(delta)/ds
// = -eps for a separable source eps(s) = w(s) sigma: retarded minus advanced
// marching on the grid. The result is constant in s (the commutator Green
// matrix of this system is the constant Omega).
MatrixXd qm_response_difference(const Grid& grid, const QmWindow& w, const VectorXd& sigma);

// Peierls bracket of two quadratic functionals through the first-order
// pipeline on the canonical Lagrangian q^T pdot - p^T qdot (H = 0 case):
// sources w(s) A_hat Psi0, trapezoid quadrature throughout. Equals
// free_commutator_bracket times the window masses.
double qm_pipeline_bracket(const HilbertModel& model, const MatrixXcd& A, const MatrixXcd& B,
                           const QmWindow& wA, const QmWindow& wB, const Grid& grid);

// Extracts the bivector coefficients of the pipeline in (q0, p0) coordinates
// (brackets of de-windowed coordinate functionals) and returns the max
// deviation from the constant canonical matrix: identity on the (p, q) block.
double canonical_bivector_check(const HilbertModel& model, const Grid& grid);
double canonical_bivector_check(const HilbertModel& model);  // default desk grid

// Windowed Heisenberg double-time bracket
//   (i/2) int dtau int dt w_A(tau) w_B(t) <psi0|[A_H(tau), B_H(t)]|psi0>
// with A_H(tau) = U†(tau) A U(tau), U(tau) = exp(-i H tau / 2). The prefactor
// is normalized so the H = 0 case reduces to free_commutator_bracket times
// the window masses. Throws UnboundedWindow when a window fails to vanish at
// the grid boundary, NonHermitian for bad operator arguments.
double heisenberg_bracket(const HilbertModel& model, const QuadraticFunctional& A,
                          const QuadraticFunctional& B, const Grid& grid);
double heisenberg_bracket(const HilbertModel& model, const QuadraticFunctional& A,
                          const QuadraticFunctional& B);  // default desk grid

// Max drift of <psi(t)|psi(t)> over the grid under the matrix-exponential
// evolution (unitarity diagnostic).
double unitarity_drift(const HilbertModel& model, const Grid& grid);

}  // namespace peierls
