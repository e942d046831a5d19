#pragma once

#include <Eigen/Dense>

#include "peierls/errors.hpp"

namespace peierls {

// Uniform parameter grid on [-T, T] with an odd number of points.
// All stencils in the library are second order and tied to this spacing.
struct Grid {
  double T = 1.0;
  int N = 201;

  Grid() = default;
  Grid(double T_, int N_) : T(T_), N(N_) {
    if (!(T > 0.0)) throw ConfigError("grid: T must be positive");
    if (N < 3 || N % 2 == 0) throw ConfigError("grid: N must be odd and >= 3");
  }

  double h() const { return 2.0 * T / (N - 1); }
  double s(int i) const { return -T + 2.0 * T * i / (N - 1); }

  Eigen::VectorXd points() const {
    Eigen::VectorXd out(N);
    for (int i = 0; i < N; ++i) out(i) = s(i);
    return out;
  }

  // Nearest grid index to a parameter value.
  int nearest(double sv) const {
    int i = static_cast<int>(std::lround((sv + T) / h()));
    if (i < 0) i = 0;
    if (i >= N) i = N - 1;
    return i;
  }
};

// Second-order derivative of a sampled field (N x n), central interior,
// one-sided at the two endpoints.
inline Eigen::MatrixXd grid_derivative(const Eigen::MatrixXd& f, double h) {
  const int N = static_cast<int>(f.rows());
  Eigen::MatrixXd df(N, f.cols());
  for (int i = 1; i + 1 < N; ++i) df.row(i) = (f.row(i + 1) - f.row(i - 1)) / (2.0 * h);
  df.row(0) = (-3.0 * f.row(0) + 4.0 * f.row(1) - f.row(2)) / (2.0 * h);
  df.row(N - 1) = (3.0 * f.row(N - 1) - 4.0 * f.row(N - 2) + f.row(N - 3)) / (2.0 * h);
  return df;
}

// Trapezoid quadrature of a scalar sample vector.
inline double trapezoid(const Eigen::VectorXd& f, double h) {
  const int N = static_cast<int>(f.size());
  double sum = 0.5 * (f(0) + f(N - 1));
  for (int i = 1; i + 1 < N; ++i) sum += f(i);
  return sum * h;
}

// Trapezoid inner product of two N x n grid fields: integral of sum_mu u w.
inline double grid_inner(const Eigen::MatrixXd& u, const Eigen::MatrixXd& w, double h) {
  if (u.rows() != w.rows() || u.cols() != w.cols())
    throw GridMismatch("grid_inner: field shapes differ");
  Eigen::VectorXd f = (u.array() * w.array()).rowwise().sum();
  return trapezoid(f, h);
}

inline double max_abs(const Eigen::MatrixXd& a) { return a.array().abs().maxCoeff(); }

// Max norm over interior rows only (boundary stencils excluded).
inline double interior_max_abs(const Eigen::MatrixXd& a) {
  const int N = static_cast<int>(a.rows());
  if (N < 3) return 0.0;
  return a.middleRows(1, N - 2).array().abs().maxCoeff();
}

}  // namespace peierls
