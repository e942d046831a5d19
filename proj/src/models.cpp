#include "peierls/models.hpp"

#include <cmath>

namespace peierls {

namespace {

MetricData flat_metric(int n) {
  MetricData md;
  md.g = [n](const VectorXd&) { return MatrixXd::Identity(n, n); };
  md.christoffel = [n](const VectorXd&) {
    return std::vector<MatrixXd>(n, MatrixXd::Zero(n, n));
  };
  md.riemann = [n](const VectorXd&) { return std::vector<double>(n * n * n * n, 0.0); };
  return md;
}

}  // namespace

ConfigurationModel free_model(int n, double mass) {
  ConfigurationModel m;
  m.n = n;
  m.name = "free";
  m.partials_mode = PartialsMode::analytic;
  m.lagrangian = [mass](double, const VectorXd&, const VectorXd& v) {
    return 0.5 * mass * v.squaredNorm();
  };
  m.analytic_partials = [n, mass](double, const VectorXd&, const VectorXd& v) {
    PartialBundle b;
    b.Lx = VectorXd::Zero(n);
    b.Lv = mass * v;
    b.Lxx = MatrixXd::Zero(n, n);
    b.Lxv = MatrixXd::Zero(n, n);
    b.Lvv = mass * MatrixXd::Identity(n, n);
    return b;
  };
  m.metric = flat_metric(n);
  return m;
}

ConfigurationModel harmonic_model(double mass) {
  ConfigurationModel m;
  m.n = 1;
  m.name = "harmonic";
  m.partials_mode = PartialsMode::analytic;
  m.lagrangian = [mass](double, const VectorXd& x, const VectorXd& v) {
    return 0.5 * mass * (v(0) * v(0) - x(0) * x(0));
  };
  m.analytic_partials = [mass](double, const VectorXd& x, const VectorXd& v) {
    PartialBundle b;
    b.Lx = -mass * x;
    b.Lv = mass * v;
    b.Lxx = -mass * MatrixXd::Identity(1, 1);
    b.Lxv = MatrixXd::Zero(1, 1);
    b.Lvv = mass * MatrixXd::Identity(1, 1);
    return b;
  };
  return m;
}

ConfigurationModel sphere_model(double mass) {
  ConfigurationModel m;
  m.n = 2;
  m.name = "sphere";
  m.partials_mode = PartialsMode::analytic;
  m.lagrangian = [mass](double, const VectorXd& x, const VectorXd& v) {
    const double st = std::sin(x(0));
    return 0.5 * mass * (v(0) * v(0) + st * st * v(1) * v(1));
  };
  m.analytic_partials = [mass](double, const VectorXd& x, const VectorXd& v) {
    const double st = std::sin(x(0)), ct = std::cos(x(0));
    const double c2t = std::cos(2.0 * x(0)), s2t = std::sin(2.0 * x(0));
    PartialBundle b;
    b.Lx.resize(2);
    b.Lv.resize(2);
    b.Lx << mass * st * ct * v(1) * v(1), 0.0;
    b.Lv << mass * v(0), mass * st * st * v(1);
    b.Lxx.setZero(2, 2);
    b.Lxx(0, 0) = mass * c2t * v(1) * v(1);
    b.Lxv.setZero(2, 2);
    b.Lxv(0, 1) = mass * s2t * v(1);
    b.Lvv.setZero(2, 2);
    b.Lvv(0, 0) = mass;
    b.Lvv(1, 1) = mass * st * st;
    return b;
  };

  MetricData md;
  md.g = [](const VectorXd& x) {
    MatrixXd g = MatrixXd::Identity(2, 2);
    const double st = std::sin(x(0));
    g(1, 1) = st * st;
    return g;
  };
  md.christoffel = [](const VectorXd& x) {
    const double st = std::sin(x(0)), ct = std::cos(x(0));
    std::vector<MatrixXd> G(2, MatrixXd::Zero(2, 2));
    G[0](1, 1) = -st * ct;                    // Gamma^theta_{phi phi}
    G[1](0, 1) = G[1](1, 0) = ct / st;        // Gamma^phi_{theta phi}
    return G;
  };
  md.riemann = [](const VectorXd& x) {
    // Unit sphere: R^theta_{phi theta phi} = sin^2(theta), R^phi_{theta phi theta} = 1,
    // antisymmetric in the last index pair.
    const double s2 = std::sin(x(0)) * std::sin(x(0));
    std::vector<double> R(16, 0.0);
    auto idx = [](int a, int b, int c, int d) { return ((a * 2 + b) * 2 + c) * 2 + d; };
    R[idx(0, 1, 0, 1)] = s2;
    R[idx(0, 1, 1, 0)] = -s2;
    R[idx(1, 0, 1, 0)] = 1.0;
    R[idx(1, 0, 0, 1)] = -1.0;
    return R;
  };
  m.metric = md;
  return m;
}

}  // namespace peierls
