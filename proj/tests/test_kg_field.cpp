#include <doctest.h>

#include <cmath>

#include "peierls/kg_field.hpp"
#include "peierls/report.hpp"

using namespace peierls;

namespace {

Eigen::VectorXd time_grid(double lo, double hi, int steps) {
  return Eigen::VectorXd::LinSpaced(steps, lo, hi);
}

}  // namespace

TEST_CASE("lattice spec enumerates modes closed under negation") {
  const LatticeSpec spec = make_lattice(1, 2.0 * M_PI, 8, 1.0);
  CHECK(static_cast<int>(spec.modes.size()) == 8);
  for (const auto& mode : spec.modes) {
    CHECK(mode.omega > 0.0);
    // -n is in the set modulo M
    int neg = -mode.nvec[0];
    if (neg <= -spec.M / 2) neg += spec.M;
    bool found = false;
    for (const auto& other : spec.modes)
      if (other.nvec[0] == neg) found = true;
    CHECK(found);
  }
  CHECK(spec.rep_indices.size() == 5);  // 0, Nyquist, and three pairs
}

TEST_CASE("equal-time commutator vanishes exactly") {
  const LatticeSpec spec = make_lattice(1, 2.0 * M_PI, 64, 1.0);
  for (int j = 0; j < 64; j += 5) CHECK(kg_commutator(spec, {j}, 0.0) == 0.0);
}

TEST_CASE("equal-time time-derivative commutator is the lattice delta") {
  for (int d : {1, 3}) {
    const int M = (d == 1) ? 64 : 8;
    const LatticeSpec spec = make_lattice(d, 2.0 * M_PI, M, 1.0);
    const double cell_inv = std::pow(M / (2.0 * M_PI), d);
    std::vector<int> dj(d, 0);
    CHECK(std::abs(kg_commutator_time_derivative(spec, dj, 0.0) - cell_inv) <=
          1e-12 * cell_inv);
    for (int shift = 1; shift < M; shift += 3) {
      dj[0] = shift;
      CHECK(std::abs(kg_commutator_time_derivative(spec, dj, 0.0)) <= 1e-12 * cell_inv);
    }
  }
}

TEST_CASE("commutator is antisymmetric and translation covariant") {
  const LatticeSpec spec = make_lattice(1, 2.0 * M_PI, 32, 1.0);
  for (int j : {0, 3, 7}) {
    for (double dt : {0.1, 0.7, -1.3}) {
      CHECK(std::abs(kg_commutator(spec, {j}, dt) + kg_commutator(spec, {-j}, -dt)) <= 1e-12);
      // periodic wrap: j and j - M label the same separation
      CHECK(kg_commutator(spec, {j}, dt) ==
            doctest::Approx(kg_commutator(spec, {j - 32}, dt)).epsilon(1e-14));
      // the two-point form depends only on the separation
      CHECK(kg_commutator(spec, {j + 5}, 0.4 + dt, {(5)}, 0.4) ==
            doctest::Approx(kg_commutator(spec, {j}, dt)).epsilon(1e-14));
    }
  }
}

TEST_CASE("massless commutator is refused") {
  const LatticeSpec spec = make_lattice(1, 2.0 * M_PI, 16, 0.0);
  CHECK_THROWS_AS(kg_commutator(spec, {1}, 0.5), MasslessZeroMode);
}

TEST_CASE("boundary solution reproduces a standing cosine mode") {
  const LatticeSpec spec = make_lattice(1, 2.0 * M_PI, 16, 1.0);
  const Eigen::VectorXd tau = time_grid(0.0, 1.0, 41);
  // phi(x, t) = cos(k x) cos(w t) for n = 2
  const FieldConfiguration exact = kg_mode_solution(spec, {2}, 1.0, 0.0, 0.0, 0.0, tau);
  const FieldConfiguration rec = kg_boundary_solution(
      spec, exact.values.row(0).transpose(), exact.values.row(40).transpose(), tau);
  CHECK((rec.values - exact.values).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((rec.values.row(0) - exact.values.row(0)).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((rec.values.row(40) - exact.values.row(40)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("boundary solution matches independent per-mode oscillator solves at M = 2") {
  const LatticeSpec spec = make_lattice(1, 2.0 * M_PI, 2, 1.0);
  const Eigen::VectorXd tau = time_grid(0.0, 0.9, 31);
  Eigen::VectorXd phi1(2), phi2(2);
  phi1 << 0.7, -0.2;
  phi2 << -0.4, 0.5;
  const FieldConfiguration sol = kg_boundary_solution(spec, phi1, phi2, tau);

  // modes: n = 0 (omega = 1) and n = 1 Nyquist (omega = sqrt(1 + 1)),
  // amplitudes phi_k(t) solving the two-point oscillator problem.
  const double T = 0.9;
  auto two_point = [T](double w, double a, double b, double t) {
    return (a * std::sin(w * (T - t)) + b * std::sin(w * t)) / std::sin(w * T);
  };
  // cos components: mode 0: (phi(x0)+phi(x1))/2; Nyquist: (phi(x0)-phi(x1))/2
  const double w0 = 1.0, w1 = std::sqrt(1.0 + 1.0);
  for (int t = 0; t < tau.size(); ++t) {
    const double m0 = two_point(w0, 0.5 * (phi1(0) + phi1(1)), 0.5 * (phi2(0) + phi2(1)),
                                tau(t));
    const double m1 = two_point(w1, 0.5 * (phi1(0) - phi1(1)), 0.5 * (phi2(0) - phi2(1)),
                                tau(t));
    CHECK(sol.values(t, 0) == doctest::Approx(m0 + m1).epsilon(1e-10));
    CHECK(sol.values(t, 1) == doctest::Approx(m0 - m1).epsilon(1e-10));
  }
}

TEST_CASE("boundary solution rejects resonant intervals") {
  const LatticeSpec spec = make_lattice(1, 2.0 * M_PI, 8, 1.0);
  // the n = 0 mode has omega = 1; an interval of length pi is resonant
  const Eigen::VectorXd tau = time_grid(0.0, M_PI, 21);
  const Eigen::VectorXd phi = Eigen::VectorXd::Ones(8);
  CHECK_THROWS_AS(kg_boundary_solution(spec, phi, 0.5 * phi, tau), ResonantInterval);
}

TEST_CASE("boundary solution leapfrog residual converges at second order") {
  const LatticeSpec spec = make_lattice(1, 2.0 * M_PI, 8, 1.0);
  Eigen::VectorXd phi1(8), phi2(8);
  std::uint64_t state = 321;
  for (int j = 0; j < 8; ++j) {
    phi1(j) = uniform_real(state, -1, 1);
    phi2(j) = uniform_real(state, -1, 1);
  }
  double prev = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int steps = 20 * (1 << k) + 1;
    const FieldConfiguration sol =
        kg_boundary_solution(spec, phi1, phi2, time_grid(0.0, 1.0, steps));
    const double res = kg_solution_residual(spec, sol);
    if (k > 0) CHECK(res <= prev / 3.6);
    prev = res;
  }
}

TEST_CASE("delta-density bracket reproduces the commutator kernel") {
  const LatticeSpec spec = make_lattice(1, 2.0 * M_PI, 32, 1.0);
  const int steps = 11;
  const Eigen::VectorXd tau = time_grid(-0.5, 0.5, steps);
  const double dt = tau(1) - tau(0);
  const double cell = spec.cell_volume() * dt;

  SpacetimeDensity A, B;
  A.tau = B.tau = tau;
  A.values = Eigen::MatrixXd::Zero(steps, spec.sites());
  B.values = Eigen::MatrixXd::Zero(steps, spec.sites());
  A.values(3, 4) = 1.0 / cell;
  B.values(8, 11) = 1.0 / cell;

  const double expected = kg_commutator(spec, {4 - 11}, tau(3) - tau(8));
  CHECK(std::abs(kg_peierls_bracket(spec, A, B) - expected) <= 1e-12);
  CHECK(std::abs(kg_peierls_bracket(spec, A, A)) <= 1e-12);
  CHECK(std::abs(kg_peierls_bracket(spec, A, B) + kg_peierls_bracket(spec, B, A)) <= 1e-12);
}

TEST_CASE("bracket is bilinear over density superpositions") {
  const LatticeSpec spec = make_lattice(1, 2.0 * M_PI, 16, 1.0);
  const int steps = 9;
  const Eigen::VectorXd tau = time_grid(-0.4, 0.4, steps);
  std::uint64_t state = 99;
  auto random_density = [&](SpacetimeDensity& D) {
    D.tau = tau;
    D.values.setZero(steps, spec.sites());
    for (int t = 2; t < 7; ++t)
      for (int j = 0; j < spec.sites(); ++j) D.values(t, j) = uniform_real(state, -1, 1);
  };
  SpacetimeDensity A, A2, B;
  random_density(A);
  random_density(A2);
  random_density(B);
  SpacetimeDensity combo;
  combo.tau = tau;
  combo.values = 1.7 * A.values - 0.6 * A2.values;
  const double lhs = kg_peierls_bracket(spec, combo, B);
  const double rhs =
      1.7 * kg_peierls_bracket(spec, A, B) - 0.6 * kg_peierls_bracket(spec, A2, B);
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
}

TEST_CASE("spacelike commutator magnitude decreases under mode-count doubling") {
  const double L = 2.0 * M_PI;
  const double dxphys = 8.0 * (L / 64.0);  // eight lattice units at M = 64
  const double dt = L / 64.0;              // one lattice unit of time, c = 1
  double prev = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int M = 32 << k;
    const LatticeSpec spec = make_lattice(1, L, M, 1.0);
    const int dj = static_cast<int>(std::lround(dxphys / spec.dx()));
    const double val = std::abs(kg_commutator(spec, {dj}, dt));
    if (k > 0) CHECK(val < prev);
    prev = val;
  }
}

TEST_CASE("symplectic current flux is conserved and mode-orthogonal") {
  const LatticeSpec spec = make_lattice(1, 2.0 * M_PI, 16, 1.0);
  const Eigen::VectorXd tau = time_grid(0.0, 1.0, 101);

  const FieldConfiguration J1 = kg_mode_solution(spec, {2}, 1.0, 0.0, 0.0, 0.0, tau);
  const FieldConfiguration J2 = kg_mode_solution(spec, {2}, 0.0, 1.0, 0.0, 0.0, tau);
  const FieldConfiguration J3 = kg_mode_solution(spec, {3}, 0.5, 0.2, -0.3, 0.1, tau);

  CHECK(std::abs(symplectic_current_flux(spec, J1, J1, 50)) <= 1e-12);

  // same-mode pair: flux equals the oscillator Wronskian times the volume
  std::vector<double> fluxes;
  for (int t : {5, 25, 50, 80, 95}) fluxes.push_back(symplectic_current_flux(spec, J1, J2, t));
  for (double f : fluxes)
    CHECK(std::abs(f - fluxes.front()) <= 1e-6 * std::max(1.0, std::abs(fluxes.front())));
  CHECK(std::abs(fluxes.front()) > 1e-3);

  // distinct modes are orthogonal on the lattice
  for (int t : {10, 60}) CHECK(std::abs(symplectic_current_flux(spec, J1, J3, t)) <= 1e-10);
}

TEST_CASE("symplectic current flux rejects non-solutions") {
  const LatticeSpec spec = make_lattice(1, 2.0 * M_PI, 8, 1.0);
  const Eigen::VectorXd tau = time_grid(0.0, 1.0, 41);
  FieldConfiguration junk;
  junk.tau = tau;
  junk.values.setZero(tau.size(), spec.sites());
  std::uint64_t state = 7;
  for (int t = 0; t < tau.size(); ++t)
    for (int j = 0; j < spec.sites(); ++j) junk.values(t, j) = uniform_real(state, -1, 1);
  const FieldConfiguration good = kg_mode_solution(spec, {1}, 1.0, 0.0, 0.0, 0.0, tau);
  CHECK_THROWS_AS(symplectic_current_flux(spec, junk, good, 20), NotASolution);
}

TEST_CASE("random boundary solutions conserve the flux across all interior slices") {
  const LatticeSpec spec = make_lattice(1, 2.0 * M_PI, 16, 1.0);
  const Eigen::VectorXd tau = time_grid(0.0, 1.1, 201);
  std::uint64_t state = 13;
  Eigen::VectorXd a1(16), a2(16), b1(16), b2(16);
  for (int j = 0; j < 16; ++j) {
    a1(j) = uniform_real(state, -1, 1);
    a2(j) = uniform_real(state, -1, 1);
    b1(j) = uniform_real(state, -1, 1);
    b2(j) = uniform_real(state, -1, 1);
  }
  const FieldConfiguration J1 = kg_boundary_solution(spec, a1, a2, tau);
  const FieldConfiguration J2 = kg_boundary_solution(spec, b1, b2, tau);
  double lo = 0.0, hi = 0.0;
  for (int t = 1; t + 1 < tau.size(); ++t) {
    const double f = symplectic_current_flux(spec, J1, J2, t);
    if (t == 1) lo = hi = f;
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  CHECK((hi - lo) <= 1e-6 * std::max(1.0, std::abs(hi)));
}
