#pragma once

#include <Eigen/Dense>
#include <vector>

#include "peierls/errors.hpp"

namespace peierls {

// Periodic-box Klein-Gordon lattice: M sites per dimension on edge L, mass m.
// Wavevectors k = 2 pi n / L with integer components in (-M/2, M/2];
// omega_k = sqrt(k.k + m^2). Units c = hbar = 1.
struct LatticeSpec {
  int dim = 1;
  double L = 2.0 * M_PI;
  int M = 64;
  double mass = 1.0;

  struct Mode {
    std::vector<int> nvec;     // integer wavevector components
    double omega = 0.0;
    bool self_conjugate = false;  // n == -n (mod M): cos component only
  };
  std::vector<Mode> modes;        // all M^dim modes
  std::vector<int> rep_indices;   // representatives of {n, -n} pairs

  int sites() const;
  double cell_volume() const;
  double dx() const { return L / M; }
};

LatticeSpec make_lattice(int dim, double L, int M, double mass);

// Real scalar field sampled on a uniform time grid times the spatial lattice.
struct FieldConfiguration {
  Eigen::VectorXd tau;        // strictly increasing, uniform
  Eigen::MatrixXd values;     // time index x flat site index
};

// Spacetime density (the functional derivative dA/dphi sampled on the grid).
struct SpacetimeDensity {
  Eigen::VectorXd tau;
  Eigen::MatrixXd values;
};

// Lattice commutator function depending only on the separation:
//   G(dx, dt) = (1/L^d) sum_k cos(k.dx) sin(omega_k dt) / omega_k.
// dsite holds integer site displacements. Throws MasslessZeroMode for m = 0.
double kg_commutator(const LatticeSpec& spec, const std::vector<int>& dsite, double dt);

// Two-point form: depends only on the separation (translation invariance).
double kg_commutator(const LatticeSpec& spec, const std::vector<int>& x_site, double x_time,
                     const std::vector<int>& y_site, double y_time);

// Time derivative of the commutator function in its first time argument:
//   (1/L^d) sum_k cos(k.dx) cos(omega_k dt); at dt = 0 the lattice delta.
double kg_commutator_time_derivative(const LatticeSpec& spec, const std::vector<int>& dsite,
                                     double dt);

// Two-time boundary solution: per-mode interpolation
//   phi_k(tau) = [phi1_k sin(w(tau2-tau)) + phi2_k sin(w(tau-tau1))] / sin(w(tau2-tau1))
// matching the boundary fields at tau.front() and tau.back().
// Throws ResonantInterval listing modes with |sin(w (tau2-tau1))| < 1e-8.
FieldConfiguration kg_boundary_solution(const LatticeSpec& spec, const Eigen::VectorXd& phi1,
                                        const Eigen::VectorXd& phi2,
                                        const Eigen::VectorXd& tau);

// Exact single-mode solution a_c(t) cos(k.x) + a_s(t) sin(k.x) with
// a_c = c1 cos(w t) + c2 sin(w t), a_s = s1 cos(w t) + s2 sin(w t).
FieldConfiguration kg_mode_solution(const LatticeSpec& spec, const std::vector<int>& nvec,
                                    double c1, double c2, double s1, double s2,
                                    const Eigen::VectorXd& tau);

// Max per-mode leapfrog residual |(phi(t+) - 2 phi + phi(t-))/dtau^2 + w^2 phi|
// over interior times (spectral in space, second order in time).
double kg_solution_residual(const LatticeSpec& spec, const FieldConfiguration& field);

// Peierls bracket of two spacetime densities:
//   {A,B} = sum_{y,z} a(y) G(y - z) b(z) (dtau cellvol)^2.
double kg_peierls_bracket(const LatticeSpec& spec, const SpacetimeDensity& A,
                          const SpacetimeDensity& B);

// Flux of the symplectic current over the constant-time slice tau_index:
//   sum_x (J2 dJ1/dtau - J1 dJ2/dtau) cellvol, central differences in time.
// Throws NotASolution when either field fails the discrete residual check.
double symplectic_current_flux(const LatticeSpec& spec, const FieldConfiguration& J1,
                               const FieldConfiguration& J2, int tau_index);

}  // namespace peierls
