#pragma once

#include "peierls/lagrangian_core.hpp"

namespace peierls {

// Free kinetic model L = (m/2) |v|^2 in n flat dimensions, with the identity
// metric attached so covariant checks can run on it.
ConfigurationModel free_model(int n = 1, double mass = 1.0);

// Harmonic oscillator L = (1/2)(v^2 - x^2), one degree of freedom.
ConfigurationModel harmonic_model(double mass = 1.0);

// Kinetic model on the unit 2-sphere in (theta, phi) coordinates:
// L = (m/2)(vtheta^2 + sin^2(theta) vphi^2), with metric, Christoffel symbols
// and curvature attached. Charts degenerate at the poles.
ConfigurationModel sphere_model(double mass = 1.0);

}  // namespace peierls
