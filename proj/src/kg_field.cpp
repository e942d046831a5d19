#include "peierls/kg_field.hpp"

#include <cmath>
#include <sstream>

namespace peierls {

namespace {

// Angles are reduced modulo the lattice period before the trig call so that
// orthogonality sums cancel to machine precision.
double lattice_angle(long long dot, int M) {
  long long r = dot % M;
  if (r < 0) r += M;
  return 2.0 * M_PI * static_cast<double>(r) / M;
}

long long mode_dot(const std::vector<int>& nvec, const std::vector<int>& site) {
  long long acc = 0;
  for (size_t a = 0; a < nvec.size(); ++a)
    acc += static_cast<long long>(nvec[a]) * site[a];
  return acc;
}

std::vector<int> site_coords(const LatticeSpec& spec, int flat) {
  std::vector<int> c(spec.dim);
  for (int a = 0; a < spec.dim; ++a) {
    c[a] = flat % spec.M;
    flat /= spec.M;
  }
  return c;
}

// Real mode amplitudes (cos, sin) of a field sample over the representatives.
struct ModeAmplitudes {
  Eigen::VectorXd a, b;  // indexed by rep position
};

ModeAmplitudes analyze(const LatticeSpec& spec, const Eigen::VectorXd& phi) {
  const int nrep = static_cast<int>(spec.rep_indices.size());
  const int S = spec.sites();
  ModeAmplitudes out;
  out.a.setZero(nrep);
  out.b.setZero(nrep);
  for (int r = 0; r < nrep; ++r) {
    const auto& mode = spec.modes[spec.rep_indices[r]];
    double ca = 0.0, cb = 0.0;
    for (int j = 0; j < S; ++j) {
      const double ang = lattice_angle(mode_dot(mode.nvec, site_coords(spec, j)), spec.M);
      ca += phi(j) * std::cos(ang);
      cb += phi(j) * std::sin(ang);
    }
    const double scale = (mode.self_conjugate ? 1.0 : 2.0) / S;
    out.a(r) = scale * ca;
    out.b(r) = scale * cb;
  }
  return out;
}

Eigen::VectorXd synthesize(const LatticeSpec& spec, const ModeAmplitudes& amp) {
  const int nrep = static_cast<int>(spec.rep_indices.size());
  const int S = spec.sites();
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(S);
  for (int r = 0; r < nrep; ++r) {
    const auto& mode = spec.modes[spec.rep_indices[r]];
    for (int j = 0; j < S; ++j) {
      const double ang = lattice_angle(mode_dot(mode.nvec, site_coords(spec, j)), spec.M);
      phi(j) += amp.a(r) * std::cos(ang) + amp.b(r) * std::sin(ang);
    }
  }
  return phi;
}

void check_uniform_tau(const Eigen::VectorXd& tau, const char* what) {
  if (tau.size() < 3) throw ConfigError(std::string(what) + ": need at least 3 time points");
  const double dt = tau(1) - tau(0);
  for (int i = 1; i + 1 < tau.size(); ++i)
    if (std::abs((tau(i + 1) - tau(i)) - dt) > 1e-12 * std::max(1.0, std::abs(dt)))
      throw ConfigError(std::string(what) + ": time grid must be uniform");
}

}  // namespace

int LatticeSpec::sites() const {
  int s = 1;
  for (int a = 0; a < dim; ++a) s *= M;
  return s;
}

double LatticeSpec::cell_volume() const { return std::pow(L / M, dim); }

LatticeSpec make_lattice(int dim, double L, int M, double mass) {
  if (dim < 1 || dim > 3) throw ConfigError("make_lattice: dim must be 1, 2 or 3");
  if (M < 2 || M % 2 != 0) throw ConfigError("make_lattice: M must be even and >= 2");
  if (!(L > 0.0) || mass < 0.0) throw ConfigError("make_lattice: bad L or mass");

  LatticeSpec spec;
  spec.dim = dim;
  spec.L = L;
  spec.M = M;
  spec.mass = mass;

  const double k0 = 2.0 * M_PI / L;
  const int lo = -M / 2 + 1;
  const int total = spec.sites();
  spec.modes.reserve(total);
  for (int flat = 0; flat < total; ++flat) {
    LatticeSpec::Mode m;
    m.nvec.resize(dim);
    int rem = flat;
    for (int a = 0; a < dim; ++a) {
      m.nvec[a] = lo + (rem % M);
      rem /= M;
    }
    double k2 = 0.0;
    bool self = true;
    for (int a = 0; a < dim; ++a) {
      k2 += (k0 * m.nvec[a]) * (k0 * m.nvec[a]);
      if (m.nvec[a] != 0 && m.nvec[a] != M / 2) self = false;
    }
    m.omega = std::sqrt(k2 + mass * mass);
    m.self_conjugate = self;
    spec.modes.push_back(std::move(m));
  }

  // One representative per {n, -n (mod M)} pair: keep n whose first nonzero
  // non-self component is positive.
  for (int i = 0; i < total; ++i) {
    const auto& nv = spec.modes[i].nvec;
    bool keep = true;
    for (int a = dim - 1; a >= 0; --a) {
      if (nv[a] == 0 || nv[a] == M / 2) continue;
      keep = nv[a] > 0;
      break;
    }
    if (keep) spec.rep_indices.push_back(i);
  }
  return spec;
}

double kg_commutator(const LatticeSpec& spec, const std::vector<int>& dsite, double dt) {
  if (spec.mass == 0.0)
    throw MasslessZeroMode("kg_commutator: 1/omega mode sum is singular at k = 0 for m = 0");
  if (static_cast<int>(dsite.size()) != spec.dim)
    throw ConfigError("kg_commutator: displacement dimension mismatch");
  double sum = 0.0, comp = 0.0;  // Kahan
  for (const auto& mode : spec.modes) {
    const double ang = lattice_angle(mode_dot(mode.nvec, dsite), spec.M);
    const double term = std::cos(ang) * std::sin(mode.omega * dt) / mode.omega;
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / std::pow(spec.L, spec.dim);
}

double kg_commutator(const LatticeSpec& spec, const std::vector<int>& x_site, double x_time,
                     const std::vector<int>& y_site, double y_time) {
  if (x_site.size() != y_site.size())
    throw ConfigError("kg_commutator: point dimension mismatch");
  std::vector<int> dsite(x_site.size());
  for (size_t a = 0; a < x_site.size(); ++a) dsite[a] = x_site[a] - y_site[a];
  return kg_commutator(spec, dsite, x_time - y_time);
}

double kg_commutator_time_derivative(const LatticeSpec& spec, const std::vector<int>& dsite,
                                     double dt) {
  if (static_cast<int>(dsite.size()) != spec.dim)
    throw ConfigError("kg_commutator_time_derivative: displacement dimension mismatch");
  double sum = 0.0, comp = 0.0;
  for (const auto& mode : spec.modes) {
    const double ang = lattice_angle(mode_dot(mode.nvec, dsite), spec.M);
    const double term = std::cos(ang) * std::cos(mode.omega * dt);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / std::pow(spec.L, spec.dim);
}

FieldConfiguration kg_boundary_solution(const LatticeSpec& spec, const Eigen::VectorXd& phi1,
                                        const Eigen::VectorXd& phi2,
                                        const Eigen::VectorXd& tau) {
  check_uniform_tau(tau, "kg_boundary_solution");
  if (phi1.size() != spec.sites() || phi2.size() != spec.sites())
    throw ConfigError("kg_boundary_solution: boundary field size mismatch");
  const double tau1 = tau(0), tau2 = tau(tau.size() - 1);

  const ModeAmplitudes m1 = analyze(spec, phi1);
  const ModeAmplitudes m2 = analyze(spec, phi2);

  std::vector<int> offenders;
  for (size_t r = 0; r < spec.rep_indices.size(); ++r) {
    const double w = spec.modes[spec.rep_indices[r]].omega;
    if (std::abs(std::sin(w * (tau2 - tau1))) < 1e-8)
      offenders.push_back(spec.rep_indices[r]);
  }
  if (!offenders.empty()) {
    std::ostringstream os;
    os << "kg_boundary_solution: resonant interval for modes";
    for (int i : offenders) {
      os << " (";
      for (size_t a = 0; a < spec.modes[i].nvec.size(); ++a)
        os << spec.modes[i].nvec[a] << (a + 1 < spec.modes[i].nvec.size() ? "," : "");
      os << ")";
    }
    throw ResonantInterval(os.str());
  }

  FieldConfiguration out;
  out.tau = tau;
  out.values.resize(tau.size(), spec.sites());
  for (int t = 0; t < tau.size(); ++t) {
    ModeAmplitudes mt;
    mt.a.resize(m1.a.size());
    mt.b.resize(m1.b.size());
    for (size_t r = 0; r < spec.rep_indices.size(); ++r) {
      const double w = spec.modes[spec.rep_indices[r]].omega;
      const double den = std::sin(w * (tau2 - tau1));
      const double f1 = std::sin(w * (tau2 - tau(t))) / den;
      const double f2 = std::sin(w * (tau(t) - tau1)) / den;
      mt.a(r) = f1 * m1.a(r) + f2 * m2.a(r);
      mt.b(r) = f1 * m1.b(r) + f2 * m2.b(r);
    }
    out.values.row(t) = synthesize(spec, mt).transpose();
  }
  return out;
}

FieldConfiguration kg_mode_solution(const LatticeSpec& spec, const std::vector<int>& nvec,
                                    double c1, double c2, double s1, double s2,
                                    const Eigen::VectorXd& tau) {
  double omega = 0.0;
  bool found = false;
  for (const auto& mode : spec.modes)
    if (mode.nvec == nvec) {
      omega = mode.omega;
      found = true;
      break;
    }
  if (!found) throw ConfigError("kg_mode_solution: wavevector not in the mode set");

  FieldConfiguration out;
  out.tau = tau;
  out.values.resize(tau.size(), spec.sites());
  for (int t = 0; t < tau.size(); ++t) {
    const double ac = c1 * std::cos(omega * tau(t)) + c2 * std::sin(omega * tau(t));
    const double as = s1 * std::cos(omega * tau(t)) + s2 * std::sin(omega * tau(t));
    for (int j = 0; j < spec.sites(); ++j) {
      const double ang = lattice_angle(mode_dot(nvec, site_coords(spec, j)), spec.M);
      out.values(t, j) = ac * std::cos(ang) + as * std::sin(ang);
    }
  }
  return out;
}

double kg_solution_residual(const LatticeSpec& spec, const FieldConfiguration& field) {
  check_uniform_tau(field.tau, "kg_solution_residual");
  const int Nt = static_cast<int>(field.tau.size());
  const double dt = field.tau(1) - field.tau(0);

  std::vector<ModeAmplitudes> amps(Nt);
  for (int t = 0; t < Nt; ++t) amps[t] = analyze(spec, field.values.row(t).transpose());

  double worst = 0.0;
  for (size_t r = 0; r < spec.rep_indices.size(); ++r) {
    const double w2 = std::pow(spec.modes[spec.rep_indices[r]].omega, 2);
    for (int t = 1; t + 1 < Nt; ++t) {
      const double ra = (amps[t + 1].a(r) - 2 * amps[t].a(r) + amps[t - 1].a(r)) / (dt * dt) +
                        w2 * amps[t].a(r);
      const double rb = (amps[t + 1].b(r) - 2 * amps[t].b(r) + amps[t - 1].b(r)) / (dt * dt) +
                        w2 * amps[t].b(r);
      worst = std::max(worst, std::max(std::abs(ra), std::abs(rb)));
    }
  }
  return worst;
}

double kg_peierls_bracket(const LatticeSpec& spec, const SpacetimeDensity& A,
                          const SpacetimeDensity& B) {
  check_uniform_tau(A.tau, "kg_peierls_bracket");
  check_uniform_tau(B.tau, "kg_peierls_bracket");
  const double cell = spec.cell_volume();
  const double dtA = A.tau(1) - A.tau(0), dtB = B.tau(1) - B.tau(0);

  struct Entry {
    int t, site;
    double val;
  };
  auto collect = [&](const SpacetimeDensity& D) {
    std::vector<Entry> e;
    for (int t = 0; t < D.values.rows(); ++t)
      for (int j = 0; j < D.values.cols(); ++j)
        if (D.values(t, j) != 0.0) e.push_back({t, j, D.values(t, j)});
    return e;
  };
  const std::vector<Entry> ea = collect(A);
  const std::vector<Entry> eb = collect(B);

  double sum = 0.0;
  std::vector<int> dsite(spec.dim);
  for (const Entry& y : ea) {
    const std::vector<int> cy = site_coords(spec, y.site);
    for (const Entry& z : eb) {
      const std::vector<int> cz = site_coords(spec, z.site);
      for (int a = 0; a < spec.dim; ++a) dsite[a] = cy[a] - cz[a];
      const double g = kg_commutator(spec, dsite, A.tau(y.t) - B.tau(z.t));
      sum += y.val * g * z.val;
    }
  }
  return sum * cell * dtA * cell * dtB;
}

double symplectic_current_flux(const LatticeSpec& spec, const FieldConfiguration& J1,
                               const FieldConfiguration& J2, int tau_index) {
  if (J1.tau.size() != J2.tau.size() || (J1.tau - J2.tau).cwiseAbs().maxCoeff() > 1e-12)
    throw GridMismatch("symplectic_current_flux: time grids differ");
  const int Nt = static_cast<int>(J1.tau.size());
  if (tau_index < 1 || tau_index + 1 >= Nt)
    throw ConfigError("symplectic_current_flux: tau_index must be interior");

  const double dt = J1.tau(1) - J1.tau(0);
  // Stencil tolerance: twice the leading leapfrog truncation of an exact
  // solution, per mode amplitude.
  auto check_solution = [&](const FieldConfiguration& f, const char* name) {
    const double res = kg_solution_residual(spec, f);
    double scale = 0.0;
    for (const auto& mode : spec.modes) {
      const double w = mode.omega;
      scale = std::max(scale, w * w * (w * dt) * (w * dt) / 6.0);
    }
    const double tol = scale * f.values.cwiseAbs().maxCoeff() + 1e-9;
    if (res > tol)
      throw NotASolution(std::string("symplectic_current_flux: ") + name +
                         " residual " + std::to_string(res) + " exceeds stencil tolerance " +
                         std::to_string(tol));
  };
  check_solution(J1, "J1");
  check_solution(J2, "J2");

  const int t = tau_index;
  double flux = 0.0;
  for (int j = 0; j < spec.sites(); ++j) {
    const double d1 = (J1.values(t + 1, j) - J1.values(t - 1, j)) / (2.0 * dt);
    const double d2 = (J2.values(t + 1, j) - J2.values(t - 1, j)) / (2.0 * dt);
    flux += J2.values(t, j) * d1 - J1.values(t, j) * d2;
  }
  return flux * spec.cell_volume();
}

}  // namespace peierls
