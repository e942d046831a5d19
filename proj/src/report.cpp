#include "peierls/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "peierls/bracket_engine.hpp"
#include "peierls/kg_field.hpp"
#include "peierls/models.hpp"
#include "peierls/qm_model.hpp"

extern char** environ;

namespace peierls {

namespace {

using json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::set<std::string> kModels = {"free", "harmonic", "sphere", "qm", "kg"};
const std::set<std::string> kOutputs = {"summary", "kernel", "brackets", "kg_commutator"};

const std::map<std::string, std::set<std::string>>& model_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"free", {"n", "T", "N", "pairs", "x_minus", "x_plus", "functional_a", "functional_b"}},
      {"harmonic", {"T", "N", "pairs", "x_minus", "x_plus", "functional_a", "functional_b"}},
      {"sphere", {"T", "N", "pairs", "theta_minus", "phi_minus", "theta_plus", "phi_plus",
                  "functional_a", "functional_b"}},
      {"qm", {"d", "T", "N", "pairs", "hamiltonian_file"}},
      {"kg", {"d", "M", "m", "L", "dx_max", "dt_max", "dt_steps"}},
  };
  return keys;
}

double parse_real(const std::string& key, const ExperimentConfig::Value& v) {
  char* end = nullptr;
  const double x = std::strtod(v.text.c_str(), &end);
  if (end == v.text.c_str() || *end != '\0' || !std::isfinite(x))
    throw ConfigError("config: key '" + key + "' (line " + std::to_string(v.line) +
                      "): invalid real value '" + v.text + "'");
  return x;
}

int parse_int(const std::string& key, const ExperimentConfig::Value& v) {
  char* end = nullptr;
  const long x = std::strtol(v.text.c_str(), &end, 10);
  if (end == v.text.c_str() || *end != '\0')
    throw ConfigError("config: key '" + key + "' (line " + std::to_string(v.line) +
                      "): invalid integer value '" + v.text + "'");
  return static_cast<int>(x);
}

CheckLine make_check(const std::string& name, double tol, double measured) {
  return {name, tol, measured, measured <= tol};
}

// Functional definitions: "delta:<mu>:<s1>" or "bump:<mu>:<center>:<width>"
// (a C^2 window times x^mu).
PathFunctional parse_functional(const std::string& text, int n, double T,
                                const std::string& label) {
  const std::vector<std::string> parts = [&] {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) out.push_back(trim(item));
    return out;
  }();
  auto bad = [&](const std::string& why) {
    return ConfigError("config: functional '" + text + "': " + why);
  };
  if (parts.empty()) throw bad("empty definition");
  const auto number = [&](size_t i) {
    char* end = nullptr;
    const double v = std::strtod(parts[i].c_str(), &end);
    if (end == parts[i].c_str() || *end != '\0') throw bad("bad number '" + parts[i] + "'");
    return v;
  };
  if (parts[0] == "delta") {
    if (parts.size() != 3) throw bad("expected delta:<mu>:<s1>");
    const int mu = static_cast<int>(number(1));
    const double s1 = number(2);
    if (mu < 0 || mu >= n) throw bad("component out of range");
    if (std::abs(s1) >= T) throw bad("point outside (-T, T)");
    return PathFunctional::delta(mu, s1, label);
  }
  if (parts[0] == "bump") {
    if (parts.size() != 4) throw bad("expected bump:<mu>:<center>:<width>");
    const int mu = static_cast<int>(number(1));
    const double center = number(2), width = number(3);
    if (mu < 0 || mu >= n) throw bad("component out of range");
    if (!(width > 0.0) || center - width <= -T || center + width >= T)
      throw bad("window must sit strictly inside (-T, T)");
    auto f = [center, width](double sv) {
      const double u = (sv - center) / width;
      if (std::abs(u) >= 1.0) return 0.0;
      const double t = 1.0 - u * u;
      return t * t * t;
    };
    return PathFunctional::from_density(
        label, center - width, center + width,
        [f, mu](double sv, const VectorXd& x, const VectorXd&) { return f(sv) * x(mu); },
        [f, mu, n](double sv, const VectorXd&, const VectorXd&) {
          return (f(sv) * VectorXd::Unit(n, mu)).eval();
        },
        [n](double, const VectorXd&, const VectorXd&) { return VectorXd::Zero(n).eval(); });
  }
  throw bad("unknown kind '" + parts[0] + "' (expected delta or bump)");
}

std::ofstream open_artifact(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out.is_open()) throw ConfigError("cannot write artifact: " + path.string());
  return out;
}

bool wants(const ExperimentConfig& config, const std::string& name) {
  return std::find(config.outputs.begin(), config.outputs.end(), name) !=
         config.outputs.end();
}

// ---------------------------------------------------------------------------
// particle models (free / harmonic / sphere)
// ---------------------------------------------------------------------------

void run_particle(const ExperimentConfig& config, const std::filesystem::path& outdir,
                  ReportBundle& bundle) {
  const bool is_free = config.model == "free";
  const bool is_harmonic = config.model == "harmonic";
  const bool is_sphere = config.model == "sphere";

  const int n = is_free ? config.get_int("n", 1) : (is_sphere ? 2 : 1);
  const double T = config.get_real("T", is_sphere ? 1.2 : 1.0);
  const int N = config.get_int("N", is_harmonic ? 3001 : (is_sphere ? 1001 : 201));
  const int pairs = config.get_int("pairs", 10);

  ConfigurationModel model =
      is_free ? free_model(n) : (is_harmonic ? harmonic_model() : sphere_model());

  BoundaryData bc;
  bc.T = T;
  bc.N = N;
  if (is_sphere) {
    bc.x_minus.resize(2);
    bc.x_plus.resize(2);
    bc.x_minus << config.get_real("theta_minus", M_PI / 2), config.get_real("phi_minus", 0.0);
    bc.x_plus << config.get_real("theta_plus", M_PI / 2), config.get_real("phi_plus", 1.5);
  } else {
    bc.x_minus = VectorXd::Constant(n, config.get_real("x_minus", 0.0));
    bc.x_plus = VectorXd::Constant(n, config.get_real("x_plus", 1.0));
  }

  const Trajectory traj = solve_bvp(model, bc);
  bundle.checks.push_back(
      make_check("el_residual_interior", 1e-4, interior_max_abs(el_residual(model, traj))));

  BracketContext ctx = make_bracket_context(model, traj);

  // Kernel checks and optional export.
  const bool want_kernel = wants(config, "kernel");
  if (is_free || is_harmonic || want_kernel) {
    const CommutatorKernel& kernel = context_kernel(ctx);
    bundle.checks.push_back(make_check(
        "kernel_antisymmetry", 1e-12,
        (kernel.G + kernel.G.transpose()).cwiseAbs().maxCoeff()));
    if (is_free) {
      double dev = 0.0;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          for (int mu = 0; mu < n; ++mu)
            for (int nu = 0; nu < n; ++nu) {
              const double expected =
                  (mu == nu) ? traj.grid.s(i) - traj.grid.s(j) : 0.0;
              dev = std::max(dev, std::abs(kernel.value(i, mu, j, nu) - expected));
            }
      bundle.checks.push_back(make_check("kernel_flat_deviation", 1e-8, dev));
    }
    if (is_harmonic) {
      double dev = 0.0;
      for (int i = 0; i < N; i += 7)
        for (int j = 0; j < N; j += 7)
          dev = std::max(dev, std::abs(kernel.value(i, 0, j, 0) -
                                       std::sin(traj.grid.s(i) - traj.grid.s(j))));
      bundle.checks.push_back(make_check("kernel_oscillator_deviation", 1e-6, dev));
    }
    if (want_kernel) {
      const auto path = outdir / "kernel.csv";
      std::ofstream out = open_artifact(path);
      out << "s,s_prime,mu,nu,value\n";
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          for (int mu = 0; mu < n; ++mu)
            for (int nu = 0; nu < n; ++nu)
              out << format_double(traj.grid.s(i)) << ',' << format_double(traj.grid.s(j))
                  << ',' << mu << ',' << nu << ','
                  << format_double(kernel.value(i, mu, j, nu)) << '\n';
      bundle.artifacts.emplace_back("kernel", path.string());
    }
  }

  // Seeded functional pairs: route agreement, conservation, antisymmetry.
  std::uint64_t state = static_cast<std::uint64_t>(config.seed) ^ 0x5bf03635u;
  const double route_tol = is_sphere ? 1e-3 : 1e-6;
  const double cons_tol = is_sphere ? 1e-3 : 1e-6;
  const double anti_tol = is_sphere ? 1e-8 : 1e-10;

  double route_omega = 0.0, route_bivector = 0.0, cons = 0.0, anti = 0.0;
  std::vector<std::array<double, 3>> table;
  std::vector<std::pair<std::string, std::string>> labels;
  for (int p = 0; p < pairs; ++p) {
    const PathFunctional A =
        random_bump_functional(n, T, state, "A" + std::to_string(p));
    const PathFunctional B =
        random_bump_functional(n, T, state, "B" + std::to_string(p));
    const double bi = bracket_integral(ctx, A, B);
    const double bb = bracket_bivector(ctx, A, B);
    const double scale = std::max(std::abs(bi), 1e-9);

    const MatrixXd uA = response_difference(ctx, A);
    const MatrixXd uB = response_difference(ctx, B);
    Eigen::VectorXd omega_slices(N - 2);
    for (int i = 1; i + 1 < N; ++i)
      omega_slices(i - 1) = two_form(model, traj, i, uA, uB);
    const double med = omega_slices(omega_slices.size() / 2);
    cons = std::max(cons, (omega_slices.maxCoeff() - omega_slices.minCoeff()) /
                              std::max(std::abs(med), 1e-9));
    route_omega = std::max(route_omega, std::abs(bi - med) / scale);
    route_bivector = std::max(route_bivector, std::abs(bi - bb) / scale);
    anti = std::max(anti, std::abs(bi + bracket_integral(ctx, B, A)));

    table.push_back({bi, med, bb});
    labels.emplace_back(A.label, B.label);
  }
  // User-defined functional pair, when configured.
  if (config.has("functional_a") != config.has("functional_b"))
    throw ConfigError("config: functional_a and functional_b must be given together");
  if (config.has("functional_a")) {
    const PathFunctional A =
        parse_functional(config.get_string("functional_a", ""), n, T, "functional_a");
    const PathFunctional B =
        parse_functional(config.get_string("functional_b", ""), n, T, "functional_b");
    const double bi = bracket_integral(ctx, A, B);
    const double bb = bracket_bivector(ctx, A, B);
    const double bo = bracket_omega(ctx, A, B, N / 2);
    const double scale = std::max(std::abs(bi), 1e-9);
    route_omega = std::max(route_omega, std::abs(bi - bo) / scale);
    route_bivector = std::max(route_bivector, std::abs(bi - bb) / scale);
    table.push_back({bi, bo, bb});
    labels.emplace_back(A.label, B.label);
  }

  bundle.checks.push_back(make_check("route_integral_vs_omega", route_tol, route_omega));
  bundle.checks.push_back(
      make_check("route_integral_vs_bivector", route_tol, route_bivector));
  bundle.checks.push_back(make_check("conservation_spread", cons_tol, cons));
  bundle.checks.push_back(make_check("bracket_antisymmetry", anti_tol, anti));

  if (wants(config, "brackets")) {
    const auto path = outdir / "brackets.csv";
    std::ofstream out = open_artifact(path);
    out << "A,B,route,value\n";
    const char* names[3] = {"integral", "omega", "bivector"};
    for (size_t p = 0; p < table.size(); ++p)
      for (int r = 0; r < 3; ++r)
        out << labels[p].first << ',' << labels[p].second << ',' << names[r] << ','
            << format_double(table[p][r]) << '\n';
    bundle.artifacts.emplace_back("brackets", path.string());
  }
}

// ---------------------------------------------------------------------------
// qm model
// ---------------------------------------------------------------------------

MatrixXcd load_hamiltonian(const std::string& file, int d) {
  std::ifstream in(file);
  if (!in.is_open()) throw ConfigError("qm: cannot open hamiltonian_file '" + file + "'");
  MatrixXcd H(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double re, im;
      if (!(in >> re >> im))
        throw ConfigError("qm: hamiltonian_file needs " + std::to_string(2 * d * d) +
                          " numbers (re im per entry, row-major)");
      H(i, j) = std::complex<double>(re, im);
    }
  return H;
}

MatrixXcd random_hermitian(int d, std::uint64_t& state) {
  MatrixXcd A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      A(i, j) = std::complex<double>(uniform_real(state, -1, 1), uniform_real(state, -1, 1));
  return 0.5 * (A + A.adjoint().eval());
}

void run_qm(const ExperimentConfig& config, const std::filesystem::path&,
            ReportBundle& bundle) {
  const int d = config.get_int("d", 4);
  const double T = config.get_real("T", 1.0);
  const int N = config.get_int("N", 201);
  const int pairs = config.get_int("pairs", 20);
  const Grid grid(T, N);

  std::uint64_t state = static_cast<std::uint64_t>(config.seed) ^ 0x9d2c5681u;
  VectorXd q0(d), p0(d);
  for (int i = 0; i < d; ++i) {
    q0(i) = uniform_real(state, -1, 1);
    p0(i) = uniform_real(state, -1, 1);
  }

  const HilbertModel free_h = make_hilbert_model(MatrixXcd::Zero(d, d), q0, p0);
  const QmWindow w = unit_bump_window(grid, -0.5 * T, 0.5 * T);

  double formula_dev = 0.0, heis_dev = 0.0;
  for (int p = 0; p < pairs; ++p) {
    const MatrixXcd A = random_hermitian(d, state);
    const MatrixXcd B = random_hermitian(d, state);
    const double direct = free_commutator_bracket(free_h, A, B);
    const double pipeline = qm_pipeline_bracket(free_h, A, B, w, w, grid);
    formula_dev = std::max(formula_dev, std::abs(direct - pipeline));
    const double heis = heisenberg_bracket(free_h, {A, w}, {B, w}, grid);
    heis_dev = std::max(heis_dev, std::abs(direct - heis));
  }
  bundle.checks.push_back(make_check("qm_pipeline_vs_formula", 1e-8, formula_dev));
  bundle.checks.push_back(make_check("qm_heisenberg_reduction", 1e-8, heis_dev));
  bundle.checks.push_back(
      make_check("qm_canonical_bivector", 1e-8, canonical_bivector_check(free_h, grid)));

  if (config.has("hamiltonian_file")) {
    const HilbertModel evolved = make_hilbert_model(
        load_hamiltonian(config.get_string("hamiltonian_file", ""), d), q0, p0);
    bundle.checks.push_back(
        make_check("qm_unitarity_drift", 1e-10, unitarity_drift(evolved, grid)));
  }
}

// ---------------------------------------------------------------------------
// kg model
// ---------------------------------------------------------------------------

void run_kg(const ExperimentConfig& config, const std::filesystem::path& outdir,
            ReportBundle& bundle) {
  const int d = config.get_int("d", 1);
  const int M = config.get_int("M", 64);
  const double mass = config.get_real("m", 1.0);
  const double L = config.get_real("L", 2.0 * M_PI);
  const LatticeSpec spec = make_lattice(d, L, M, mass);

  std::vector<int> dsite(d, 0);
  double equal_time = 0.0, delta_dev = 0.0, anti = 0.0;
  for (int j = 0; j < std::min(M, 16); ++j) {
    dsite[0] = j;
    equal_time = std::max(equal_time, std::abs(kg_commutator(spec, dsite, 0.0)));
    const double expected = (j == 0) ? std::pow(M / L, d) : 0.0;
    delta_dev = std::max(delta_dev,
                         std::abs(kg_commutator_time_derivative(spec, dsite, 0.0) - expected));
    const double dt = 0.3;
    std::vector<int> neg = dsite;
    neg[0] = -j;
    anti = std::max(anti, std::abs(kg_commutator(spec, dsite, dt) +
                                   kg_commutator(spec, neg, -dt)));
  }
  bundle.checks.push_back(make_check("kg_equal_time_commutator", 0.0, equal_time));
  bundle.checks.push_back(make_check("kg_delta_completeness", 1e-12, delta_dev));
  bundle.checks.push_back(make_check("kg_antisymmetry", 1e-12, anti));

  // Bracket of two delta densities against the kernel (route identity).
  {
    const int steps = 9;
    Eigen::VectorXd tau(steps);
    for (int i = 0; i < steps; ++i) tau(i) = -0.4 + 0.1 * i;
    SpacetimeDensity A, B;
    A.tau = B.tau = tau;
    A.values = Eigen::MatrixXd::Zero(steps, spec.sites());
    B.values = Eigen::MatrixXd::Zero(steps, spec.sites());
    const double cell = spec.cell_volume() * 0.1;
    A.values(2, 1) = 1.0 / cell;
    B.values(6, 5) = 1.0 / cell;
    std::vector<int> dx(d, 0);
    dx[0] = 1 - 5;
    const double expected = kg_commutator(spec, dx, tau(2) - tau(6));
    bundle.checks.push_back(make_check(
        "kg_bracket_kernel_identity", 1e-12,
        std::abs(kg_peierls_bracket(spec, A, B) - expected)));
  }

  if (d == 1 && mass > 0.0) {
    // Fixed physical spacelike point (eight lattice units of space, one of
    // time at the reference resolution M = 64), mode count doubling.
    const double dxphys = 8.0 * (L / 64.0);
    const double dt = L / 64.0;
    double prev = 0.0, ratio = 0.0;
    for (int k = 0; k < 3; ++k) {
      const int Mk = 32 << k;
      const LatticeSpec sk = make_lattice(1, L, Mk, mass);
      std::vector<int> dj = {static_cast<int>(std::lround(dxphys / sk.dx()))};
      const double val = std::abs(kg_commutator(sk, dj, dt));
      if (k > 0) ratio = std::max(ratio, val / prev);
      prev = val;
    }
    bundle.checks.push_back(make_check("kg_microcausality_monotone", 1.0, ratio));
  }

  if (wants(config, "kg_commutator")) {
    const int dx_max = config.get_int("dx_max", std::min(M / 2, 32));
    const double dt_max = config.get_real("dt_max", 1.5);
    const int dt_steps = config.get_int("dt_steps", 31);
    const auto path = outdir / "kg_commutator.csv";
    std::ofstream out = open_artifact(path);
    out << "dx,dt,value\n";
    for (int j = 0; j <= dx_max; ++j)
      for (int t = 0; t < dt_steps; ++t) {
        const double dt = -dt_max + 2.0 * dt_max * t / (dt_steps - 1);
        std::vector<int> dj(d, 0);
        dj[0] = j;
        out << format_double(j * spec.dx()) << ',' << format_double(dt) << ','
            << format_double(kg_commutator(spec, dj, dt)) << '\n';
      }
    bundle.artifacts.emplace_back("kg_commutator", path.string());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// config
// ---------------------------------------------------------------------------

double ExperimentConfig::get_real(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : parse_real(key, it->second);
}

int ExperimentConfig::get_int(const std::string& key, int fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : parse_int(key, it->second);
}

std::string ExperimentConfig::get_string(const std::string& key,
                                         const std::string& fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second.text;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = lower(trim(t.substr(1, t.size() - 2)));
      if (section != "experiment" && section != "parameters")
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown section [" +
                          section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": key outside of a [section]");
    if (section == "experiment") {
      if (key == "model")
        config.model = lower(value);
      else if (key == "seed")
        config.seed = parse_int(key, {value, lineno});
      else if (key == "outputs")
        config.outputs = split_list(lower(value));
      else
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": unknown [experiment] key '" + key + "'");
    } else {
      config.params[key] = {value, lineno};
    }
  }
  return config;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.filename().string());
}

void apply_env_overrides(ExperimentConfig& config) {
  const std::string prefix = "PEIERLS_";
  for (char** env = environ; env && *env; ++env) {
    const std::string entry(*env);
    if (entry.rfind(prefix, 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    const std::string name = entry.substr(prefix.size(), eq - prefix.size());
    const std::string value = entry.substr(eq + 1);
    if (name == "EXPERIMENT_MODEL")
      config.model = lower(value);
    else if (name == "EXPERIMENT_SEED")
      config.seed = parse_int("seed", {value, 0});
    else if (name == "EXPERIMENT_OUTPUTS")
      config.outputs = split_list(lower(value));
    else if (name.rfind("PARAMETERS_", 0) == 0)
      config.params[name.substr(11)] = {value, 0};  // key case is significant
  }
}

void validate_config(const ExperimentConfig& config) {
  if (!kModels.count(config.model))
    throw ConfigError("config: unknown model '" + config.model +
                      "' (expected free|harmonic|sphere|qm|kg)");
  const auto& allowed = model_keys().at(config.model);
  for (const auto& [key, value] : config.params)
    if (!allowed.count(key))
      throw ConfigError("config: key '" + key + "' (line " + std::to_string(value.line) +
                        ") is not defined for model '" + config.model + "'");
  for (const auto& out : config.outputs)
    if (!kOutputs.count(out)) throw ConfigError("config: unknown output '" + out + "'");

  if (config.has("N")) {
    const int N = config.get_int("N", 0);
    if (N < 3 || N % 2 == 0)
      throw ConfigError("config: key 'N' (line " + std::to_string(config.params.at("N").line) +
                        "): N must be odd and >= 3, got " + std::to_string(N));
  }
  if (config.has("T") && !(config.get_real("T", 1.0) > 0.0))
    throw ConfigError("config: key 'T': must be positive");
  if (config.has("M")) {
    const int M = config.get_int("M", 0);
    if (M < 2 || M % 2 != 0)
      throw ConfigError("config: key 'M' (line " + std::to_string(config.params.at("M").line) +
                        "): M must be even and >= 2, got " + std::to_string(M));
  }
  if (config.has("d")) {
    const int d = config.get_int("d", 1);
    if (config.model == "kg" && (d < 1 || d > 3))
      throw ConfigError("config: key 'd': kg supports d in {1,2,3}");
    if (config.model == "qm" && (d < 1 || d > 64))
      throw ConfigError("config: key 'd': qm supports d in [1, 64]");
  }
}

bool ReportBundle::numerical_ok() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

ReportBundle run_experiment(const ExperimentConfig& config,
                            const std::filesystem::path& outdir) {
  validate_config(config);
  std::filesystem::create_directories(outdir);

  ReportBundle bundle;
  if (config.model == "qm")
    run_qm(config, outdir, bundle);
  else if (config.model == "kg")
    run_kg(config, outdir, bundle);
  else
    run_particle(config, outdir, bundle);

  json summary;
  summary["model"] = config.model;
  summary["seed"] = config.seed;
  json params = json::object();
  for (const auto& [key, value] : config.params) params[key] = value.text;
  summary["parameters"] = params;
  json checks = json::array();
  for (const auto& c : bundle.checks) {
    json line;
    line["name"] = c.name;
    line["tolerance"] = c.tolerance;
    line["measured"] = c.measured;
    line["pass"] = c.pass;
    checks.push_back(line);
  }
  summary["checks"] = checks;
  summary["overall_pass"] = bundle.numerical_ok();
  json arts = json::array();
  for (const auto& [name, path] : bundle.artifacts) {
    json a;
    a["name"] = name;
    a["file"] = std::filesystem::path(path).filename().string();
    arts.push_back(a);
  }
  summary["artifacts"] = arts;

  const auto path = outdir / "summary.json";
  std::ofstream out = open_artifact(path);
  out << summary.dump(2) << '\n';
  bundle.artifacts.emplace_back("summary", path.string());
  return bundle;
}

std::string list_models() {
  std::ostringstream os;
  os << "available models:\n"
     << "  free      flat kinetic particle; parameters: n (1), T (1), N (201),\n"
     << "            pairs (10), x_minus (0), x_plus (1), functional_a/_b\n"
     << "            (delta:<mu>:<s1> or bump:<mu>:<center>:<width>)\n"
     << "  harmonic  unit-frequency oscillator; parameters: T (1), N (3001),\n"
     << "            pairs (10), x_minus (0), x_plus (1), functional_a/_b\n"
     << "  sphere    unit 2-sphere kinetic model; parameters: T (1.2), N (1001),\n"
     << "            pairs (10), theta_minus (pi/2), phi_minus (0),\n"
     << "            theta_plus (pi/2), phi_plus (1.5)\n"
     << "  qm        finite-dimensional Hilbert model; parameters: d (4), T (1),\n"
     << "            N (201), pairs (20), hamiltonian_file (none)\n"
     << "  kg        lattice Klein-Gordon field; parameters: d (1), M (64), m (1),\n"
     << "            L (2*pi), dx_max, dt_max (1.5), dt_steps (31)\n"
     << "outputs: summary (always), kernel, brackets, kg_commutator\n"
     << "env overrides: PEIERLS_EXPERIMENT_<KEY>, PEIERLS_PARAMETERS_<KEY>\n";
  return os.str();
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97f4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double uniform_real(std::uint64_t& state, double lo, double hi) {
  const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

PathFunctional random_bump_functional(int n, double T, std::uint64_t& state,
                                      const std::string& label) {
  const double center = uniform_real(state, -0.45 * T, 0.45 * T);
  const double width = uniform_real(state, 0.2 * T, 0.35 * T);
  const double lo = std::max(center - width, -0.9 * T);
  const double hi = std::min(center + width, 0.9 * T);
  const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);

  VectorXd alpha(n), beta(n);
  MatrixXd Q(n, n);
  for (int i = 0; i < n; ++i) {
    alpha(i) = uniform_real(state, -1, 1);
    beta(i) = uniform_real(state, -0.5, 0.5);
    for (int j = 0; j < n; ++j) Q(i, j) = uniform_real(state, -0.3, 0.3);
  }
  Q = (0.5 * (Q + Q.transpose())).eval();

  auto bump = [c, r](double s) {
    const double u = (s - c) / r;
    if (std::abs(u) >= 1.0) return 0.0;
    const double t = 1.0 - u * u;
    return t * t * t;
  };
  auto dens = [bump, alpha, beta, Q](double s, const VectorXd& x, const VectorXd& v) {
    return bump(s) * (alpha.dot(x) + 0.5 * x.dot(Q * x) + beta.dot(v));
  };
  auto dens_dx = [bump, alpha, Q](double s, const VectorXd& x, const VectorXd&) {
    return (bump(s) * (alpha + Q * x)).eval();
  };
  auto dens_dv = [bump, beta](double s, const VectorXd&, const VectorXd&) {
    return (bump(s) * beta).eval();
  };
  return PathFunctional::from_density(label, lo, hi, dens, dens_dx, dens_dv);
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace peierls
