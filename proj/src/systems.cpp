#include "nonholo/systems.hpp"

#include <cmath>

#include "nonholo/sampling.hpp"

namespace nonholo {

namespace {

double get_param(const std::map<std::string, double>& params, const SystemDescriptor& desc,
                 const std::string& name) {
  if (auto it = params.find(name); it != params.end()) return it->second;
  for (const ParamSpec& p : desc.parameters)
    if (p.name == name) return p.value;
  throw InputError("system '" + desc.name + "': unknown parameter '" + name + "'");
}

/// alpha + beta * sin(w.x + phase), with analytic partials.
SmoothScalar random_trig_scalar(Rng& rng, int n, double scale) {
  const double alpha = scale * rng.uniform(-1.0, 1.0);
  const double beta = scale * rng.uniform(-1.0, 1.0);
  const double phase = rng.uniform(0.0, 2.0 * M_PI);
  const Vec w = rng.uniform_vec(n, -1.0, 1.0);
  return make_scalar_map(
      n, [alpha, beta, phase, w](const Vec& x) { return alpha + beta * std::sin(w.dot(x) + phase); },
      [beta, phase, w](const Vec& x, int i) { return beta * std::cos(w.dot(x) + phase) * w[i]; });
}

struct TrigField {
  double alpha = 0.0, beta = 0.0, phase = 0.0;
  Vec w;
  double value(const Vec& x) const { return alpha + beta * std::sin(w.dot(x) + phase); }
  double deriv(const Vec& x, int i) const { return beta * std::cos(w.dot(x) + phase) * w[i]; }
};

TrigField random_trig(Rng& rng, int n, double scale) {
  TrigField f;
  f.alpha = scale * rng.uniform(-1.0, 1.0);
  f.beta = scale * rng.uniform(-1.0, 1.0);
  f.phase = rng.uniform(0.0, 2.0 * M_PI);
  f.w = rng.uniform_vec(n, -1.0, 1.0);
  return f;
}

}  // namespace

System strip_analytic_partials(const System& s) {
  System out = s;
  out.name = s.name + "_fd";
  out.ambient.rho = s.ambient.rho.without_partial();
  out.ambient.sigma = s.ambient.sigma.without_partial();
  out.ambient.structure = s.ambient.structure.without_partial();
  out.lagrangian.metric = s.lagrangian.metric.without_partial();
  out.lagrangian.potential = s.lagrangian.potential.without_partial();
  out.constraint.basis = s.constraint.basis.without_partial();
  return out;
}

System chaplygin_sleigh(double m, double J, double a, double b) {
  if (!(m > 0.0) || !(J > 0.0))
    throw InputError("chaplygin_sleigh: need m > 0 and J > 0 (got m = " + std::to_string(m) +
                     ", J = " + std::to_string(J) + ")");
  // Planar-motion algebra on (E1, E2, E3) = (forward, sideways, rotation):
  // [E3, E1] = E2, [E2, E3] = E1, [E1, E2] = 0.
  Tensor3 c(3, 3, 3);
  c(1, 2, 0) = 1.0;
  c(1, 0, 2) = -1.0;
  c(0, 1, 2) = 1.0;
  c(0, 2, 1) = -1.0;
  Algebroid ambient = make_algebroid(0, 3, constant_matrix(0, Mat::Zero(0, 3)),
                                     constant_matrix(0, Mat::Zero(0, 3)), constant_tensor(0, c),
                                     true);
  // Body-frame mass matrix. The center of mass moves with
  // v_cm = (v1 - omega*b, v2 + omega*a), which fixes the signs of the
  // velocity-rotation couplings; J + m(a^2 + b^2) is the inertia about the
  // contact point.
  Mat g(3, 3);
  g << m, 0.0, -b * m,
       0.0, m, a * m,
       -b * m, a * m, J + m * (a * a + b * b);
  MechanicalLagrangian lag =
      make_mechanical_lagrangian(constant_matrix(0, g), constant_scalar(0, 0.0), 3);
  // No sideways slip: D = {v2 = 0}, spanned by the rotation and the forward
  // translation (in that order).
  Mat basis(3, 2);
  basis << 0.0, 1.0,
           0.0, 0.0,
           1.0, 0.0;
  System sys;
  sys.name = "chaplygin_sleigh";
  sys.ambient = std::move(ambient);
  sys.lagrangian = std::move(lag);
  sys.constraint = make_subbundle(sys.ambient, constant_matrix(0, basis));
  sys.default_initial = State{Vec(0), (Vec(2) << 1.0, 1.0).finished(), 0.0};
  return sys;
}

double snakeboard_inertia_for(double m, double J0, double J1, double r) {
  return m * r * r - J0 - 2.0 * J1;
}

System snakeboard(double m, double J, double J0, double J1, double r) {
  if (!(m > 0.0) || !(J > 0.0) || !(J0 > 0.0) || !(J1 > 0.0) || !(r > 0.0))
    throw InputError("snakeboard: all parameters must be positive");
  const double mr2 = m * r * r;
  const double defect = J + J0 + 2.0 * J1 - mr2;
  if (std::abs(defect) > 1e-12 * std::max(1.0, mr2))
    throw InputError("snakeboard: parameter relation violated: J + J0 + 2*J1 = " +
                     std::to_string(J + J0 + 2.0 * J1) + " != m*r^2 = " + std::to_string(mr2) +
                     " (use snakeboard_inertia_for)");

  const int n = 5;  // coordinates (x, y, theta, psi, phi)
  Algebroid ambient =
      make_algebroid(n, n, constant_matrix(n, Mat::Identity(n, n)),
                     constant_matrix(n, Mat::Identity(n, n)), constant_tensor(n, Tensor3(n, n, n)),
                     true);
  Mat g = Mat::Zero(n, n);
  g(0, 0) = m;
  g(1, 1) = m;
  g(2, 2) = mr2;
  g(2, 3) = J0;
  g(3, 2) = J0;
  g(3, 3) = J0;
  g(4, 4) = 2.0 * J1;
  MechanicalLagrangian lag =
      make_mechanical_lagrangian(constant_matrix(n, g), constant_scalar(n, 0.0), n);

  // Wheels may not slide sideways; admissible motions are spanned by the
  // rotor angle, the wheel steering angle and one coupled translation-turn
  // direction whose coefficients depend on (theta, phi).
  auto basis_value = [n, r](const Vec& x) {
    const double theta = x[2], phi = x[4];
    const double cph = std::cos(phi);
    Mat b = Mat::Zero(n, 3);
    b(3, 0) = 1.0;  // d/dpsi
    b(4, 1) = 1.0;  // d/dphi
    b(0, 2) = -2.0 * r * cph * cph * std::cos(theta);
    b(1, 2) = -2.0 * r * cph * cph * std::sin(theta);
    b(2, 2) = std::sin(2.0 * phi);
    return b;
  };
  auto basis_partial = [n, r](const Vec& x, int i) {
    const double theta = x[2], phi = x[4];
    const double cph = std::cos(phi);
    Mat db = Mat::Zero(n, 3);
    if (i == 2) {
      db(0, 2) = 2.0 * r * cph * cph * std::sin(theta);
      db(1, 2) = -2.0 * r * cph * cph * std::cos(theta);
    } else if (i == 4) {
      db(0, 2) = 2.0 * r * std::sin(2.0 * phi) * std::cos(theta);
      db(1, 2) = 2.0 * r * std::sin(2.0 * phi) * std::sin(theta);
      db(2, 2) = 2.0 * std::cos(2.0 * phi);
    }
    return db;
  };
  System sys;
  sys.name = "snakeboard";
  sys.ambient = std::move(ambient);
  sys.lagrangian = std::move(lag);
  sys.constraint =
      make_subbundle(sys.ambient, make_matrix_map(n, n, 3, basis_value, basis_partial));
  Vec x0(5);
  x0 << 0.0, 0.0, 0.3, 0.0, -0.6;
  Vec y0(3);
  y0 << 0.4, 0.1, 0.5;
  sys.default_initial = State{x0, y0, 0.0};
  sys.charges.emplace_back("y2", [](const State& s) { return s.y[1]; });
  sys.charges.emplace_back("y1_plus_c_y3", [](const State& s) {
    return s.y[0] + std::sin(2.0 * s.x[4]) * s.y[2];
  });
  return sys;
}

System free_particle(int n) {
  if (n < 1) throw InputError("free_particle: need n >= 1");
  Algebroid ambient =
      make_algebroid(n, n, constant_matrix(n, Mat::Identity(n, n)),
                     constant_matrix(n, Mat::Identity(n, n)), constant_tensor(n, Tensor3(n, n, n)),
                     true);
  MechanicalLagrangian lag = make_mechanical_lagrangian(constant_matrix(n, Mat::Identity(n, n)),
                                                        constant_scalar(n, 0.0), n);
  System sys;
  sys.name = "free_particle";
  sys.ambient = std::move(ambient);
  sys.lagrangian = std::move(lag);
  sys.constraint = make_subbundle(sys.ambient, constant_matrix(n, Mat::Identity(n, n)));
  sys.default_initial = State{Vec::Zero(n), Vec::Ones(n), 0.0};
  return sys;
}

System harmonic_oscillator(int n) {
  System sys = free_particle(n);
  sys.name = "harmonic_oscillator";
  SmoothScalar v = make_scalar_map(
      n, [](const Vec& x) { return 0.5 * x.squaredNorm(); },
      [](const Vec& x, int i) { return x[i]; });
  sys.lagrangian = make_mechanical_lagrangian(sys.lagrangian.metric, std::move(v), n);
  Vec x0 = Vec::Zero(n);
  x0[0] = 1.0;
  sys.default_initial = State{x0, Vec::Zero(n), 0.0};
  if (n == 2)
    sys.charges.emplace_back("angular_momentum",
                             [](const State& s) { return s.x[0] * s.y[1] - s.x[1] * s.y[0]; });
  return sys;
}

System random_quasi_lie(int dim, int rank_d, uint64_t seed) {
  if (dim < 2 || dim > 12) throw InputError("random_quasi_lie: dim out of range [2, 12]");
  if (rank_d < 1 || rank_d >= dim) throw InputError("random_quasi_lie: need 1 <= rank_d < dim");
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + 0x1234567ULL);
  const int n = static_cast<int>(seed % 4);
  const int m = dim;
  const int k = rank_d;

  // anchors (sigma = rho) and skew structure functions, all trig fields
  std::vector<TrigField> rho_f;
  for (int i = 0; i < n * m; ++i) rho_f.push_back(random_trig(rng, n, 0.5));
  auto rho_value = [n, m, rho_f](const Vec& x) {
    Mat r(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) r(i, j) = rho_f[static_cast<size_t>(i) * m + j].value(x);
    return r;
  };
  auto rho_partial = [n, m, rho_f](const Vec& x, int d) {
    Mat r(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) r(i, j) = rho_f[static_cast<size_t>(i) * m + j].deriv(x, d);
    return r;
  };
  SmoothMap rho = make_matrix_map(n, n, m, rho_value, rho_partial);

  std::vector<TrigField> c_f;  // entries for a < b, all c
  for (int t = 0; t < m; ++t)
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) c_f.push_back(random_trig(rng, n, 0.7));
  auto c_index = [m](int t, int a, int b) {
    // position of (t, a, b), a < b, in the packed upper-triangular list
    const int per_t = m * (m - 1) / 2;
    const int offset = a * m - a * (a + 1) / 2 + (b - a - 1);
    return t * per_t + offset;
  };
  auto c_value = [m, c_f, c_index](const Vec& x) {
    Tensor3 c(m, m, m);
    for (int t = 0; t < m; ++t)
      for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
          const double v = c_f[c_index(t, a, b)].value(x);
          c(t, a, b) = v;
          c(t, b, a) = -v;
        }
    return c;
  };
  auto c_partial = [m, c_f, c_index](const Vec& x, int d) {
    Tensor3 c(m, m, m);
    for (int t = 0; t < m; ++t)
      for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
          const double v = c_f[c_index(t, a, b)].deriv(x, d);
          c(t, a, b) = v;
          c(t, b, a) = -v;
        }
    return c;
  };
  SmoothTensor structure = make_tensor_map(n, m, m, m, c_value, c_partial);
  Algebroid ambient = make_algebroid(n, m, rho, rho, std::move(structure), true);

  // SPD metric: constant core plus a bounded smooth symmetric perturbation
  Mat a0(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a0(i, j) = rng.uniform(-1.0, 1.0);
  Mat core = a0.transpose() * a0 + Mat::Identity(m, m);
  Mat pert(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) pert(i, j) = pert(j, i) = rng.uniform(-1.0, 1.0);
  pert *= 0.2 / std::max(1.0, pert.cwiseAbs().maxCoeff() * m);
  const TrigField g_mod = random_trig(rng, n, 1.0);
  SmoothMap metric = make_matrix_map(
      n, m, m, [core, pert, g_mod](const Vec& x) { return Mat(core + g_mod.value(x) * pert); },
      [pert, g_mod](const Vec& x, int d) { return Mat(g_mod.deriv(x, d) * pert); });

  SmoothScalar potential = random_trig_scalar(rng, n, 1.0);

  // full-rank constraint basis: orthonormal core plus a small perturbation
  Mat b0(m, k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) b0(i, j) = rng.uniform(-1.0, 1.0);
  Eigen::HouseholderQR<Mat> qr(b0);
  Mat q = qr.householderQ() * Mat::Identity(m, k);
  Mat b1(m, k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) b1(i, j) = rng.uniform(-1.0, 1.0);
  b1 *= 0.15 / std::max(1.0, b1.cwiseAbs().maxCoeff() * std::sqrt(double(m)));
  const TrigField b_mod = random_trig(rng, n, 1.0);
  SmoothMap basis = make_matrix_map(
      n, m, k, [q, b1, b_mod](const Vec& x) { return Mat(q + b_mod.value(x) * b1); },
      [b1, b_mod](const Vec& x, int d) { return Mat(b_mod.deriv(x, d) * b1); });

  System sys;
  sys.name = "random_quasi_lie";
  sys.ambient = std::move(ambient);
  sys.lagrangian = make_mechanical_lagrangian(std::move(metric), std::move(potential), m);
  sys.constraint = make_subbundle(sys.ambient, std::move(basis));
  sys.default_initial = State{Vec::Zero(n), Vec::Ones(k) * 0.5, 0.0};
  return sys;
}

const std::vector<SystemDescriptor>& registry() {
  static const std::vector<SystemDescriptor> reg = [] {
    std::vector<SystemDescriptor> r;
    {
      SystemDescriptor d;
      d.name = "chaplygin_sleigh";
      d.summary = "knife-edge sled on the plane (rank-3 algebra, 2d constraint)";
      d.parameters = {{"m", 1.0, 1e-9, 1e9, "mass"},
                      {"J", 1.0, 1e-9, 1e9, "inertia about the center of mass"},
                      {"a", 1.0, -1e9, 1e9, "center of mass offset along the edge"},
                      {"b", 0.0, -1e9, 1e9, "center of mass offset across the edge"}};
      d.build = [d](const std::map<std::string, double>& p) {
        return chaplygin_sleigh(get_param(p, d, "m"), get_param(p, d, "J"), get_param(p, d, "a"),
                                get_param(p, d, "b"));
      };
      r.push_back(std::move(d));
    }
    {
      SystemDescriptor d;
      d.name = "snakeboard";
      d.summary = "board with rotor and steerable wheel axles on SE(2) x T^2";
      d.parameters = {{"m", 1.0, 1e-9, 1e9, "total mass"},
                      {"J", 0.4, 1e-9, 1e9, "board inertia (must satisfy J+J0+2*J1 = m*r^2)"},
                      {"J0", 0.4, 1e-9, 1e9, "rotor inertia"},
                      {"J1", 0.1, 1e-9, 1e9, "wheel axle inertia"},
                      {"r", 1.0, 1e-9, 1e9, "half distance between the axles"}};
      d.build = [d](const std::map<std::string, double>& p) {
        return snakeboard(get_param(p, d, "m"), get_param(p, d, "J"), get_param(p, d, "J0"),
                          get_param(p, d, "J1"), get_param(p, d, "r"));
      };
      r.push_back(std::move(d));
    }
    {
      SystemDescriptor d;
      d.name = "free_particle";
      d.summary = "flat unconstrained system (identity anchors, zero bracket)";
      d.parameters = {{"n", 2.0, 1.0, 12.0, "dimension"}};
      d.build = [d](const std::map<std::string, double>& p) {
        return free_particle(static_cast<int>(get_param(p, d, "n")));
      };
      r.push_back(std::move(d));
    }
    {
      SystemDescriptor d;
      d.name = "harmonic_oscillator";
      d.summary = "free particle with the quadratic potential |x|^2/2";
      d.parameters = {{"n", 2.0, 1.0, 12.0, "dimension"}};
      d.build = [d](const std::map<std::string, double>& p) {
        return harmonic_oscillator(static_cast<int>(get_param(p, d, "n")));
      };
      r.push_back(std::move(d));
    }
    {
      SystemDescriptor d;
      d.name = "random_quasi_lie";
      d.summary = "seeded random quasi-Lie system for property tests";
      d.parameters = {{"dim", 5.0, 2.0, 12.0, "ambient rank"},
                      {"rank_d", 2.0, 1.0, 11.0, "constraint rank"},
                      {"seed", 1.0, 0.0, 1e18, "random seed"}};
      d.build = [d](const std::map<std::string, double>& p) {
        return random_quasi_lie(static_cast<int>(get_param(p, d, "dim")),
                                static_cast<int>(get_param(p, d, "rank_d")),
                                static_cast<uint64_t>(get_param(p, d, "seed")));
      };
      r.push_back(std::move(d));
    }
    return r;
  }();
  return reg;
}

System build_system(const std::string& name, const std::map<std::string, double>& overrides) {
  for (const SystemDescriptor& d : registry())
    if (d.name == name) {
      for (const auto& [key, value] : overrides) {
        (void)value;
        bool known = false;
        for (const ParamSpec& p : d.parameters) known = known || p.name == key;
        if (!known)
          throw InputError("system '" + name + "': unknown parameter '" + key + "'");
      }
      return d.build(overrides);
    }
  throw InputError("unknown system '" + name + "'");
}

}  // namespace nonholo
