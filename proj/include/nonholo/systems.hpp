#pragma once

#include <map>
#include <string>

#include "nonholo/nonholonomic.hpp"

namespace nonholo {

/// A ready-to-run constrained mechanical system: ambient algebroid, metric
/// Lagrangian and constraint subbundle, plus known first integrals on the
/// reduced states (used as trajectory observers).
struct System {
  std::string name;
  Algebroid ambient;
  MechanicalLagrangian lagrangian;
  Subbundle constraint;
  State default_initial;  // reduced-state coordinates (x, y^a)
  std::vector<std::pair<std::string, std::function<double(const State&)>>> charges;
};

/// Copy with every analytic partial removed, forcing FD everywhere.
System strip_analytic_partials(const System& s);

struct ParamSpec {
  std::string name;
  double value = 0.0;  // default
  double lo = 0.0;
  double hi = 0.0;
  std::string doc;
};

struct SystemDescriptor {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> parameters;
  std::function<System(const std::map<std::string, double>&)> build;
};

const std::vector<SystemDescriptor>& registry();
System build_system(const std::string& name, const std::map<std::string, double>& overrides = {});

/// Rigid body sliding on a plane with a knife-edge contact: configuration
/// reduces to the planar-motion algebra (rank 3, base a point). Mass m,
/// inertia J about the center of mass, center of mass at (a, b) in the body
/// frame with the first axis along the edge. Constraint: no sideways slip,
/// D = {v2 = 0} with basis {E3, E1}.
System chaplygin_sleigh(double m, double J, double a, double b);

/// Board with steerable wheel axles and a rotor: configuration
/// (x, y, theta, psi, phi) in R^5 (angles unwrapped), tangent-bundle ambient.
/// Parameters must satisfy J + J0 + 2 J1 = m r^2; see snakeboard_inertia_for.
System snakeboard(double m, double J, double J0, double J1, double r);

/// The board inertia J that satisfies the snakeboard parameter relation.
double snakeboard_inertia_for(double m, double J0, double J1, double r);

/// rho = sigma = I, C = 0, G = I, V = 0, unconstrained.
System free_particle(int n);

/// free_particle with V = |x|^2 / 2; for n = 2 registers the angular momentum
/// charge x1 y2 - x2 y1.
System harmonic_oscillator(int n);

/// Seeded random quasi-Lie system for property tests. Construction:
///  - base_dim = seed % 4; all coefficients are trig polynomials
///    alpha + beta sin(w.x + phase) with analytic partials;
///  - structure functions skew in the lower indices, sigma = rho;
///  - G(x) = A^T A + 1/2 I + scaled symmetric perturbation (SPD everywhere);
///  - B(x) = orthonormal columns + small smooth perturbation (full rank).
System random_quasi_lie(int dim, int rank_d, uint64_t seed);

}  // namespace nonholo
