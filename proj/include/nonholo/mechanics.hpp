#pragma once

#include "nonholo/algebroid.hpp"

namespace nonholo {

/// Kinetic-minus-potential Lagrangian L(x, y) = y^T G(x) y / 2 - V(x).
/// G must evaluate symmetric and positive definite everywhere it is used.
struct MechanicalLagrangian {
  SmoothMap metric;       // rank x rank
  SmoothScalar potential; // real-valued on the base
  int rank = 0;
};

MechanicalLagrangian make_mechanical_lagrangian(SmoothMap metric, SmoothScalar potential,
                                                int rank);

/// A point of the total space with a time stamp.
struct State {
  Vec x;
  Vec y;
  double t = 0.0;
};

/// Image point of the phase-dynamics parametrization: base point, momenta
/// xi_a = dL/dy^a, base velocity and momentum rate.
struct PhasePoint {
  Vec x;
  Vec xi;
  Vec xdot;
  Vec xidot;
};

using VectorField = std::function<std::pair<Vec, Vec>(const State&)>;

/// G(x) with the symmetry invariant enforced (1e-12 relative).
Mat metric_at(const MechanicalLagrangian& l, const Vec& x);

double lagrangian_value(const MechanicalLagrangian& l, const Vec& x, const Vec& y);

/// dL/dx_i = y^T (d_i G) y / 2 - d_i V, for all i.
Vec lagrangian_dx(const MechanicalLagrangian& l, const Vec& x, const Vec& y);

/// L as a function on the total space, with analytic partials.
StateFn lagrangian_state_fn(const MechanicalLagrangian& l);

/// Legendre map: xi = G(x) y.
Vec legendre(const MechanicalLagrangian& l, const State& s);

/// (x, dL/dy, rho y, C^c_{ab} y^a xi_c + sigma^i_b dL/dx_i).
PhasePoint tulczyjew_differential(const Algebroid& a, const MechanicalLagrangian& l,
                                  const State& s);

/// Explicit Euler-Lagrange field: xdot = rho y and the SPD solve
/// G ydot = C^c_{ab} y^a (G y)_c + sigma^T dL/dx - (sum_i xdot^i d_i G) y.
std::pair<Vec, Vec> el_vector_field(const Algebroid& a, const MechanicalLagrangian& l,
                                    const State& s);

/// E = y^T G y / 2 + V.
double energy(const MechanicalLagrangian& l, const State& s);

/// Directional derivative of the energy along the Euler-Lagrange field.
double energy_rate(const Algebroid& a, const MechanicalLagrangian& l, const State& s);

/// Closure over el_vector_field for the integrator.
VectorField el_field(const Algebroid& a, const MechanicalLagrangian& l);

}  // namespace nonholo
