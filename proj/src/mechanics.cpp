#include "nonholo/mechanics.hpp"

#include <cmath>

namespace nonholo {

namespace {

void check_state(const MechanicalLagrangian& l, const State& s, const char* who) {
  if (s.y.size() != l.rank)
    throw DimensionError(std::string(who) + ": fiber vector has length " +
                         std::to_string(s.y.size()) + ", rank is " + std::to_string(l.rank));
  if (l.metric.domain_dim() != s.x.size())
    throw DimensionError(std::string(who) + ": base point has length " +
                         std::to_string(s.x.size()) + ", base dim is " +
                         std::to_string(l.metric.domain_dim()));
  if (!all_finite(s.x) || !all_finite(s.y) || !std::isfinite(s.t))
    throw InputError(std::string(who) + ": non-finite state");
}

}  // namespace

MechanicalLagrangian make_mechanical_lagrangian(SmoothMap metric, SmoothScalar potential,
                                                int rank) {
  if (rank <= 0) throw InputError("make_mechanical_lagrangian: rank must be positive");
  if (metric.domain_dim() != potential.domain_dim())
    throw DimensionError("make_mechanical_lagrangian: metric and potential domains differ");
  MechanicalLagrangian l;
  l.metric = std::move(metric);
  l.potential = std::move(potential);
  l.rank = rank;
  return l;
}

Mat metric_at(const MechanicalLagrangian& l, const Vec& x) {
  Mat g = l.metric(x);
  if (g.rows() != l.rank || g.cols() != l.rank)
    throw DimensionError("metric: value is " + shape_string(g) + ", expected " +
                         std::to_string(l.rank) + "x" + std::to_string(l.rank));
  require_symmetric(g, 1e-12, "metric");
  return g;
}

double lagrangian_value(const MechanicalLagrangian& l, const Vec& x, const Vec& y) {
  return 0.5 * y.dot(metric_at(l, x) * y) - l.potential(x);
}

Vec lagrangian_dx(const MechanicalLagrangian& l, const Vec& x, const Vec& y) {
  const int n = static_cast<int>(x.size());
  Vec out(n);
  for (int i = 0; i < n; ++i)
    out[i] = 0.5 * y.dot(l.metric.partial(x, i) * y) - l.potential.partial(x, i);
  return out;
}

StateFn lagrangian_state_fn(const MechanicalLagrangian& l) {
  StateFn f;
  f.fd_step = default_fd_step();
  f.value = [l](const Vec& x, const Vec& y) { return lagrangian_value(l, x, y); };
  f.dx = [l](const Vec& x, const Vec& y, int i) {
    return 0.5 * y.dot(l.metric.partial(x, i) * y) - l.potential.partial(x, i);
  };
  f.dy = [l](const Vec& x, const Vec& y, int a) { return (metric_at(l, x) * y)(a); };
  return f;
}

Vec legendre(const MechanicalLagrangian& l, const State& s) {
  check_state(l, s, "legendre");
  const Mat g = metric_at(l, s.x);
  spd_cholesky(g, "legendre metric");  // non-SPD metrics make the map non-invertible
  return g * s.y;
}

PhasePoint tulczyjew_differential(const Algebroid& a, const MechanicalLagrangian& l,
                                  const State& s) {
  check_state(l, s, "tulczyjew_differential");
  if (a.rank != l.rank) throw DimensionError("tulczyjew_differential: rank mismatch");
  PhasePoint p;
  p.x = s.x;
  const Mat g = metric_at(l, s.x);
  spd_cholesky(g, "tulczyjew metric");
  p.xi = g * s.y;
  p.xdot = Mat(a.rho(s.x)) * s.y;
  p.xidot = a.structure(s.x).force_contraction(s.y, p.xi);
  if (a.base_dim > 0)
    p.xidot += Mat(a.sigma(s.x)).transpose() * lagrangian_dx(l, s.x, s.y);
  return p;
}

std::pair<Vec, Vec> el_vector_field(const Algebroid& a, const MechanicalLagrangian& l,
                                    const State& s) {
  check_state(l, s, "el_vector_field");
  if (a.rank != l.rank) throw DimensionError("el_vector_field: rank mismatch");
  const Mat g = metric_at(l, s.x);
  const Vec xi = g * s.y;
  Vec rhs = a.structure(s.x).force_contraction(s.y, xi);
  Vec xdot = Mat(a.rho(s.x)) * s.y;
  if (a.base_dim > 0) {
    rhs += Mat(a.sigma(s.x)).transpose() * lagrangian_dx(l, s.x, s.y);
    for (int i = 0; i < a.base_dim; ++i)
      if (xdot[i] != 0.0) rhs -= xdot[i] * (l.metric.partial(s.x, i) * s.y);
  }
  Vec ydot = spd_solve(g, rhs, "el_vector_field metric");
  return {std::move(xdot), std::move(ydot)};
}

double energy(const MechanicalLagrangian& l, const State& s) {
  check_state(l, s, "energy");
  return 0.5 * s.y.dot(metric_at(l, s.x) * s.y) + l.potential(s.x);
}

double energy_rate(const Algebroid& a, const MechanicalLagrangian& l, const State& s) {
  const auto [xdot, ydot] = el_vector_field(a, l, s);
  const Mat g = metric_at(l, s.x);
  double r = s.y.dot(g * ydot);
  for (int i = 0; i < a.base_dim; ++i) {
    if (xdot[i] == 0.0) continue;
    r += 0.5 * xdot[i] * s.y.dot(l.metric.partial(s.x, i) * s.y);
    r += xdot[i] * l.potential.partial(s.x, i);
  }
  return r;
}

VectorField el_field(const Algebroid& a, const MechanicalLagrangian& l) {
  return [a, l](const State& s) { return el_vector_field(a, l, s); };
}

}  // namespace nonholo
