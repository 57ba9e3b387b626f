#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nonholo/integrator.hpp"
#include "nonholo/nonholonomic.hpp"
#include "nonholo/systems.hpp"
#include "oracles.hpp"

using namespace nonholo;

namespace {

struct ReducedSystem {
  ReducedAlgebroid red;
  MechanicalLagrangian l;
  VectorField field;
};

ReducedSystem reduce(const System& sys) {
  ReducedSystem r{
      reduce_algebroid(sys.ambient, sys.constraint,
                       orthogonal_projector(sys.lagrangian.metric, sys.constraint)),
      restricted_lagrangian(sys.lagrangian, sys.constraint), {}};
  r.field = el_field(r.red.algebroid, r.l);
  return r;
}

double endpoint_error_1d_oscillator(double h, double T) {
  const System sys = harmonic_oscillator(1);
  const State s0{Vec::Ones(1), Vec::Zero(1), 0.0};
  const Trajectory traj = integrate(el_field(sys.ambient, sys.lagrangian), s0, h, T);
  const State& end = traj.states.back();
  const double xe = std::cos(end.t), ye = -std::sin(end.t);
  return std::max(std::abs(end.x[0] - xe), std::abs(end.y[0] - ye));
}

}  // namespace

TEST_CASE("single step") {
  SUBCASE("zero field leaves the state unchanged") {
    const VectorField vf = [](const State& s) {
      return std::make_pair(Vec(Vec::Zero(s.x.size())), Vec(Vec::Zero(s.y.size())));
    };
    Vec x(1), y(1);
    x << 0.3;
    y << -0.7;
    const State out = rk4_step(vf, State{x, y, 1.0}, 0.25);
    CHECK(out.x[0] == 0.3);
    CHECK(out.y[0] == -0.7);
    CHECK(out.t == 1.25);
  }
  SUBCASE("sled step matches the Taylor series to fifth order") {
    const System sys = chaplygin_sleigh(1.0, 1.0, 1.0, 0.0);
    const ReducedSystem rs = reduce(sys);
    Vec y0(2);
    y0 << 1.0, 1.0;
    auto one_step_error = [&](double h) {
      const State out = rk4_step(rs.field, State{Vec(0), y0, 0.0}, h);
      const Vec exact = oracles::sleigh_taylor(1.0, 1.0, 1.0, 0.0, y0, h);
      return (out.y - exact).cwiseAbs().maxCoeff();
    };
    const double e1 = one_step_error(1e-2);
    const double e2 = one_step_error(5e-3);
    CHECK(e1 < 1e-8);
    CHECK(e1 / e2 > 25.0);  // local truncation error scales like h^5
  }
}

TEST_CASE("integration horizon and observers") {
  const System sys = harmonic_oscillator(1);
  const VectorField vf = el_field(sys.ambient, sys.lagrangian);
  const State s0{Vec::Ones(1), Vec::Zero(1), 0.0};
  SUBCASE("T = 0 records only the initial state") {
    const Trajectory traj = integrate(vf, s0, 1e-3, 0.0);
    CHECK(traj.states.size() == 1);
  }
  SUBCASE("step count and uniform spacing") {
    const Trajectory traj = integrate(vf, s0, 0.1, 1.0);
    CHECK(traj.states.size() == 11);
    for (size_t i = 1; i < traj.states.size(); ++i)
      CHECK(traj.states[i].t - traj.states[i - 1].t == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("observers are evaluated at every state") {
    const MechanicalLagrangian l = sys.lagrangian;
    const Trajectory traj =
        integrate(vf, s0, 0.1, 1.0, {{"energy", [l](const State& s) { return energy(l, s); }}});
    CHECK(traj.series("energy").size() == traj.states.size());
    CHECK_THROWS_AS(traj.series("missing"), InputError);
  }
  SUBCASE("one full period returns to the start") {
    const double h = 2.0 * M_PI / 6300.0;  // ~1e-3, divides the period exactly
    const Trajectory traj = integrate(vf, s0, h, 2.0 * M_PI);
    const State& end = traj.states.back();
    CHECK(end.t == doctest::Approx(2.0 * M_PI).epsilon(1e-12));
    CHECK(std::abs(end.x[0] - 1.0) < 1e-10);
    CHECK(std::abs(end.y[0]) < 1e-10);
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(integrate(vf, s0, 0.0, 1.0), InputError);
    CHECK_THROWS_AS(integrate(vf, s0, -1e-3, 1.0), InputError);
  }
}

TEST_CASE("drift report") {
  SUBCASE("constant observer has zero drift") {
    const System sys = free_particle(1);
    const Trajectory traj =
        integrate(el_field(sys.ambient, sys.lagrangian), sys.default_initial, 0.01, 1.0,
                  {{"const", [](const State&) { return 42.0; }}});
    CHECK(drift_report(traj).at("const") == 0.0);
  }
  SUBCASE("sled energy drift over a long horizon") {
    const System sys = chaplygin_sleigh(1.0, 1.0, 1.0, 0.0);
    const ReducedSystem rs = reduce(sys);
    const MechanicalLagrangian l = rs.l;
    const Trajectory traj =
        integrate(rs.field, State{Vec(0), (Vec(2) << 1.0, 1.0).finished(), 0.0}, 1e-3, 10.0,
                  {{"energy", [l](const State& s) { return energy(l, s); }}});
    CHECK(drift_report(traj).at("energy") <= 1e-8);
  }
  SUBCASE("snakeboard steering rate is exactly conserved") {
    const System sys = build_system("snakeboard");
    const ReducedSystem rs = reduce(sys);
    Trajectory traj = integrate(rs.field, sys.default_initial, 1e-3, 10.0,
                                {{"y2", sys.charges[0].second}});
    CHECK(drift_report(traj).at("y2") <= 1e-9);
  }
}

TEST_CASE("convergence order on the oscillator") {
  const double e1 = endpoint_error_1d_oscillator(0.01, 1.0);
  const double e2 = endpoint_error_1d_oscillator(0.005, 1.0);
  const double ratio = e1 / e2;
  CHECK(ratio >= 14.0);
  CHECK(ratio <= 18.0);
}

TEST_CASE("forward-backward integration returns to the start") {
  const System sys = chaplygin_sleigh(1.0, 1.0, 1.0, 0.5);
  const ReducedSystem rs = reduce(sys);
  const VectorField negated = [rs](const State& s) {
    auto [xd, yd] = rs.field(s);
    return std::make_pair(Vec(-xd), Vec(-yd));
  };
  const State s0{Vec(0), (Vec(2) << 1.0, 0.5).finished(), 0.0};
  const Trajectory fwd = integrate(rs.field, s0, 1e-3, 5.0);
  const Trajectory bwd = integrate(negated, fwd.states.back(), 1e-3, 5.0);
  CHECK((bwd.states.back().y - s0.y).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("admissibility of integrated trajectories") {
  // the recorded base velocity is exactly rho(x) y at every state
  const System sys = build_system("snakeboard");
  const ReducedSystem rs = reduce(sys);
  const Algebroid red = rs.red.algebroid;
  const VectorField field = rs.field;
  const Trajectory traj = integrate(field, sys.default_initial, 1e-2, 1.0,
                                    {{"residual", [red, field](const State& s) {
                                        const auto [xdot, ydot] = field(s);
                                        return (xdot - Mat(red.rho(s.x)) * s.y)
                                            .cwiseAbs()
                                            .maxCoeff();
                                      }}});
  for (double r : traj.series("residual")) CHECK(r <= 1e-14);
}

TEST_CASE("blow-up carries the partial trajectory") {
  // ydot = 1 + y^2 escapes to infinity at t = pi/2
  const VectorField vf = [](const State& s) {
    return std::make_pair(Vec(0), Vec((1.0 + s.y.array() * s.y.array()).matrix()));
  };
  const State s0{Vec(0), Vec::Zero(1), 0.0};
  bool thrown = false;
  try {
    integrate(vf, s0, 1e-3, 2.0);
  } catch (const BlowUpError& e) {
    thrown = true;
    CHECK(e.t > 1.5);
    CHECK(e.t < 1.65);
    CHECK(e.partial.states.size() > 1000);
    CHECK(all_finite(e.partial.states.back().y));
  }
  CHECK(thrown);
}
