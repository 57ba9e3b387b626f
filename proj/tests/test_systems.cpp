#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nonholo/integrator.hpp"
#include "nonholo/sampling.hpp"
#include "nonholo/systems.hpp"
#include "oracles.hpp"

using namespace nonholo;

TEST_CASE("registry") {
  const auto& reg = registry();
  std::vector<std::string> names;
  for (const auto& d : reg) names.push_back(d.name);
  for (const char* expect :
       {"chaplygin_sleigh", "snakeboard", "free_particle", "harmonic_oscillator",
        "random_quasi_lie"})
    CHECK(std::count(names.begin(), names.end(), expect) == 1);

  CHECK_THROWS_AS(build_system("no_such_system"), InputError);
  CHECK_THROWS_AS(build_system("chaplygin_sleigh", {{"mass", 2.0}}), InputError);
  const System sys = build_system("chaplygin_sleigh", {{"a", 0.5}});
  CHECK(sys.ambient.rank == 3);
}

TEST_CASE("sled construction") {
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(chaplygin_sleigh(-1.0, 1.0, 0.0, 0.0), InputError);
    CHECK_THROWS_AS(chaplygin_sleigh(1.0, 0.0, 0.0, 0.0), InputError);
  }
  SUBCASE("metric is SPD and reproduces the kinetic energy couplings") {
    const System sys = chaplygin_sleigh(2.0, 1.5, 0.7, -0.4);
    const Mat g = metric_at(sys.lagrangian, Vec(0));
    CHECK(g(0, 0) == 2.0);
    CHECK(g(1, 1) == 2.0);
    CHECK(g(2, 2) == doctest::Approx(1.5 + 2.0 * (0.49 + 0.16)));
    CHECK(g(0, 2) == doctest::Approx(0.4 * 2.0));   // -b m
    CHECK(g(1, 2) == doctest::Approx(0.7 * 2.0));   // a m
    CHECK_NOTHROW(spd_cholesky(g, "sled metric"));
  }
  SUBCASE("zero offset kills the reduced bracket and freezes the velocities") {
    const System sys = chaplygin_sleigh(1.0, 2.0, 0.0, 0.0);
    const Projector p = orthogonal_projector(sys.lagrangian.metric, sys.constraint);
    const ReducedAlgebroid red = reduce_algebroid(sys.ambient, sys.constraint, p);
    CHECK(red.algebroid.structure(Vec(0)).max_abs() < 1e-15);
    const MechanicalLagrangian l = restricted_lagrangian(sys.lagrangian, sys.constraint);
    const auto [xd, yd] =
        el_vector_field(red.algebroid, l, State{Vec(0), (Vec(2) << 1.3, -0.4).finished(), 0.0});
    CHECK(yd.cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("relative equilibria with zero cross offset") {
    const System sys = chaplygin_sleigh(1.4, 0.9, 0.8, 0.0);
    const Projector p = orthogonal_projector(sys.lagrangian.metric, sys.constraint);
    const ReducedAlgebroid red = reduce_algebroid(sys.ambient, sys.constraint, p);
    const MechanicalLagrangian l = restricted_lagrangian(sys.lagrangian, sys.constraint);
    for (double y2 : {-2.0, -0.5, 1.0, 3.0}) {
      const auto [xd, yd] =
          el_vector_field(red.algebroid, l, State{Vec(0), (Vec(2) << 0.0, y2).finished(), 0.0});
      CHECK(yd.cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SUBCASE("closed-form equations across random parameters") {
    Rng rng(61);
    for (int trial = 0; trial < 10; ++trial) {
      const double m = rng.uniform(0.5, 3.0), j = rng.uniform(0.5, 3.0);
      const double a = rng.uniform(-1.0, 1.0), b = rng.uniform(-1.0, 1.0);
      const System sys = chaplygin_sleigh(m, j, a, b);
      const Projector p = orthogonal_projector(sys.lagrangian.metric, sys.constraint);
      const ReducedAlgebroid red = reduce_algebroid(sys.ambient, sys.constraint, p);
      const MechanicalLagrangian l = restricted_lagrangian(sys.lagrangian, sys.constraint);
      for (int t = 0; t < 20; ++t) {
        const Vec y = rng.uniform_vec(2, -2.0, 2.0);
        const auto [xd, yd] = el_vector_field(red.algebroid, l, State{Vec(0), y, 0.0});
        const Vec expect = oracles::sleigh_rhs(m, j, a, b, y);
        CHECK((yd - expect).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + expect.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST_CASE("snakeboard construction") {
  SUBCASE("parameter relation is enforced with the violated relation in the message") {
    try {
      snakeboard(1.0, 1.0, 0.4, 0.1, 1.0);
      FAIL("expected InputError");
    } catch (const InputError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("J + J0 + 2*J1") != std::string::npos);
      CHECK(msg.find("m*r^2") != std::string::npos);
    }
    CHECK_THROWS_AS(snakeboard(1.0, 0.4, -0.4, 0.1, 1.0), InputError);
    CHECK_NOTHROW(snakeboard(1.0, snakeboard_inertia_for(1.0, 0.4, 0.1, 1.0), 0.4, 0.1, 1.0));
  }
  SUBCASE("reduced anchors carry the steering geometry") {
    const System sys = build_system("snakeboard");
    const Projector p = orthogonal_projector(sys.lagrangian.metric, sys.constraint);
    const ReducedAlgebroid red = reduce_algebroid(sys.ambient, sys.constraint, p);
    Rng rng(71);
    for (int t = 0; t < 20; ++t) {
      Vec x(5);
      x << rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
          rng.uniform(-1.1, 1.1);
      const Vec y = rng.uniform_vec(3, -2.0, 2.0);
      const Vec xdot = Mat(red.algebroid.rho(x)) * y;
      const double theta = x[2], phi = x[4];
      const double a = -2.0 * std::cos(phi) * std::cos(phi) * std::cos(theta);
      const double b = -2.0 * std::cos(phi) * std::cos(phi) * std::sin(theta);
      const double c = std::sin(2.0 * phi);
      CHECK(xdot[0] == doctest::Approx(a * y[2]).epsilon(1e-12));
      CHECK(xdot[1] == doctest::Approx(b * y[2]).epsilon(1e-12));
      CHECK(xdot[2] == doctest::Approx(c * y[2]).epsilon(1e-12));
      CHECK(xdot[3] == doctest::Approx(y[0]).epsilon(1e-12));
      CHECK(xdot[4] == doctest::Approx(y[1]).epsilon(1e-12));
    }
  }
  SUBCASE("structure functions match the elimination closed form") {
    const System sys = build_system("snakeboard");
    const Projector p = orthogonal_projector(sys.lagrangian.metric, sys.constraint);
    const ReducedAlgebroid red = reduce_algebroid(sys.ambient, sys.constraint, p);
    for (double phi : {-0.9, -0.3, 0.0, 0.25, 0.8}) {
      Vec x(5);
      x << 0.1, -0.2, 0.5, 0.0, phi;
      const Tensor3 c = red.algebroid.structure(x);
      CHECK(c(0, 1, 2) ==
            doctest::Approx(oracles::snakeboard_c123(1.0, 0.4, 1.0, phi)).epsilon(1e-10));
      CHECK(c(2, 1, 2) ==
            doctest::Approx(oracles::snakeboard_c323_derived(1.0, 0.4, 1.0, phi)).epsilon(1e-10));
    }
  }
  SUBCASE("constraint basis degenerates at the steering singularity") {
    const System sys = build_system("snakeboard");
    Vec x = Vec::Zero(5);
    x[4] = M_PI / 2.0;  // the coupled translation-turn direction collapses
    CHECK_THROWS_AS(sys.constraint.basis_at(x), DegenerateConstraintError);
    x[4] = 1.2;
    CHECK_NOTHROW(sys.constraint.basis_at(x));
  }
  SUBCASE("trajectories conserve the known charges") {
    const System sys = build_system("snakeboard");
    const Projector p = orthogonal_projector(sys.lagrangian.metric, sys.constraint);
    const ReducedAlgebroid red = reduce_algebroid(sys.ambient, sys.constraint, p);
    const MechanicalLagrangian l = restricted_lagrangian(sys.lagrangian, sys.constraint);
    std::vector<Observer> obs;
    for (const auto& charge : sys.charges) obs.emplace_back(charge);
    const Trajectory traj =
        integrate(el_field(red.algebroid, l), sys.default_initial, 1e-3, 10.0, obs);
    const auto drift = drift_report(traj);
    CHECK(drift.at("y2") <= 1e-9);
    CHECK(drift.at("y1_plus_c_y3") <= 1e-7);
  }
}

TEST_CASE("registry extras") {
  SUBCASE("free particle drifts linearly") {
    const System sys = free_particle(3);
    Vec x(3), y(3);
    x << 0.1, 0.2, 0.3;
    y << 1.0, -2.0, 0.5;
    const auto [xd, yd] = el_vector_field(sys.ambient, sys.lagrangian, State{x, y, 0.0});
    CHECK((xd - y).cwiseAbs().maxCoeff() == 0.0);
    CHECK(yd.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("oscillator has period two pi") {
    const System sys = harmonic_oscillator(2);
    const double h = 2.0 * M_PI / 6300.0;
    const Trajectory traj =
        integrate(el_field(sys.ambient, sys.lagrangian), sys.default_initial, h, 2.0 * M_PI);
    CHECK((traj.states.back().x - sys.default_initial.x).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((traj.states.back().y - sys.default_initial.y).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("random system construction is deterministic in the seed") {
    const System s1 = random_quasi_lie(5, 3, 17);
    const System s2 = random_quasi_lie(5, 3, 17);
    Rng rng(5);
    const Vec x = rng.uniform_vec(s1.ambient.base_dim, -1, 1);
    CHECK(((Mat)s1.lagrangian.metric(x) - (Mat)s2.lagrangian.metric(x)).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK(((Mat)s1.constraint.basis(x) - (Mat)s2.constraint.basis(x)).cwiseAbs().maxCoeff() ==
          0.0);
  }
  SUBCASE("random systems satisfy the route equivalence") {
    for (uint64_t seed : {6, 7, 8}) {
      const System sys = random_quasi_lie(4, 2, seed);
      Rng rng(seed + 100);
      std::vector<State> samples;
      for (int i = 0; i < 50; ++i)
        samples.push_back(State{rng.uniform_vec(sys.ambient.base_dim, -1.0, 1.0),
                                rng.uniform_vec(sys.constraint.rank, -2.0, 2.0), 0.0});
      CHECK(verify_route_equivalence(sys.ambient, sys.lagrangian, sys.constraint, samples, 1e-8).pass);
    }
  }
}

TEST_CASE("structural invariants of every registered system") {
  for (const char* name : {"chaplygin_sleigh", "snakeboard", "free_particle",
                           "harmonic_oscillator", "random_quasi_lie"}) {
    CAPTURE(name);
    const System sys = build_system(name);
    const int n = sys.ambient.base_dim;
    Box box(n, {-1.0, 1.0});
    if (std::string(name) == "snakeboard") box[4] = {-1.1, 1.1};
    Rng rng(7);
    const auto pts = n == 0 ? std::vector<Vec>{Vec(0)} : random_points(rng, box, 100);
    // SPD metric everywhere sampled
    for (const Vec& x : pts) CHECK_NOTHROW(spd_cholesky(metric_at(sys.lagrangian, x), name));
    // claimed quasi-Lie structure is actually skew
    CHECK(sys.ambient.is_quasi_lie);
    CHECK(check_skew(sys.ambient, pts, 1e-12).is_skew);
    // full-rank constraint basis
    for (const Vec& x : pts) CHECK_NOTHROW(sys.constraint.basis_at(x));
    // metric-orthogonal projector invariants
    const Projector p = orthogonal_projector(sys.lagrangian.metric, sys.constraint);
    CHECK(projector_invariants(p, sys.constraint, &sys.lagrangian.metric, pts, 1e-10).pass);
    // the two dynamics routes agree
    std::vector<State> states;
    for (int i = 0; i < 50; ++i)
      states.push_back(State{n == 0 ? Vec(0) : rng.uniform_vec(n, -1.0, 1.0),
                             rng.uniform_vec(sys.constraint.rank, -2.0, 2.0), 0.0});
    if (std::string(name) == "snakeboard")
      for (State& s : states) s.x[4] = rng.uniform(-1.1, 1.1);
    CHECK(verify_route_equivalence(sys.ambient, sys.lagrangian, sys.constraint, states, 1e-9).pass);
  }
}

TEST_CASE("stripping partials preserves values") {
  const System sys = build_system("snakeboard");
  const System fd = strip_analytic_partials(sys);
  CHECK(!fd.constraint.basis.has_partial());
  CHECK(sys.constraint.basis.has_partial());
  Vec x(5);
  x << 0.3, -0.1, 0.4, 0.2, 0.5;
  CHECK(((Mat)sys.constraint.basis(x) - (Mat)fd.constraint.basis(x)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(((Mat)sys.constraint.basis.partial(x, 4) - (Mat)fd.constraint.basis.partial(x, 4))
            .cwiseAbs()
            .maxCoeff() < 1e-7);
}
