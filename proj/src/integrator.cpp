#include "nonholo/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace nonholo {

namespace {

bool finite_state(const Vec& x, const Vec& y) { return all_finite(x) && all_finite(y); }

}  // namespace

const std::vector<double>& Trajectory::series(const std::string& name) const {
  for (size_t i = 0; i < observer_names.size(); ++i)
    if (observer_names[i] == name) return observer_values[i];
  throw InputError("Trajectory: no observer named '" + name + "'");
}

State rk4_step(const VectorField& vf, const State& s, double h) {
  auto eval = [&](const Vec& x, const Vec& y, double t) {
    State q{x, y, t};
    auto [xd, yd] = vf(q);
    if (!finite_state(xd, yd))
      throw BlowUpError("rk4_step: non-finite stage at t = " + std::to_string(t), t, {});
    return std::make_pair(std::move(xd), std::move(yd));
  };
  const auto [k1x, k1y] = eval(s.x, s.y, s.t);
  const auto [k2x, k2y] = eval(s.x + 0.5 * h * k1x, s.y + 0.5 * h * k1y, s.t + 0.5 * h);
  const auto [k3x, k3y] = eval(s.x + 0.5 * h * k2x, s.y + 0.5 * h * k2y, s.t + 0.5 * h);
  const auto [k4x, k4y] = eval(s.x + h * k3x, s.y + h * k3y, s.t + h);
  State out;
  out.x = s.x + (h / 6.0) * (k1x + 2.0 * (k2x + k3x) + k4x);
  out.y = s.y + (h / 6.0) * (k1y + 2.0 * (k2y + k3y) + k4y);
  out.t = s.t + h;
  if (!finite_state(out.x, out.y))
    throw BlowUpError("rk4_step: non-finite state at t = " + std::to_string(out.t), out.t, {});
  return out;
}

Trajectory integrate(const VectorField& vf, const State& s0, double h, double T,
                     const std::vector<Observer>& observers) {
  if (!(h > 0.0)) throw InputError("integrate: need h > 0");
  if (T < 0.0) throw InputError("integrate: need T >= 0");
  if (!finite_state(s0.x, s0.y)) throw InputError("integrate: non-finite initial state");

  Trajectory traj;
  traj.step = h;
  for (const auto& [name, fn] : observers) {
    traj.observer_names.push_back(name);
    traj.observer_values.emplace_back();
  }
  auto record = [&](const State& s) {
    traj.states.push_back(s);
    for (size_t i = 0; i < observers.size(); ++i)
      traj.observer_values[i].push_back(observers[i].second(s));
  };
  record(s0);

  const long steps = static_cast<long>(std::floor(T / h + 1e-9));
  State cur = s0;
  for (long k = 0; k < steps; ++k) {
    try {
      cur = rk4_step(vf, cur, h);
    } catch (const BlowUpError& e) {
      throw BlowUpError(e.what(), e.t, std::move(traj));
    }
    record(cur);
  }
  return traj;
}

std::map<std::string, double> drift_report(const Trajectory& traj,
                                           const std::vector<std::string>& names) {
  std::map<std::string, double> out;
  const std::vector<std::string>& keys = names.empty() ? traj.observer_names : names;
  for (const std::string& name : keys) {
    const std::vector<double>& v = traj.series(name);
    if (v.empty()) {
      out[name] = 0.0;
      continue;
    }
    double drift = 0.0;
    for (double val : v) drift = std::max(drift, std::abs(val - v.front()));
    out[name] = drift;
  }
  return out;
}

}  // namespace nonholo
