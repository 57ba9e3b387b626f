#pragma once

#include <map>
#include <string>

#include "nonholo/mechanics.hpp"

namespace nonholo {

/// Fixed-step trajectory with named observer time series recorded at every
/// stored state. Times are strictly increasing with uniform spacing.
struct Trajectory {
  std::vector<State> states;
  double step = 0.0;
  std::vector<std::string> observer_names;
  std::vector<std::vector<double>> observer_values;  // [observer][state]

  const std::vector<double>& series(const std::string& name) const;
};

/// Integration left the finite range; carries the offending time and the
/// trajectory accumulated so far.
struct BlowUpError : Error {
  BlowUpError(const std::string& msg, double t_, Trajectory partial_)
      : Error(msg), t(t_), partial(std::move(partial_)) {}
  double t;
  Trajectory partial;
};

using Observer = std::pair<std::string, std::function<double(const State&)>>;

/// Classical 4-stage Runge-Kutta update of (x, y); t advances by h.
State rk4_step(const VectorField& vf, const State& s, double h);

/// floor(T/h) steps from s0; observers evaluated at every state including s0.
Trajectory integrate(const VectorField& vf, const State& s0, double h, double T,
                     const std::vector<Observer>& observers = {});

/// name -> max |value - value_at_start| over the trajectory; empty name list
/// means every recorded observer.
std::map<std::string, double> drift_report(const Trajectory& traj,
                                           const std::vector<std::string>& names = {});

}  // namespace nonholo
