#pragma once

#include "nonholo/integrator.hpp"
#include "nonholo/nonholonomic.hpp"

namespace nonholo {

/// A section X of the reduced bundle paired with a gauge function f on the
/// base. (X, f) is a symmetry when d_T(X)(l) = d_T(f) identically.
struct SymmetryCandidate {
  Section x;
  SmoothScalar gauge;
};

SymmetryCandidate make_candidate(const ReducedAlgebroid& red, Section x);
SymmetryCandidate make_candidate(const ReducedAlgebroid& red, Section x, SmoothScalar gauge);

/// d_T(X)(l)(s) - d_T(f)(s) on the reduced algebroid.
double symmetry_defect(const ReducedAlgebroid& red, const MechanicalLagrangian& l,
                       const SymmetryCandidate& cand, const State& s);

/// Sampled quantifier over symmetry_defect.
bool is_symmetry(const ReducedAlgebroid& red, const MechanicalLagrangian& l,
                 const SymmetryCandidate& cand, const std::vector<State>& samples, double tol);

/// charge = X^a(x) (G_D(x) y)_a - f(x), evaluable on reduced states.
std::function<double(const State&)> noether_charge(const MechanicalLagrangian& l,
                                                   const SymmetryCandidate& cand);

struct MomentumReport {
  double max_residual = 0.0;
  bool pass = false;
};

/// Momentum equation check for an arbitrary section X: the charge rate along
/// the trajectory (4th-order central stencil) must equal d_T(X)(l) on it.
/// Needs at least five states.
MomentumReport momentum_rate_check(const ReducedAlgebroid& red, const MechanicalLagrangian& l,
                                   const Section& x_sec, const Trajectory& traj, double tol);

/// Heuristic least-squares search for symmetry pairs: the defect is linear in
/// the ansatz coefficients, so the best candidate is the smallest right
/// singular vector of the sampled defect matrix.
struct SymmetrySearchResult {
  Vec coefficients;      // concatenated (X-basis, f-basis) weights, unit norm
  double singular_value; // smallest singular value of the defect matrix
  double rms_defect;     // of the returned candidate over the samples
  SymmetryCandidate candidate;
};

SymmetrySearchResult search_symmetry(const ReducedAlgebroid& red, const MechanicalLagrangian& l,
                                     const std::vector<Section>& x_basis,
                                     const std::vector<SmoothScalar>& f_basis,
                                     const std::vector<State>& samples);

}  // namespace nonholo
