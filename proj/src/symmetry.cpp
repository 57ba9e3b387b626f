#include "nonholo/symmetry.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace nonholo {

SymmetryCandidate make_candidate(const ReducedAlgebroid& red, Section x) {
  return SymmetryCandidate{std::move(x), constant_scalar(red.algebroid.base_dim, 0.0)};
}

SymmetryCandidate make_candidate(const ReducedAlgebroid& red, Section x, SmoothScalar gauge) {
  if (gauge.domain_dim() != red.algebroid.base_dim)
    throw DimensionError("make_candidate: gauge domain dim mismatch");
  return SymmetryCandidate{std::move(x), std::move(gauge)};
}

double symmetry_defect(const ReducedAlgebroid& red, const MechanicalLagrangian& l,
                       const SymmetryCandidate& cand, const State& s) {
  if (l.rank != red.algebroid.rank) throw DimensionError("symmetry_defect: rank mismatch");
  const StateFn lifted = complete_lift_apply(red.algebroid, cand.x, lagrangian_state_fn(l));
  const StateFn gauge_lift = lift_base_function(red.algebroid, cand.gauge);
  return lifted(s.x, s.y) - gauge_lift(s.x, s.y);
}

bool is_symmetry(const ReducedAlgebroid& red, const MechanicalLagrangian& l,
                 const SymmetryCandidate& cand, const std::vector<State>& samples, double tol) {
  for (const State& s : samples)
    if (std::abs(symmetry_defect(red, l, cand, s)) > tol) return false;
  return true;
}

std::function<double(const State&)> noether_charge(const MechanicalLagrangian& l,
                                                   const SymmetryCandidate& cand) {
  const MechanicalLagrangian lc = l;
  const SymmetryCandidate cc = cand;
  return [lc, cc](const State& s) {
    const Vec xi = metric_at(lc, s.x) * s.y;
    return cc.x.coeffs(s.x).dot(xi) - cc.gauge(s.x);
  };
}

MomentumReport momentum_rate_check(const ReducedAlgebroid& red, const MechanicalLagrangian& l,
                                   const Section& x_sec, const Trajectory& traj, double tol) {
  const size_t n = traj.states.size();
  if (n < 5)
    throw InputError("momentum_rate_check: trajectory too short for the 5-point stencil (" +
                     std::to_string(n) + " states)");
  const double h = traj.step;
  SymmetryCandidate cand = make_candidate(red, x_sec);
  const auto charge = noether_charge(l, cand);
  std::vector<double> q(n);
  for (size_t i = 0; i < n; ++i) q[i] = charge(traj.states[i]);
  const StateFn lifted = complete_lift_apply(red.algebroid, x_sec, lagrangian_state_fn(l));

  MomentumReport rep;
  for (size_t i = 2; i + 2 < n; ++i) {
    const double dq = (-q[i + 2] + 8.0 * q[i + 1] - 8.0 * q[i - 1] + q[i - 2]) / (12.0 * h);
    const State& s = traj.states[i];
    const double rate = lifted(s.x, s.y);
    rep.max_residual = std::max(rep.max_residual, std::abs(dq - rate));
  }
  rep.pass = rep.max_residual <= tol;
  return rep;
}

SymmetrySearchResult search_symmetry(const ReducedAlgebroid& red, const MechanicalLagrangian& l,
                                     const std::vector<Section>& x_basis,
                                     const std::vector<SmoothScalar>& f_basis,
                                     const std::vector<State>& samples) {
  const int p = static_cast<int>(x_basis.size());
  const int q = static_cast<int>(f_basis.size());
  if (p + q == 0) throw InputError("search_symmetry: empty ansatz");
  if (samples.empty()) throw InputError("search_symmetry: no samples");
  const StateFn lfn = lagrangian_state_fn(l);

  Mat m(static_cast<int>(samples.size()), p + q);
  for (int j = 0; j < p; ++j) {
    const StateFn lifted = complete_lift_apply(red.algebroid, x_basis[j], lfn);
    for (size_t i = 0; i < samples.size(); ++i)
      m(static_cast<int>(i), j) = lifted(samples[i].x, samples[i].y);
  }
  for (int j = 0; j < q; ++j) {
    const StateFn gl = lift_base_function(red.algebroid, f_basis[j]);
    for (size_t i = 0; i < samples.size(); ++i)
      m(static_cast<int>(i), p + j) = -gl(samples[i].x, samples[i].y);
  }

  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinV);
  const int last = static_cast<int>(svd.singularValues().size()) - 1;
  Vec coeff = svd.matrixV().col(last);
  int imax = 0;
  for (int i = 1; i < coeff.size(); ++i)
    if (std::abs(coeff[i]) > std::abs(coeff[imax])) imax = i;
  if (coeff[imax] < 0.0) coeff = -coeff;  // deterministic sign

  // assemble the candidate from the weights
  const int n = red.algebroid.base_dim;
  const int k = red.algebroid.rank;
  std::vector<Section> xb = x_basis;
  Vec xw = coeff.head(p);
  Section x_comb{make_vector_map(n, k, [xb, xw, k](const Vec& x) {
    Vec v = Vec::Zero(k);
    for (size_t j = 0; j < xb.size(); ++j) v += xw[static_cast<int>(j)] * xb[j].coeffs(x);
    return v;
  })};
  std::vector<SmoothScalar> fb = f_basis;
  Vec fw = coeff.tail(q);
  SmoothScalar f_comb = make_scalar_map(n, [fb, fw](const Vec& x) {
    double v = 0.0;
    for (size_t j = 0; j < fb.size(); ++j) v += fw[static_cast<int>(j)] * fb[j](x);
    return v;
  });

  SymmetrySearchResult res;
  res.coefficients = coeff;
  res.singular_value = svd.singularValues()(last);
  res.candidate = SymmetryCandidate{std::move(x_comb), std::move(f_comb)};
  double ss = 0.0;
  for (const State& s : samples) {
    const double d = symmetry_defect(red, l, res.candidate, s);
    ss += d * d;
  }
  res.rms_defect = std::sqrt(ss / static_cast<double>(samples.size()));
  return res;
}

}  // namespace nonholo
