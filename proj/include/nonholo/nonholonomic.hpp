#pragma once

#include "nonholo/mechanics.hpp"

namespace nonholo {

/// A rank-k constraint subbundle of a rank-m ambient bundle over the full
/// base, given by a basis map B(x) whose columns are sections of D in the
/// ambient frame. B must keep full column rank (smallest singular value
/// above 1e-10 times the largest).
struct Subbundle {
  SmoothMap basis;  // m x k
  int ambient_rank = 0;
  int rank = 0;

  /// Evaluates B(x) and enforces the rank invariant.
  Mat basis_at(const Vec& x) const;
};

Subbundle make_subbundle(const Algebroid& ambient, SmoothMap basis);

/// Fiberwise projection of the ambient bundle onto D. `matrix` is P(x)
/// (m x m); `extractor` is the k x m map E(x) with E B = I and E = 0 on the
/// chosen complement, so E(P(w)) are the D-frame coefficients of P(w).
struct Projector {
  SmoothMap matrix;
  SmoothMap extractor;
  bool g_orthogonal = false;
};

/// P = B (B^T G B)^{-1} B^T G, the G-orthogonal projection onto D.
Projector orthogonal_projector(const SmoothMap& metric, const Subbundle& d);

/// Projection onto D along the span of the given complement basis (m x (m-k)).
Projector projector_along(const Subbundle& d, const SmoothMap& complement);

struct ProjectorReport {
  double max_idempotency = 0.0;   // |P^2 - P|
  double max_range = 0.0;         // |P B - B|
  double max_self_adjoint = 0.0;  // |G P - P^T G| (orthogonal case only)
  bool pass = false;
};

ProjectorReport projector_invariants(const Projector& p, const Subbundle& d,
                                     const SmoothMap* metric, const std::vector<Vec>& samples,
                                     double tol);

/// G-orthonormal basis of the complement D-perp at x, deterministic:
/// G-Gram-Schmidt seeded by the ambient frame vectors, picking at each step
/// the candidate with the largest residual G-norm (ties to the lowest index).
Mat complete_frame(const SmoothMap& metric, const Subbundle& d, const Vec& x);

/// The reduced bracket [X,Y]_P = P [X,Y] on sections of D, exposed as a
/// rank-k algebroid over the same base: anchors rho B, sigma B and structure
/// functions E([B_a, B_b]).
struct ReducedAlgebroid {
  Algebroid algebroid;
  Algebroid ambient;
  Subbundle subbundle;
  Projector projector;
};

ReducedAlgebroid reduce_algebroid(const Algebroid& a, const Subbundle& d, const Projector& p);

/// l = L restricted to D: metric B^T G B, same potential.
MechanicalLagrangian restricted_lagrangian(const MechanicalLagrangian& l, const Subbundle& d);

/// Direct constrained route: builds the adapted frame (B | N), transforms the
/// ambient structure data into it, embeds the state with vanishing complement
/// velocities and solves the constrained equations for the D-indexed block.
std::pair<Vec, Vec> nonholonomic_el_vector_field(const Algebroid& a,
                                                 const MechanicalLagrangian& l, const Subbundle& d,
                                                 const State& s);

VectorField nonholonomic_el_field(const Algebroid& a, const MechanicalLagrangian& l,
                                  const Subbundle& d);

struct EquivalenceReport {
  double max_gap = 0.0;  // worst relative gap over the samples
  bool pass = false;
  int argmax = -1;
};

/// Compares the direct constrained route against the unconstrained route on
/// the reduced algebroid with the restricted Lagrangian, state by state.
EquivalenceReport verify_route_equivalence(const Algebroid& a, const MechanicalLagrangian& l,
                                     const Subbundle& d, const std::vector<State>& samples,
                                     double tol);

/// Realizes a skew bracket with trivial anchor as a reduction: a 2-step
/// nilpotent Lie algebra on basis {e_i, f_j} with [e_i,e_j] = c^t_{ij} f_t and
/// f central; D embeds as span{e_i + f_i} and the projection sends f_i to
/// e_i + f_i with kernel span{e_i}, so the reduction returns c exactly.
struct NilpotentDouble {
  Algebroid ambient;  // rank 2k over a point
  Mat embed;          // 2k x k, columns e_i + f_i
  Mat complement;     // 2k x k, columns spanning the projection kernel
  Mat projector;      // 2k x 2k
  Subbundle subbundle;
  Projector proj;
};

NilpotentDouble nilpotent_double(const Tensor3& c);

}  // namespace nonholo
