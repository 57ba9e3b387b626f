#pragma once

#include <vector>

#include "nonholo/smooth_map.hpp"

namespace nonholo {

/// A general algebroid in the bracket/anchor presentation: left anchor rho,
/// right anchor sigma (both base_dim x rank matrices of the base point) and
/// structure functions C with the (c, a, b) index convention of Tensor3.
/// base_dim = 0 is a first-class case (Lie algebras over a point; anchors are
/// empty matrices and the base point argument is the empty vector).
struct Algebroid {
  int base_dim = 0;
  int rank = 0;
  SmoothMap rho;
  SmoothMap sigma;
  SmoothTensor structure;
  bool is_quasi_lie = false;  // claimed by the constructor, verified by check_skew
};

Algebroid make_algebroid(int base_dim, int rank, SmoothMap rho, SmoothMap sigma,
                         SmoothTensor structure, bool quasi_lie_claim = false);

/// A local section, given by its coefficient functions in the ambient frame.
struct Section {
  SmoothVec coeffs;
};

Section constant_section(int base_dim, const Vec& v);
/// e_index as a constant section of a rank-m bundle.
Section frame_section(int base_dim, int rank, int index);
/// x^coord * e_index, with analytic partials.
Section coordinate_scaled_section(int base_dim, int rank, int coord, int index);

struct StructureData {
  Mat rho;
  Mat sigma;
  Tensor3 structure;
};

/// Evaluates (rho, sigma, C) at a base point.
StructureData eval_structure(const Algebroid& a, const Vec& x);

/// [X,Y]^c = rho(X)^i d_i Y^c - sigma(Y)^i d_i X^c + C^c_{ab} X^a Y^b.
Vec bracket_sections(const Algebroid& a, const Section& x_sec, const Section& y_sec, const Vec& x);

struct SkewReport {
  bool is_skew = false;
  double max_violation = 0.0;
};

/// Quasi-Lie test: max over samples of |C^c_{ab}+C^c_{ba}| and |rho-sigma|.
SkewReport check_skew(const Algebroid& a, const std::vector<Vec>& samples, double tol);

/// [X,[Y,Z]] + [Y,[Z,X]] + [Z,[X,Y]] at x. Requires skew data at x.
Vec jacobiator(const Algebroid& a, const Section& x_sec, const Section& y_sec,
               const Section& z_sec, const Vec& x);

struct LieReport {
  bool is_lie = false;
  double max_jacobiator = 0.0;
  double max_anchor_defect = 0.0;
  SkewReport skew;
};

/// Jacobi + anchor-morphism test over the deterministic section family
/// {e_a} united with {x^i e_a}: max jacobiator norm over all (constant,
/// constant, constant) and (scaled, constant, constant) triples, plus the
/// defect |rho([X,Y]) - [rho X, rho Y]_vf| with the vector-field bracket
/// taken by central differences. Throws InputError on non-skew data.
LieReport check_lie(const Algebroid& a, const std::vector<Vec>& samples, double tol);

/// A function on the total space (x, y) with optional analytic partials.
struct StateFn {
  std::function<double(const Vec& x, const Vec& y)> value;
  std::function<double(const Vec& x, const Vec& y, int i)> dx;  // may be empty
  std::function<double(const Vec& x, const Vec& y, int a)> dy;  // may be empty
  double fd_step = 1e-6;

  double operator()(const Vec& x, const Vec& y) const { return value(x, y); }
  double dx_at(const Vec& x, const Vec& y, int i) const;
  double dy_at(const Vec& x, const Vec& y, int a) const;
};

StateFn make_state_fn(std::function<double(const Vec&, const Vec&)> value);

/// Complete lift of a section applied to a function on the total space:
/// d_T(X)(F) = f^a sigma^i_a dF/dx^i
///           + (y^a rho^i_a d f^c/dx^i + C^c_{ab} y^a f^b) dF/dy^c.
StateFn complete_lift_apply(const Algebroid& a, const Section& x_sec, const StateFn& f);

/// Complete lift of a base function: d_T(f)(x, y) = y^a rho^i_a df/dx^i.
StateFn lift_base_function(const Algebroid& a, const SmoothScalar& f);

}  // namespace nonholo
