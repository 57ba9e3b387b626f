#include "nonholo/algebroid.hpp"

#include <cmath>

namespace nonholo {

namespace {

void check_base_point(const Algebroid& a, const Vec& x, const char* who) {
  if (x.size() != a.base_dim)
    throw DimensionError(std::string(who) + ": base point has length " + std::to_string(x.size()) +
                         ", base dim is " + std::to_string(a.base_dim));
}

void check_section(const Algebroid& a, const Section& s, const char* who) {
  if (!s.coeffs.valid()) throw InputError(std::string(who) + ": empty section");
  if (s.coeffs.domain_dim() != a.base_dim)
    throw DimensionError(std::string(who) + ": section domain dim mismatch");
}

double skew_violation_at(const Mat& rho, const Mat& sigma, const Tensor3& c) {
  double v = 0.0;
  for (int t = 0; t < c.dim0(); ++t)
    for (int a = 0; a < c.dim1(); ++a)
      for (int b = 0; b < c.dim2(); ++b) v = std::max(v, std::abs(c(t, a, b) + c(t, b, a)));
  if (rho.size() > 0) v = std::max(v, (rho - sigma).cwiseAbs().maxCoeff());
  return v;
}

/// Section whose coefficients are the bracket of two given sections;
/// partials fall back to central differences on the composite.
Section bracket_section(const Algebroid& a, const Section& x_sec, const Section& y_sec) {
  return Section{make_vector_map(a.base_dim, a.rank, [a, x_sec, y_sec](const Vec& x) {
    return bracket_sections(a, x_sec, y_sec, x);
  })};
}

/// Vector field rho(X) as a function of the base point, differentiated by
/// central differences for the vector-field bracket oracle in check_lie.
Vec vf_commutator(const Algebroid& a, const Section& x_sec, const Section& y_sec, const Vec& x,
                  double step) {
  const int n = a.base_dim;
  auto u = [&](const Vec& p) { return Vec(Mat(a.rho(p)) * x_sec.coeffs(p)); };
  auto v = [&](const Vec& p) { return Vec(Mat(a.rho(p)) * y_sec.coeffs(p)); };
  const Vec ux = u(x), vx = v(x);
  Vec out = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double h = step * (1.0 + std::abs(x[i]));
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const Vec dv = (v(xp) - v(xm)) / (2.0 * h);
    const Vec du = (u(xp) - u(xm)) / (2.0 * h);
    out += ux[i] * dv - vx[i] * du;
  }
  return out;
}

}  // namespace

Algebroid make_algebroid(int base_dim, int rank, SmoothMap rho, SmoothMap sigma,
                         SmoothTensor structure, bool quasi_lie_claim) {
  if (base_dim < 0 || rank <= 0) throw InputError("make_algebroid: need base_dim >= 0, rank >= 1");
  if (rho.domain_dim() != base_dim || sigma.domain_dim() != base_dim ||
      structure.domain_dim() != base_dim)
    throw DimensionError("make_algebroid: coefficient maps must have the base as domain");
  Algebroid a;
  a.base_dim = base_dim;
  a.rank = rank;
  a.rho = std::move(rho);
  a.sigma = std::move(sigma);
  a.structure = std::move(structure);
  a.is_quasi_lie = quasi_lie_claim;
  return a;
}

Section constant_section(int base_dim, const Vec& v) {
  return Section{constant_vector(base_dim, v)};
}

Section frame_section(int base_dim, int rank, int index) {
  if (index < 0 || index >= rank) throw DimensionError("frame_section: index out of range");
  Vec e = Vec::Zero(rank);
  e[index] = 1.0;
  return constant_section(base_dim, e);
}

Section coordinate_scaled_section(int base_dim, int rank, int coord, int index) {
  if (coord < 0 || coord >= base_dim)
    throw DimensionError("coordinate_scaled_section: coordinate out of range");
  if (index < 0 || index >= rank)
    throw DimensionError("coordinate_scaled_section: frame index out of range");
  return Section{make_vector_map(
      base_dim, rank,
      [rank, coord, index](const Vec& x) {
        Vec v = Vec::Zero(rank);
        v[index] = x[coord];
        return v;
      },
      [rank, coord, index](const Vec&, int i) {
        Vec v = Vec::Zero(rank);
        if (i == coord) v[index] = 1.0;
        return v;
      })};
}

StructureData eval_structure(const Algebroid& a, const Vec& x) {
  check_base_point(a, x, "eval_structure");
  return StructureData{a.rho(x), a.sigma(x), a.structure(x)};
}

Vec bracket_sections(const Algebroid& a, const Section& x_sec, const Section& y_sec,
                     const Vec& x) {
  check_base_point(a, x, "bracket_sections");
  check_section(a, x_sec, "bracket_sections");
  check_section(a, y_sec, "bracket_sections");
  const Vec xv = x_sec.coeffs(x);
  const Vec yv = y_sec.coeffs(x);
  if (xv.size() != a.rank || yv.size() != a.rank)
    throw DimensionError("bracket_sections: section rank mismatch");
  Vec out = a.structure(x).bilinear(xv, yv);
  if (a.base_dim > 0) {
    const Vec rx = Mat(a.rho(x)) * xv;
    const Vec sy = Mat(a.sigma(x)) * yv;
    for (int i = 0; i < a.base_dim; ++i) {
      if (rx[i] != 0.0) out += rx[i] * y_sec.coeffs.partial(x, i);
      if (sy[i] != 0.0) out -= sy[i] * x_sec.coeffs.partial(x, i);
    }
  }
  return out;
}

SkewReport check_skew(const Algebroid& a, const std::vector<Vec>& samples, double tol) {
  SkewReport rep;
  for (const Vec& x : samples) {
    const StructureData d = eval_structure(a, x);
    rep.max_violation = std::max(rep.max_violation, skew_violation_at(d.rho, d.sigma, d.structure));
  }
  rep.is_skew = rep.max_violation <= tol;
  return rep;
}

Vec jacobiator(const Algebroid& a, const Section& x_sec, const Section& y_sec,
               const Section& z_sec, const Vec& x) {
  check_base_point(a, x, "jacobiator");
  {
    const StructureData d = eval_structure(a, x);
    const double viol = skew_violation_at(d.rho, d.sigma, d.structure);
    const double scale = 1.0 + d.structure.max_abs() +
                         (d.rho.size() > 0 ? d.rho.cwiseAbs().maxCoeff() : 0.0);
    if (viol > 1e-8 * scale)
      throw InputError("jacobiator: non-skew data at the given point (violation " +
                       std::to_string(viol) + ")");
  }
  Vec out = bracket_sections(a, x_sec, bracket_section(a, y_sec, z_sec), x);
  out += bracket_sections(a, y_sec, bracket_section(a, z_sec, x_sec), x);
  out += bracket_sections(a, z_sec, bracket_section(a, x_sec, y_sec), x);
  return out;
}

LieReport check_lie(const Algebroid& a, const std::vector<Vec>& samples, double tol) {
  LieReport rep;
  rep.skew = check_skew(a, samples, std::max(tol, 1e-10));
  if (!rep.skew.is_skew)
    throw InputError("check_lie: data is not skew (violation " +
                     std::to_string(rep.skew.max_violation) + "); Jacobi test needs quasi-Lie data");

  const int m = a.rank;
  const int n = a.base_dim;
  std::vector<Section> frame;
  frame.reserve(m);
  for (int i = 0; i < m; ++i) frame.push_back(frame_section(n, m, i));
  std::vector<Section> scaled;
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < m; ++c) scaled.push_back(coordinate_scaled_section(n, m, i, c));

  const double step = default_fd_step();
  for (const Vec& x : samples) {
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q)
        for (int r = 0; r < m; ++r) {
          const Vec j = jacobiator(a, frame[p], frame[q], frame[r], x);
          rep.max_jacobiator = std::max(rep.max_jacobiator, j.cwiseAbs().maxCoeff());
        }
    for (const Section& s : scaled)
      for (int q = 0; q < m; ++q)
        for (int r = 0; r < m; ++r) {
          const Vec j = jacobiator(a, s, frame[q], frame[r], x);
          rep.max_jacobiator = std::max(rep.max_jacobiator, j.cwiseAbs().maxCoeff());
        }
    if (n > 0) {
      auto anchor_defect = [&](const Section& xs, const Section& ys) {
        const Vec lhs = Mat(a.rho(x)) * bracket_sections(a, xs, ys, x);
        const Vec rhs = vf_commutator(a, xs, ys, x, step);
        return (lhs - rhs).cwiseAbs().maxCoeff();
      };
      for (int p = 0; p < m; ++p)
        for (int q = p + 1; q < m; ++q)
          rep.max_anchor_defect = std::max(rep.max_anchor_defect, anchor_defect(frame[p], frame[q]));
      for (const Section& s : scaled)
        for (int q = 0; q < m; ++q)
          rep.max_anchor_defect = std::max(rep.max_anchor_defect, anchor_defect(s, frame[q]));
    }
  }
  rep.is_lie = rep.max_jacobiator <= tol && rep.max_anchor_defect <= tol;
  return rep;
}

double StateFn::dx_at(const Vec& x, const Vec& y, int i) const {
  if (dx) return dx(x, y, i);
  const double h = fd_step * (1.0 + std::abs(x[i]));
  Vec xp = x, xm = x;
  xp[i] += h;
  xm[i] -= h;
  return (value(xp, y) - value(xm, y)) / (2.0 * h);
}

double StateFn::dy_at(const Vec& x, const Vec& y, int a) const {
  if (dy) return dy(x, y, a);
  const double h = fd_step * (1.0 + std::abs(y[a]));
  Vec yp = y, ym = y;
  yp[a] += h;
  ym[a] -= h;
  return (value(x, yp) - value(x, ym)) / (2.0 * h);
}

StateFn make_state_fn(std::function<double(const Vec&, const Vec&)> value) {
  StateFn f;
  f.value = std::move(value);
  f.fd_step = default_fd_step();
  return f;
}

StateFn complete_lift_apply(const Algebroid& a, const Section& x_sec, const StateFn& f) {
  check_section(a, x_sec, "complete_lift_apply");
  StateFn out;
  out.fd_step = default_fd_step();
  out.value = [a, x_sec, f](const Vec& x, const Vec& y) {
    if (x.size() != a.base_dim || y.size() != a.rank)
      throw DimensionError("complete_lift_apply: state dims mismatch");
    const Vec coeff = x_sec.coeffs(x);
    double acc = 0.0;
    Vec fiber = a.structure(x).bilinear(y, coeff);
    if (a.base_dim > 0) {
      const Vec base_part = Mat(a.sigma(x)) * coeff;
      for (int i = 0; i < a.base_dim; ++i)
        if (base_part[i] != 0.0) acc += base_part[i] * f.dx_at(x, y, i);
      const Vec ry = Mat(a.rho(x)) * y;
      for (int i = 0; i < a.base_dim; ++i)
        if (ry[i] != 0.0) fiber += ry[i] * x_sec.coeffs.partial(x, i);
    }
    for (int c = 0; c < a.rank; ++c)
      if (fiber[c] != 0.0) acc += fiber[c] * f.dy_at(x, y, c);
    return acc;
  };
  return out;
}

StateFn lift_base_function(const Algebroid& a, const SmoothScalar& f) {
  if (f.domain_dim() != a.base_dim)
    throw DimensionError("lift_base_function: function domain dim mismatch");
  StateFn out;
  out.fd_step = default_fd_step();
  out.value = [a, f](const Vec& x, const Vec& y) {
    if (x.size() != a.base_dim || y.size() != a.rank)
      throw DimensionError("lift_base_function: state dims mismatch");
    if (a.base_dim == 0) return 0.0;
    const Vec ry = Mat(a.rho(x)) * y;
    double acc = 0.0;
    for (int i = 0; i < a.base_dim; ++i)
      if (ry[i] != 0.0) acc += ry[i] * f.partial(x, i);
    return acc;
  };
  return out;
}

}  // namespace nonholo
