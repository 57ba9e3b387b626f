#include "nonholo/nonholonomic.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace nonholo {

namespace {

Mat gram_solve(const Mat& gram, const Mat& rhs, const char* who) {
  try {
    return spd_solve(gram, rhs, who);
  } catch (const SingularMetricError& e) {
    throw DegenerateConstraintError(e.what());
  }
}

/// All pairwise ambient brackets of the frame columns, row-major [a*k+b].
/// Evaluates rho, sigma, C and the frame derivatives once.
std::vector<Vec> frame_brackets(const Algebroid& a, const SmoothMap& frame, const Vec& x) {
  const Mat b = frame(x);
  const int k = static_cast<int>(b.cols());
  const Tensor3 c = a.structure(x);
  std::vector<Vec> out(static_cast<size_t>(k) * k);
  Mat rb, sb;
  std::vector<Mat> db;
  if (a.base_dim > 0) {
    rb = Mat(a.rho(x)) * b;    // n x k
    sb = Mat(a.sigma(x)) * b;  // n x k
    db.reserve(a.base_dim);
    for (int i = 0; i < a.base_dim; ++i) db.push_back(frame.partial(x, i));
  }
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q) {
      Vec w = c.bilinear(b.col(p), b.col(q));
      for (int i = 0; i < a.base_dim; ++i) {
        if (rb(i, p) != 0.0) w += rb(i, p) * db[i].col(q);
        if (sb(i, q) != 0.0) w -= sb(i, q) * db[i].col(p);
      }
      out[static_cast<size_t>(p) * k + q] = std::move(w);
    }
  return out;
}

}  // namespace

Mat Subbundle::basis_at(const Vec& x) const {
  Mat b = basis(x);
  if (b.rows() != ambient_rank || b.cols() != rank)
    throw DimensionError("Subbundle: basis is " + shape_string(b) + ", expected " +
                         std::to_string(ambient_rank) + "x" + std::to_string(rank));
  Eigen::JacobiSVD<Mat> svd(b);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(smin > 1e-10 * smax))
    throw DegenerateConstraintError("Subbundle: basis rank deficient (singular values " +
                                    std::to_string(smin) + " vs " + std::to_string(smax) + ")");
  return b;
}

Subbundle make_subbundle(const Algebroid& ambient, SmoothMap basis) {
  if (basis.domain_dim() != ambient.base_dim)
    throw DimensionError("make_subbundle: basis domain dim mismatch");
  Subbundle d;
  d.ambient_rank = ambient.rank;
  d.basis = std::move(basis);
  // rank from a probe at the domain origin
  Mat b = d.basis(Vec::Zero(ambient.base_dim));
  if (b.rows() != ambient.rank)
    throw DimensionError("make_subbundle: basis has " + std::to_string(b.rows()) +
                         " rows, ambient rank is " + std::to_string(ambient.rank));
  if (b.cols() < 1 || b.cols() > ambient.rank)
    throw InputError("make_subbundle: constraint rank out of range");
  d.rank = static_cast<int>(b.cols());
  return d;
}

Projector orthogonal_projector(const SmoothMap& metric, const Subbundle& d) {
  const int n = metric.domain_dim();
  const int m = d.ambient_rank;
  const int k = d.rank;
  const Subbundle dc = d;
  const SmoothMap g = metric;
  SmoothMap extractor = make_matrix_map(n, k, m, [dc, g](const Vec& x) {
    const Mat b = dc.basis_at(x);
    Mat gg = g(x);
    require_symmetric(gg, 1e-12, "orthogonal_projector metric");
    const Mat bg = b.transpose() * gg;  // k x m
    return gram_solve(bg * b, bg, "orthogonal_projector gram");
  });
  SmoothMap matrix = make_matrix_map(n, m, m, [dc, extractor](const Vec& x) {
    return Mat(dc.basis_at(x) * extractor(x));
  });
  Projector p;
  p.matrix = std::move(matrix);
  p.extractor = std::move(extractor);
  p.g_orthogonal = true;
  return p;
}

Projector projector_along(const Subbundle& d, const SmoothMap& complement) {
  const int n = d.basis.domain_dim();
  const int m = d.ambient_rank;
  const int k = d.rank;
  if (complement.domain_dim() != n)
    throw DimensionError("projector_along: complement domain dim mismatch");
  const Subbundle dc = d;
  const SmoothMap comp = complement;
  // Rows 1..k of [B | N]^{-1} give coefficients in B and vanish on span N.
  SmoothMap extractor = make_matrix_map(n, k, m, [dc, comp, m, k](const Vec& x) {
    const Mat b = dc.basis_at(x);
    const Mat nn = comp(x);
    if (nn.rows() != m || nn.cols() != m - k)
      throw DimensionError("projector_along: complement is " + shape_string(nn) + ", expected " +
                           std::to_string(m) + "x" + std::to_string(m - k));
    Mat f(m, m);
    f << b, nn;
    Eigen::PartialPivLU<Mat> lu(f);
    if (std::abs(lu.determinant()) < 1e-12)
      throw DegenerateConstraintError("projector_along: complement does not complete the basis");
    return Mat(lu.inverse().topRows(k));
  });
  SmoothMap matrix = make_matrix_map(n, m, m, [dc, extractor](const Vec& x) {
    return Mat(dc.basis_at(x) * extractor(x));
  });
  Projector p;
  p.matrix = std::move(matrix);
  p.extractor = std::move(extractor);
  p.g_orthogonal = false;
  return p;
}

ProjectorReport projector_invariants(const Projector& p, const Subbundle& d,
                                     const SmoothMap* metric, const std::vector<Vec>& samples,
                                     double tol) {
  ProjectorReport rep;
  for (const Vec& x : samples) {
    const Mat pm = p.matrix(x);
    const Mat b = d.basis_at(x);
    rep.max_idempotency = std::max(rep.max_idempotency, (pm * pm - pm).cwiseAbs().maxCoeff());
    rep.max_range = std::max(rep.max_range, (pm * b - b).cwiseAbs().maxCoeff());
    if (p.g_orthogonal && metric != nullptr) {
      const Mat g = (*metric)(x);
      rep.max_self_adjoint =
          std::max(rep.max_self_adjoint, (g * pm - pm.transpose() * g).cwiseAbs().maxCoeff());
    }
  }
  rep.pass = rep.max_idempotency <= tol && rep.max_range <= tol && rep.max_self_adjoint <= tol;
  return rep;
}

Mat complete_frame(const SmoothMap& metric, const Subbundle& d, const Vec& x) {
  const int m = d.ambient_rank;
  const int k = d.rank;
  const Mat b = d.basis_at(x);
  Mat g = metric(x);
  require_symmetric(g, 1e-12, "complete_frame metric");

  std::vector<Vec> ortho;  // G-orthonormal, spans D then grows to all of E
  auto project_out = [&](Vec v) {
    for (const Vec& q : ortho) v -= q * q.dot(g * v);
    return v;
  };
  auto g_norm = [&](const Vec& v) { return std::sqrt(std::max(0.0, v.dot(g * v))); };

  for (int j = 0; j < k; ++j) {
    Vec r = project_out(b.col(j));
    r = project_out(r);  // second pass for orthogonality at roundoff level
    const double nrm = g_norm(r);
    if (!(nrm > 1e-10 * std::max(1.0, g_norm(b.col(j)))))
      throw DegenerateConstraintError("complete_frame: constraint basis degenerate at column " +
                                      std::to_string(j));
    ortho.push_back(r / nrm);
  }

  Mat n_frame(m, m - k);
  for (int step = 0; step < m - k; ++step) {
    int best = -1;
    double best_norm = 0.0;
    for (int i = 0; i < m; ++i) {
      Vec r = project_out(Vec(Vec::Unit(m, i)));
      const double nrm = g_norm(r);
      if (nrm > best_norm) {  // strict: ties resolve to the lowest index
        best_norm = nrm;
        best = i;
      }
    }
    if (best < 0 || !(best_norm > 1e-12))
      throw DegenerateConstraintError("complete_frame: cannot complete the frame");
    Vec r = project_out(Vec(Vec::Unit(m, best)));
    r = project_out(r);
    r /= g_norm(r);
    ortho.push_back(r);
    n_frame.col(step) = r;
  }
  return n_frame;
}

ReducedAlgebroid reduce_algebroid(const Algebroid& a, const Subbundle& d, const Projector& p) {
  if (d.ambient_rank != a.rank) throw DimensionError("reduce_algebroid: subbundle rank mismatch");
  const int n = a.base_dim;
  const int k = d.rank;
  SmoothMap rho_d = smooth_product(a.rho, d.basis);
  SmoothMap sigma_d = smooth_product(a.sigma, d.basis);
  const Algebroid amb = a;
  const SmoothMap basis = d.basis;
  const SmoothMap extractor = p.extractor;
  SmoothTensor c_d = make_tensor_map(n, k, k, k, [amb, basis, extractor, k](const Vec& x) {
    const std::vector<Vec> w = frame_brackets(amb, basis, x);
    const Mat e = extractor(x);
    Tensor3 out(k, k, k);
    for (int p2 = 0; p2 < k; ++p2)
      for (int q = 0; q < k; ++q) {
        const Vec coef = e * w[static_cast<size_t>(p2) * k + q];
        for (int c = 0; c < k; ++c) out(c, p2, q) = coef[c];
      }
    return out;
  });
  ReducedAlgebroid red;
  red.algebroid =
      make_algebroid(n, k, std::move(rho_d), std::move(sigma_d), std::move(c_d), a.is_quasi_lie);
  red.ambient = a;
  red.subbundle = d;
  red.projector = p;
  return red;
}

MechanicalLagrangian restricted_lagrangian(const MechanicalLagrangian& l, const Subbundle& d) {
  if (l.rank != d.ambient_rank) throw DimensionError("restricted_lagrangian: rank mismatch");
  return make_mechanical_lagrangian(smooth_congruence(d.basis, l.metric), l.potential, d.rank);
}

std::pair<Vec, Vec> nonholonomic_el_vector_field(const Algebroid& a,
                                                 const MechanicalLagrangian& l, const Subbundle& d,
                                                 const State& s) {
  const int n = a.base_dim;
  const int m = a.rank;
  const int k = d.rank;
  if (l.rank != m) throw DimensionError("nonholonomic_el_vector_field: Lagrangian rank mismatch");
  if (s.y.size() != k)
    throw DimensionError("nonholonomic_el_vector_field: state fiber has length " +
                         std::to_string(s.y.size()) + ", constraint rank is " + std::to_string(k));
  if (s.x.size() != n) throw DimensionError("nonholonomic_el_vector_field: base point mismatch");
  if (!all_finite(s.x) || !all_finite(s.y))
    throw InputError("nonholonomic_el_vector_field: non-finite state");

  const Mat b = d.basis_at(s.x);
  const Mat nc = complete_frame(l.metric, d, s.x);
  Mat f(m, m);
  f << b, nc;
  Eigen::PartialPivLU<Mat> flu(f);

  const Mat g = metric_at(l, s.x);
  const Mat ghat = f.transpose() * g * f;
  Vec yhat = Vec::Zero(m);
  yhat.head(k) = s.y;
  const Vec xihat = ghat * yhat;

  const std::vector<Vec> w = frame_brackets(a, d.basis, s.x);
  Vec rhs = Vec::Zero(k);
  for (int bq = 0; bq < k; ++bq) {
    double acc = 0.0;
    for (int dq = 0; dq < k; ++dq) {
      if (s.y[dq] == 0.0) continue;
      const Vec chat = flu.solve(w[static_cast<size_t>(dq) * k + bq]);
      acc += s.y[dq] * chat.dot(xihat);
    }
    rhs[bq] = acc;
  }

  Vec xdot = Mat(a.rho(s.x)) * (b * s.y);
  if (n > 0) {
    const SmoothMap gd_map = smooth_congruence(d.basis, l.metric);
    Vec dl(n);
    for (int i = 0; i < n; ++i) {
      const Mat dgd = gd_map.partial(s.x, i);
      dl[i] = 0.5 * s.y.dot(dgd * s.y) - l.potential.partial(s.x, i);
      if (xdot[i] != 0.0) rhs -= xdot[i] * (dgd * s.y);
    }
    rhs += (Mat(a.sigma(s.x)) * b).transpose() * dl;
  }

  const Mat gd = ghat.topLeftCorner(k, k);
  Vec ydot;
  try {
    ydot = spd_solve(gd, rhs, "nonholonomic mass matrix");
  } catch (const SingularMetricError& e) {
    throw DegenerateConstraintError(e.what());
  }
  return {std::move(xdot), std::move(ydot)};
}

VectorField nonholonomic_el_field(const Algebroid& a, const MechanicalLagrangian& l,
                                  const Subbundle& d) {
  return [a, l, d](const State& s) { return nonholonomic_el_vector_field(a, l, d, s); };
}

EquivalenceReport verify_route_equivalence(const Algebroid& a, const MechanicalLagrangian& l,
                                     const Subbundle& d, const std::vector<State>& samples,
                                     double tol) {
  const Projector p = orthogonal_projector(l.metric, d);
  const ReducedAlgebroid red = reduce_algebroid(a, d, p);
  const MechanicalLagrangian lr = restricted_lagrangian(l, d);
  EquivalenceReport rep;
  for (size_t i = 0; i < samples.size(); ++i) {
    const auto [dax, day] = nonholonomic_el_vector_field(a, l, d, samples[i]);
    const auto [rbx, rby] = el_vector_field(red.algebroid, lr, samples[i]);
    const double scale = 1.0 + std::sqrt(rbx.squaredNorm() + rby.squaredNorm());
    const double gap =
        std::sqrt((dax - rbx).squaredNorm() + (day - rby).squaredNorm()) / scale;
    if (gap > rep.max_gap) {
      rep.max_gap = gap;
      rep.argmax = static_cast<int>(i);
    }
  }
  rep.pass = rep.max_gap <= tol;
  return rep;
}

NilpotentDouble nilpotent_double(const Tensor3& c) {
  const int k = c.dim0();
  if (c.dim1() != k || c.dim2() != k)
    throw DimensionError("nilpotent_double: constants must be k x k x k");
  if (k < 1) throw InputError("nilpotent_double: empty constants");
  double viol = 0.0;
  for (int t = 0; t < k; ++t)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) viol = std::max(viol, std::abs(c(t, i, j) + c(t, j, i)));
  if (viol > 1e-12 * (1.0 + c.max_abs()))
    throw InputError("nilpotent_double: constants not skew (violation " + std::to_string(viol) +
                     ")");

  const int m = 2 * k;
  Tensor3 ce(m, m, m);
  for (int t = 0; t < k; ++t)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) ce(k + t, i, j) = c(t, i, j);

  NilpotentDouble nd;
  nd.ambient = make_algebroid(0, m, constant_matrix(0, Mat::Zero(0, m)),
                              constant_matrix(0, Mat::Zero(0, m)), constant_tensor(0, ce), true);
  nd.embed = Mat::Zero(m, k);
  nd.embed.topRows(k) = Mat::Identity(k, k);
  nd.embed.bottomRows(k) = Mat::Identity(k, k);
  nd.complement = Mat::Zero(m, k);
  nd.complement.topRows(k) = Mat::Identity(k, k);
  Mat extract = Mat::Zero(k, m);
  extract.rightCols(k) = Mat::Identity(k, k);
  nd.projector = nd.embed * extract;
  nd.subbundle = make_subbundle(nd.ambient, constant_matrix(0, nd.embed));
  nd.proj.matrix = constant_matrix(0, nd.projector);
  nd.proj.extractor = constant_matrix(0, extract);
  nd.proj.g_orthogonal = false;
  return nd;
}

}  // namespace nonholo
