#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <utility>

#include "nonholo/types.hpp"

namespace nonholo {

/// Default step for central finite differences. The environment variable
/// NONHOLO_FD_STEP overrides it (read once per process).
double default_fd_step();

namespace detail {

inline void check_shape(double, const std::array<int, 3>&, const char*) {}

inline void check_shape(const Vec& v, const std::array<int, 3>& s, const char* what) {
  if (s[0] >= 0 && v.size() != s[0])
    throw DimensionError(std::string(what) + ": value has size " + std::to_string(v.size()) +
                         ", expected " + std::to_string(s[0]));
}

inline void check_shape(const Mat& m, const std::array<int, 3>& s, const char* what) {
  if (s[0] >= 0 && (m.rows() != s[0] || m.cols() != s[1]))
    throw DimensionError(std::string(what) + ": value is " + shape_string(m) + ", expected " +
                         std::to_string(s[0]) + "x" + std::to_string(s[1]));
}

inline void check_shape(const Tensor3& t, const std::array<int, 3>& s, const char* what) {
  if (s[0] >= 0 && (t.dim0() != s[0] || t.dim1() != s[1] || t.dim2() != s[2]))
    throw DimensionError(std::string(what) + ": tensor dims mismatch");
}

inline double norm_of(double v) { return std::abs(v); }
inline double norm_of(const Vec& v) { return v.norm(); }
inline double norm_of(const Mat& m) { return m.norm(); }
inline double norm_of(const Tensor3& t) { return t.frob_norm(); }

}  // namespace detail

/// Smooth map of the base coordinates carrying an optional analytic partial
/// derivative. Without one, partials come from central differences with the
/// per-coordinate step fd_step*(1+|x_i|).
template <class V>
class SmoothFn {
 public:
  using ValueFn = std::function<V(const Vec&)>;
  using PartialFn = std::function<V(const Vec&, int)>;

  SmoothFn() = default;
  SmoothFn(int domain_dim, std::array<int, 3> shape, ValueFn value, PartialFn partial = nullptr,
           double fd_step = default_fd_step())
      : dim_(domain_dim),
        shape_(shape),
        value_(std::move(value)),
        partial_(std::move(partial)),
        step_(fd_step) {
    if (domain_dim < 0) throw DimensionError("SmoothFn: negative domain dimension");
    if (!(fd_step > 0)) throw InputError("SmoothFn: fd_step must be positive");
  }

  int domain_dim() const { return dim_; }
  bool has_partial() const { return static_cast<bool>(partial_); }
  double fd_step() const { return step_; }
  bool valid() const { return static_cast<bool>(value_); }

  V operator()(const Vec& x) const {
    check_point(x);
    V v = value_(x);
    detail::check_shape(v, shape_, "SmoothFn value");
    return v;
  }

  V partial(const Vec& x, int i) const {
    check_point(x);
    if (i < 0 || i >= dim_)
      throw DimensionError("SmoothFn::partial: coordinate index " + std::to_string(i) +
                           " out of range for domain dim " + std::to_string(dim_));
    if (partial_) {
      V v = partial_(x, i);
      detail::check_shape(v, shape_, "SmoothFn partial");
      return v;
    }
    const double h = step_ * (1.0 + std::abs(x[i]));
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    return V((value_(xp) - value_(xm)) * (1.0 / (2.0 * h)));
  }

  /// Copy with the analytic partial removed (forces the FD fallback).
  SmoothFn without_partial() const {
    SmoothFn c = *this;
    c.partial_ = nullptr;
    return c;
  }

 private:
  void check_point(const Vec& x) const {
    if (!value_) throw Error("SmoothFn: empty function");
    if (x.size() != dim_)
      throw DimensionError("SmoothFn: point has length " + std::to_string(x.size()) +
                           ", domain dim is " + std::to_string(dim_));
  }

  int dim_ = 0;
  std::array<int, 3> shape_{-1, -1, -1};
  ValueFn value_;
  PartialFn partial_;
  double step_ = 1e-6;
};

using SmoothScalar = SmoothFn<double>;
using SmoothVec = SmoothFn<Vec>;
using SmoothMap = SmoothFn<Mat>;
using SmoothTensor = SmoothFn<Tensor3>;

inline SmoothScalar make_scalar_map(int domain, SmoothScalar::ValueFn f,
                                    SmoothScalar::PartialFn p = nullptr) {
  return SmoothScalar(domain, {-1, -1, -1}, std::move(f), std::move(p));
}

inline SmoothVec make_vector_map(int domain, int size, SmoothVec::ValueFn f,
                                 SmoothVec::PartialFn p = nullptr) {
  return SmoothVec(domain, {size, -1, -1}, std::move(f), std::move(p));
}

inline SmoothMap make_matrix_map(int domain, int rows, int cols, SmoothMap::ValueFn f,
                                 SmoothMap::PartialFn p = nullptr) {
  return SmoothMap(domain, {rows, cols, -1}, std::move(f), std::move(p));
}

inline SmoothTensor make_tensor_map(int domain, int d0, int d1, int d2, SmoothTensor::ValueFn f,
                                    SmoothTensor::PartialFn p = nullptr) {
  return SmoothTensor(domain, {d0, d1, d2}, std::move(f), std::move(p));
}

inline SmoothScalar constant_scalar(int domain, double v) {
  return make_scalar_map(
      domain, [v](const Vec&) { return v; }, [](const Vec&, int) { return 0.0; });
}

inline SmoothVec constant_vector(int domain, const Vec& v) {
  const Vec zero = Vec::Zero(v.size());
  return make_vector_map(
      domain, static_cast<int>(v.size()), [v](const Vec&) { return v; },
      [zero](const Vec&, int) { return zero; });
}

inline SmoothMap constant_matrix(int domain, const Mat& m) {
  const Mat zero = Mat::Zero(m.rows(), m.cols());
  return make_matrix_map(
      domain, static_cast<int>(m.rows()), static_cast<int>(m.cols()),
      [m](const Vec&) { return m; }, [zero](const Vec&, int) { return zero; });
}

inline SmoothTensor constant_tensor(int domain, const Tensor3& t) {
  const Tensor3 zero(t.dim0(), t.dim1(), t.dim2());
  return make_tensor_map(
      domain, t.dim0(), t.dim1(), t.dim2(), [t](const Vec&) { return t; },
      [zero](const Vec&, int) { return zero; });
}

/// x -> A(x)B(x); product-rule partial when both factors carry analytic ones.
SmoothMap smooth_product(const SmoothMap& a, const SmoothMap& b);

/// x -> B(x)^T G(x) B(x); analytic partial when both inputs carry them.
SmoothMap smooth_congruence(const SmoothMap& b, const SmoothMap& g);

struct GradientCheckReport {
  double max_defect = 0.0;      // worst |analytic - central FD|
  double max_bound_ratio = 0.0; // worst defect / (10*step^2*(1+|value|))
  bool pass = true;
};

/// Compares the analytic partial against central differences taken with the
/// given step; the tolerance is 10*step^2*(1+|value|). Maps without analytic
/// partials pass vacuously.
template <class V>
GradientCheckReport gradient_check(const SmoothFn<V>& f, const std::vector<Vec>& points,
                                   double step) {
  GradientCheckReport rep;
  if (!f.has_partial()) return rep;
  for (const Vec& x : points) {
    const double vnorm = detail::norm_of(f(x));
    for (int i = 0; i < f.domain_dim(); ++i) {
      const double h = step * (1.0 + std::abs(x[i]));
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      V fd = V((f(xp) - f(xm)) * (1.0 / (2.0 * h)));
      const double defect = detail::norm_of(V(f.partial(x, i) - fd));
      const double bound = 10.0 * h * h * (1.0 + vnorm);
      rep.max_defect = std::max(rep.max_defect, defect);
      rep.max_bound_ratio = std::max(rep.max_bound_ratio, defect / bound);
    }
  }
  rep.pass = rep.max_bound_ratio <= 1.0;
  return rep;
}

}  // namespace nonholo
