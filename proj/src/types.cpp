#include "nonholo/types.hpp"

#include <cmath>

namespace nonholo {

bool all_finite(const Vec& v) { return v.allFinite(); }
bool all_finite(const Mat& m) { return m.allFinite(); }

Tensor3::Tensor3(int d0, int d1, int d2) : d0_(d0), d1_(d1), d2_(d2) {
  if (d0 < 0 || d1 < 0 || d2 < 0) throw DimensionError("Tensor3: negative dimension");
  data_.assign(static_cast<size_t>(d0) * d1 * d2, 0.0);
}

int Tensor3::index(int c, int a, int b) const {
  if (c < 0 || c >= d0_ || a < 0 || a >= d1_ || b < 0 || b >= d2_)
    throw DimensionError("Tensor3: index (" + std::to_string(c) + "," + std::to_string(a) + "," +
                         std::to_string(b) + ") out of range for " + std::to_string(d0_) + "x" +
                         std::to_string(d1_) + "x" + std::to_string(d2_));
  return (c * d1_ + a) * d2_ + b;
}

Tensor3 Tensor3::operator+(const Tensor3& o) const {
  Tensor3 r = *this;
  if (o.d0_ != d0_ || o.d1_ != d1_ || o.d2_ != d2_) throw DimensionError("Tensor3: shape mismatch in +");
  for (size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
  return r;
}

Tensor3 Tensor3::operator-(const Tensor3& o) const {
  Tensor3 r = *this;
  if (o.d0_ != d0_ || o.d1_ != d1_ || o.d2_ != d2_) throw DimensionError("Tensor3: shape mismatch in -");
  for (size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
  return r;
}

Tensor3 Tensor3::operator*(double s) const {
  Tensor3 r = *this;
  for (double& v : r.data_) v *= s;
  return r;
}

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Tensor3::frob_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

bool Tensor3::finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Vec Tensor3::bilinear(const Vec& u, const Vec& v) const {
  if (u.size() != d1_ || v.size() != d2_)
    throw DimensionError("Tensor3::bilinear: argument sizes " + std::to_string(u.size()) + ", " +
                         std::to_string(v.size()) + " vs dims " + std::to_string(d1_) + ", " +
                         std::to_string(d2_));
  Vec out = Vec::Zero(d0_);
  for (int c = 0; c < d0_; ++c) {
    double acc = 0.0;
    for (int a = 0; a < d1_; ++a) {
      if (u[a] == 0.0) continue;
      for (int b = 0; b < d2_; ++b) acc += (*this)(c, a, b) * u[a] * v[b];
    }
    out[c] = acc;
  }
  return out;
}

Vec Tensor3::force_contraction(const Vec& y, const Vec& w) const {
  if (y.size() != d1_ || w.size() != d0_)
    throw DimensionError("Tensor3::force_contraction: argument sizes " + std::to_string(y.size()) +
                         ", " + std::to_string(w.size()) + " vs dims " + std::to_string(d1_) +
                         ", " + std::to_string(d0_));
  Vec out = Vec::Zero(d2_);
  for (int b = 0; b < d2_; ++b) {
    double acc = 0.0;
    for (int a = 0; a < d1_; ++a) {
      if (y[a] == 0.0) continue;
      for (int c = 0; c < d0_; ++c) acc += (*this)(c, a, b) * y[a] * w[c];
    }
    out[b] = acc;
  }
  return out;
}

Mat spd_cholesky(const Mat& a, const std::string& what) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw DimensionError(what + ": matrix not square");
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  const double pivot_floor = 1e-12 * std::max(max_diag, 1e-300);
  Mat l = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int t = 0; t < j; ++t) d -= l(j, t) * l(j, t);
    if (!(d >= pivot_floor))
      throw SingularMetricError(what + ": not positive definite (pivot " + std::to_string(d) +
                                " at index " + std::to_string(j) + ")");
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int t = 0; t < j; ++t) s -= l(i, t) * l(j, t);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

Vec spd_solve(const Mat& a, const Vec& rhs, const std::string& what) {
  Mat l = spd_cholesky(a, what);
  Vec y = l.triangularView<Eigen::Lower>().solve(rhs);
  return l.transpose().triangularView<Eigen::Upper>().solve(y);
}

Mat spd_solve(const Mat& a, const Mat& rhs, const std::string& what) {
  Mat l = spd_cholesky(a, what);
  Mat y = l.triangularView<Eigen::Lower>().solve(rhs);
  return l.transpose().triangularView<Eigen::Upper>().solve(y);
}

void require_symmetric(const Mat& a, double tol, const std::string& what) {
  const double dev = (a - a.transpose()).cwiseAbs().maxCoeff();
  const double scale = 1.0 + a.cwiseAbs().maxCoeff();
  if (dev > tol * scale)
    throw InputError(what + ": matrix not symmetric (deviation " + std::to_string(dev) + ")");
}

std::string shape_string(const Mat& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace nonholo
