#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace nonholo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shape or size of an argument does not match the object it is used with.
struct DimensionError : Error {
  using Error::Error;
};

/// Invalid argument values: bad parameters, non-skew constants, malformed input.
struct InputError : Error {
  using Error::Error;
};

/// Metric failed the symmetric positive-definite factorization.
struct SingularMetricError : Error {
  using Error::Error;
};

/// Constraint basis is rank deficient or its Gram matrix is not SPD.
struct DegenerateConstraintError : Error {
  using Error::Error;
};

bool all_finite(const Vec& v);
bool all_finite(const Mat& m);

/// Dense rank-3 array. For structure functions the index order is (c, a, b):
/// T(c,a,b) is the e_c coefficient of the bracket of frame sections [e_a, e_b].
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int d0, int d1, int d2);

  int dim0() const { return d0_; }
  int dim1() const { return d1_; }
  int dim2() const { return d2_; }

  double& operator()(int c, int a, int b) { return data_[index(c, a, b)]; }
  double operator()(int c, int a, int b) const { return data_[index(c, a, b)]; }

  Tensor3 operator+(const Tensor3& o) const;
  Tensor3 operator-(const Tensor3& o) const;
  Tensor3 operator*(double s) const;

  double max_abs() const;
  double frob_norm() const;
  bool finite() const;

  /// out_c = sum_{a,b} T(c,a,b) u_a v_b
  Vec bilinear(const Vec& u, const Vec& v) const;
  /// out_b = sum_{a,c} T(c,a,b) y_a w_c  (the Euler-Lagrange force contraction)
  Vec force_contraction(const Vec& y, const Vec& w) const;

 private:
  int index(int c, int a, int b) const;
  int d0_ = 0, d1_ = 0, d2_ = 0;
  std::vector<double> data_;
};

/// Lower Cholesky factor with a pivot guard: throws SingularMetricError when a
/// pivot drops below 1e-12 times the largest diagonal entry.
Mat spd_cholesky(const Mat& a, const std::string& what);
Vec spd_solve(const Mat& a, const Vec& rhs, const std::string& what);
Mat spd_solve(const Mat& a, const Mat& rhs, const std::string& what);
void require_symmetric(const Mat& a, double tol, const std::string& what);

std::string shape_string(const Mat& m);

}  // namespace nonholo
