#include "nonholo/smooth_map.hpp"

#include <cstdlib>

namespace nonholo {

double default_fd_step() {
  static const double step = [] {
    if (const char* env = std::getenv("NONHOLO_FD_STEP")) {
      char* end = nullptr;
      const double v = std::strtod(env, &end);
      if (end != env && v > 0.0) return v;
    }
    return 1e-6;
  }();
  return step;
}

SmoothMap smooth_product(const SmoothMap& a, const SmoothMap& b) {
  if (a.domain_dim() != b.domain_dim())
    throw DimensionError("smooth_product: domain dims differ");
  const int n = a.domain_dim();
  SmoothMap::ValueFn value = [a, b](const Vec& x) { return Mat(a(x) * b(x)); };
  SmoothMap::PartialFn part = nullptr;
  if (a.has_partial() && b.has_partial()) {
    part = [a, b](const Vec& x, int i) {
      return Mat(a.partial(x, i) * b(x) + a(x) * b.partial(x, i));
    };
  }
  return make_matrix_map(n, -1, -1, std::move(value), std::move(part));
}

SmoothMap smooth_congruence(const SmoothMap& b, const SmoothMap& g) {
  if (b.domain_dim() != g.domain_dim())
    throw DimensionError("smooth_congruence: domain dims differ");
  const int n = b.domain_dim();
  SmoothMap::ValueFn value = [b, g](const Vec& x) {
    Mat bb = b(x);
    return Mat(bb.transpose() * g(x) * bb);
  };
  SmoothMap::PartialFn part = nullptr;
  if (b.has_partial() && g.has_partial()) {
    part = [b, g](const Vec& x, int i) {
      Mat bb = b(x);
      Mat gg = g(x);
      Mat db = b.partial(x, i);
      return Mat(db.transpose() * gg * bb + bb.transpose() * g.partial(x, i) * bb +
                 bb.transpose() * gg * db);
    };
  }
  return make_matrix_map(n, -1, -1, std::move(value), std::move(part));
}

}  // namespace nonholo
