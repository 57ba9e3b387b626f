#include "nonholo/sampling.hpp"

namespace nonholo {

namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                           31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

double radical_inverse(int base, long index) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * (index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

Vec Rng::uniform_vec(int n, double lo, double hi) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
  return v;
}

std::vector<Vec> halton_points(const Box& box, int count) {
  const int dim = static_cast<int>(box.size());
  if (dim > static_cast<int>(sizeof(kPrimes) / sizeof(kPrimes[0])))
    throw InputError("halton_points: dimension too large");
  std::vector<Vec> out;
  out.reserve(count);
  for (long idx = 1; idx <= count; ++idx) {
    Vec p(dim);
    for (int d = 0; d < dim; ++d) {
      const double u = radical_inverse(kPrimes[d], idx);
      p[d] = box[d].first + (box[d].second - box[d].first) * u;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<State> halton_states(const Box& base_box, const Box& fiber_box, int count) {
  Box joint = base_box;
  joint.insert(joint.end(), fiber_box.begin(), fiber_box.end());
  const int n = static_cast<int>(base_box.size());
  const int k = static_cast<int>(fiber_box.size());
  std::vector<State> out;
  out.reserve(count);
  for (const Vec& p : halton_points(joint, count))
    out.push_back(State{p.head(n), p.tail(k), 0.0});
  return out;
}

std::vector<Vec> random_points(Rng& rng, const Box& box, int count) {
  std::vector<Vec> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Vec p(box.size());
    for (size_t d = 0; d < box.size(); ++d) p[d] = rng.uniform(box[d].first, box[d].second);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<State> random_states(Rng& rng, const Box& base_box, const Box& fiber_box, int count) {
  std::vector<State> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    State s;
    s.x.resize(base_box.size());
    for (size_t d = 0; d < base_box.size(); ++d)
      s.x[d] = rng.uniform(base_box[d].first, base_box[d].second);
    s.y.resize(fiber_box.size());
    for (size_t d = 0; d < fiber_box.size(); ++d)
      s.y[d] = rng.uniform(fiber_box[d].first, fiber_box[d].second);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace nonholo
